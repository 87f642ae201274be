// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/data/corpus_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "violet/core/binary_io.hpp"
#include "violet/core/errors.hpp"

namespace fs = std::filesystem;

namespace violet::data {

namespace {

constexpr char kContainerTag[] = "VCLIP";
constexpr std::uint32_t kContainerVersion = 1;

std::uint8_t quantize(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

// Reads the next whitespace-delimited header token, skipping '#' comments.
int ppm_header_int(std::istream& in, const fs::path& path) {
  in >> std::ws;
  while (in.peek() == '#') {
    std::string skip;
    std::getline(in, skip);
    in >> std::ws;
  }
  int v = -1;
  if (!(in >> v) || v < 0) throw DataError("malformed PPM header: " + path.string());
  return v;
}

}  // namespace

std::vector<ClipDescriptor> load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path.string());
  const fs::path base = path.parent_path();
  std::vector<ClipDescriptor> out;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw ParseError("expected 3 tab-separated fields", lineno);
    ClipDescriptor d;
    d.clip_id = line.substr(0, t1);
    const std::string frames = line.substr(t1 + 1, t2 - t1 - 1);
    d.caption = line.substr(t2 + 1);
    if (d.clip_id.empty()) throw ParseError("empty clip_id", lineno);
    if (frames.empty()) throw ParseError("empty frames_path", lineno);
    if (d.caption.empty()) throw ParseError("missing caption", lineno);
    d.frames_path = fs::path(frames).is_absolute() ? fs::path(frames) : base / frames;
    d.line = lineno;
    out.push_back(std::move(d));
  }
  return out;
}

VideoClip load_clip(const ClipDescriptor& desc) {
  VideoClip clip;
  clip.clip_id = desc.clip_id;
  clip.caption = desc.caption;
  if (fs::is_directory(desc.frames_path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(desc.frames_path)) {
      if (e.is_regular_file() && e.path().extension() == ".ppm") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DataError("no .ppm frames in " + desc.frames_path.string());
    for (const auto& f : files) clip.frames.push_back(read_ppm(f));
  } else if (fs::is_regular_file(desc.frames_path)) {
    clip.frames = read_container(desc.frames_path);
  } else {
    throw DataError("frames not found for clip " + desc.clip_id + ": " + desc.frames_path.string());
  }
  return clip;
}

fs::path write_corpus(const fs::path& dir, const std::vector<VideoClip>& clips, FrameFormat format) {
  fs::create_directories(dir / "clips");
  const fs::path manifest = dir / "manifest.tsv";
  std::ofstream out(manifest);
  if (!out) throw DataError("cannot write manifest: " + manifest.string());
  for (const auto& clip : clips) {
    if (clip.clip_id.find('\t') != std::string::npos || clip.caption.find('\n') != std::string::npos) {
      throw InputError("clip id or caption contains a separator: " + clip.clip_id);
    }
    fs::path rel;
    if (format == FrameFormat::PpmDirectory) {
      rel = fs::path("clips") / clip.clip_id;
      fs::create_directories(dir / rel);
      for (std::size_t f = 0; f < clip.frames.size(); ++f) {
        char name[32];
        std::snprintf(name, sizeof name, "%05zu.ppm", f);
        write_ppm(dir / rel / name, clip.frames[f]);
      }
    } else {
      rel = fs::path("clips") / (clip.clip_id + ".vclip");
      write_container(dir / rel, clip.frames);
    }
    out << clip.clip_id << '\t' << rel.generic_string() << '\t' << clip.caption << '\n';
  }
  if (!out) throw DataError("failed writing manifest: " + manifest.string());
  return manifest;
}

void write_ppm(const fs::path& path, const Frame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "P6\n" << frame.width << ' ' << frame.height << "\n255\n";
  std::vector<char> bytes(frame.pixels.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = static_cast<char>(quantize(frame.pixels[i]));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing " + path.string());
}

Frame read_ppm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P6") throw DataError("not a binary PPM: " + path.string());
  const int w = ppm_header_int(in, path);
  const int h = ppm_header_int(in, path);
  const int maxval = ppm_header_int(in, path);
  if (maxval != 255 || w == 0 || h == 0) throw DataError("unsupported PPM: " + path.string());
  in.get();  // single whitespace after maxval
  Frame f(h, w);
  std::vector<unsigned char> bytes(f.pixels.size());
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) throw DataError("truncated PPM: " + path.string());
  for (std::size_t i = 0; i < bytes.size(); ++i) f.pixels[i] = bytes[i] / 255.0;
  return f;
}

void write_container(const fs::path& path, const std::vector<Frame>& frames) {
  if (frames.empty()) throw InputError("container needs at least one frame");
  BinaryWriter w(path);
  w.magic(kContainerTag, kContainerVersion);
  w.u32(static_cast<std::uint32_t>(frames.size()));
  w.u32(static_cast<std::uint32_t>(frames[0].height));
  w.u32(static_cast<std::uint32_t>(frames[0].width));
  std::string bytes;
  for (const auto& f : frames) {
    if (f.height != frames[0].height || f.width != frames[0].width) throw InputError("frames differ in size");
    bytes.resize(f.pixels.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = static_cast<char>(quantize(f.pixels[i]));
    w.str(bytes);
  }
  w.close();
}

std::vector<Frame> read_container(const fs::path& path) {
  BinaryReader r(path);
  r.magic(kContainerTag, kContainerVersion);
  const auto n = r.u32();
  const auto h = static_cast<int>(r.u32());
  const auto w = static_cast<int>(r.u32());
  std::vector<Frame> out;
  for (std::uint32_t k = 0; k < n; ++k) {
    const std::string bytes = r.str();
    Frame f(h, w);
    if (bytes.size() != f.pixels.size()) throw DataError("corrupt frame in " + path.string());
    for (std::size_t i = 0; i < bytes.size(); ++i) f.pixels[i] = static_cast<unsigned char>(bytes[i]) / 255.0;
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace violet::data
