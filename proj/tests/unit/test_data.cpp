// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "violet/core/errors.hpp"
#include "violet/data/corpus_io.hpp"
#include "violet/data/synthetic.hpp"
#include "violet/data/video.hpp"

using namespace violet;
using namespace violet::data;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("violet_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

VideoClip counting_clip(int frames) {
  VideoClip c;
  c.clip_id = "c";
  for (int f = 0; f < frames; ++f) c.frames.push_back(Frame(2, 2, f / 255.0));
  return c;
}

}  // namespace

TEST(SampleFrames, MidpointRule) {
  EXPECT_EQ(sample_indices(20, 4), (std::vector<int>{2, 7, 12, 17}));
  EXPECT_EQ(sample_indices(9, 1), (std::vector<int>{4}));
  EXPECT_EQ(sample_indices(5, 5), (std::vector<int>{0, 1, 2, 3, 4}));
  EXPECT_THROW(sample_indices(3, 4), InputError);
  EXPECT_THROW(sample_indices(3, 0), InputError);
}

TEST(SampleFrames, StrictlyIncreasingForAllSizes) {
  for (int F = 1; F <= 40; ++F) {
    for (int T = 1; T <= F; ++T) {
      const auto idx = sample_indices(F, T);
      ASSERT_EQ(static_cast<int>(idx.size()), T);
      EXPECT_GE(idx.front(), 0);
      EXPECT_LT(idx.back(), F);
      for (int k = 1; k < T; ++k) EXPECT_LT(idx[k - 1], idx[k]) << F << " " << T;
    }
  }
}

TEST(SampleFrames, JitterStaysInsideSegments) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto idx = sample_indices(17, 4, &rng);
    for (int k = 0; k < 4; ++k) {
      EXPECT_GE(idx[k], k * 17 / 4);
      EXPECT_LT(idx[k], (k + 1) * 17 / 4);
    }
  }
}

TEST(SampleFrames, CopiesSelectedFrames) {
  const auto clip = counting_clip(20);
  const auto s = sample_frames(clip, 4);
  ASSERT_EQ(s.frames.size(), 4u);
  EXPECT_EQ(s.frames[1], clip.frames[7]);
}

TEST(Patchify, GridShapeAndRoundTrip) {
  Rng rng(1);
  std::vector<Frame> frames(4, Frame(224, 224));
  for (auto& f : frames)
    for (auto& v : f.pixels) v = rng.uniform();
  const PatchGrid g = patchify(frames, 32);
  EXPECT_EQ(g.frames, 4);
  EXPECT_EQ(g.rows, 7);
  EXPECT_EQ(g.cols, 7);
  EXPECT_EQ(g.count(), 4 * 49);
  EXPECT_EQ(g.patches.cols(), 32 * 32 * 3);
  EXPECT_EQ(reassemble(g), frames);
}

TEST(Patchify, RowMajorPatchOrder) {
  Frame f(4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) f.at(y, x, 0) = y * 4 + x;
  const Frame frames[] = {f};
  const PatchGrid g = patchify(frames, 2);
  // patch (0, 1) starts at pixel (0, 2); patch (1, 0) at (2, 0)
  EXPECT_EQ(g.patches(g.index(0, 0, 1), 0), 2.0);
  EXPECT_EQ(g.patches(g.index(0, 1, 0), 0), 8.0);
  EXPECT_EQ(g.patches(g.index(0, 1, 1), 3 * 3), 15.0);  // last pixel of last patch
}

TEST(Patchify, RejectsNonDivisible) {
  const Frame frames[] = {Frame(10, 12)};
  EXPECT_THROW(patchify(frames, 4), InputError);
}

TEST(Synthetic, DeterministicAndShaped) {
  const auto a = generate_synthetic_corpus(8, 16, 64, 42);
  const auto b = generate_synthetic_corpus(8, 16, 64, 42);
  ASSERT_EQ(a.size(), 8u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].caption, b[i].caption);
    EXPECT_EQ(a[i].frames, b[i].frames);
    ASSERT_EQ(a[i].frames.size(), 16u);
    EXPECT_EQ(a[i].frames[0].height, 64);
    EXPECT_EQ(a[i].frames[0].width, 64);
    for (double v : a[i].frames[3].pixels) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
  const auto c = generate_synthetic_corpus(8, 16, 64, 43);
  bool differ = false;
  for (std::size_t i = 0; i < a.size(); ++i) differ |= a[i].frames != c[i].frames;
  EXPECT_TRUE(differ);
}

TEST(Synthetic, InvalidResolutionIsConfigError) {
  EXPECT_THROW(generate_synthetic_corpus(2, 4, 30, 0, 8), ConfigError);
  EXPECT_THROW(generate_synthetic_corpus(0, 4, 32, 0, 8), ConfigError);
}

TEST(Synthetic, CaptionsDifferOnlyInDirectionWord) {
  const std::string l = make_caption({{0, ShapeKind::Square, Direction::Left}});
  const std::string r = make_caption({{0, ShapeKind::Square, Direction::Right}});
  EXPECT_EQ(l, "a red square moves left");
  EXPECT_EQ(r, "a red square moves right");
  std::istringstream li(l), ri(r);
  int diffs = 0;
  for (std::string a, b; li >> a && ri >> b;) diffs += a != b;
  EXPECT_EQ(diffs, 1);
}

TEST(Synthetic, CaptionsParseBack) {
  SynthConfig cfg;
  cfg.n_clips = 40;
  cfg.resolution = 32;
  cfg.frames_per_clip = 4;
  cfg.seed = 5;
  for (const auto& c : generate_synthetic(cfg)) {
    const auto parsed = parse_caption(c.clip.caption);
    ASSERT_TRUE(parsed.has_value()) << c.clip.caption;
    EXPECT_EQ(*parsed, c.clauses());
    EXPECT_GE(c.objects.size(), 1u);
    EXPECT_LE(c.objects.size(), 3u);
  }
  EXPECT_FALSE(parse_caption("a red square jumps left").has_value());
  EXPECT_FALSE(parse_caption("").has_value());
}

TEST(Synthetic, CaptionSlotsCoveredAcrossSeeds) {
  std::set<std::string> colors, shapes, dirs;
  SynthConfig cfg;
  cfg.n_clips = 64;
  cfg.resolution = 32;
  cfg.frames_per_clip = 2;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    cfg.seed = seed;
    for (const auto& c : generate_synthetic(cfg)) {
      for (const auto& cl : c.clauses()) {
        colors.insert(std::string(color_name(cl.color)));
        shapes.insert(std::string(shape_name(cl.shape)));
        dirs.insert(std::string(direction_name(cl.direction)));
      }
    }
  }
  EXPECT_EQ(colors.size(), static_cast<std::size_t>(kNumColors));
  EXPECT_EQ(shapes.size(), static_cast<std::size_t>(kNumShapes));
  EXPECT_EQ(dirs.size(), static_cast<std::size_t>(kNumDirections));
}

TEST(Synthetic, DistinctProgramsGiveDistinctCaptions) {
  std::set<std::string> seen;
  for (int c = 0; c < kNumColors; ++c)
    for (int s = 0; s < kNumShapes; ++s)
      for (int d = 0; d < kNumDirections; ++d)
        seen.insert(make_caption({{c, static_cast<ShapeKind>(s), static_cast<Direction>(d)}}));
  EXPECT_EQ(seen.size(), static_cast<std::size_t>(kNumColors * kNumShapes * kNumDirections));
}

TEST(Synthetic, TwinIsExactFrameReversal) {
  SynthConfig cfg;
  cfg.n_clips = 6;
  cfg.resolution = 32;
  cfg.frames_per_clip = 20;
  cfg.twins = true;
  cfg.unique_captions = true;
  cfg.seed = 9;
  const auto clips = generate_synthetic(cfg);
  ASSERT_EQ(clips.size(), 6u);
  std::set<std::string> captions;
  for (int k = 0; k < 3; ++k) {
    const auto& a = clips[2 * k].clip;
    const auto& b = clips[2 * k + 1].clip;
    for (int f = 0; f < 20; ++f) EXPECT_EQ(a.frames[f], b.frames[19 - f]);
    EXPECT_NE(a.caption, b.caption);
    captions.insert(a.caption);
    captions.insert(b.caption);
    // midpoint sampling of the twin is the reversed sample of the original
    const auto sa = sample_frames(a, 4), sb = sample_frames(b, 4);
    for (int t = 0; t < 4; ++t) EXPECT_EQ(sa.frames[t], sb.frames[3 - t]);
  }
  EXPECT_EQ(captions.size(), 6u);
}

TEST(Synthetic, ShapesActuallyMove) {
  SynthConfig cfg;
  cfg.n_clips = 10;
  cfg.resolution = 32;
  cfg.frames_per_clip = 8;
  cfg.max_objects = 1;
  for (const auto& c : generate_synthetic(cfg)) {
    EXPECT_NE(c.clip.frames.front(), c.clip.frames.back()) << c.clip.caption;
    double lit = 0;
    for (double v : c.clip.frames[0].pixels) lit += v > 0;
    EXPECT_GT(lit, 0);
  }
}

TEST(Manifest, EmptyAndWellFormed) {
  const fs::path dir = scratch_dir("manifest");
  {
    std::ofstream(dir / "empty.tsv");
    std::ofstream out(dir / "three.tsv");
    out << "a\tclips/a\ta red square moves left\n"
        << "b\tclips/b.vclip\ta blue circle moves up\n"
        << "\n"
        << "c\t/abs/c\tcaption with\ttab\n";
  }
  EXPECT_TRUE(load_manifest(dir / "empty.tsv").empty());
  const auto d = load_manifest(dir / "three.tsv");
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[0].clip_id, "a");
  EXPECT_EQ(d[1].caption, "a blue circle moves up");
  EXPECT_EQ(d[0].frames_path, dir / "clips/a");
  EXPECT_EQ(d[2].frames_path, fs::path("/abs/c"));
  EXPECT_EQ(d[2].caption, "caption with\ttab");
  EXPECT_EQ(d[2].line, 4);
}

TEST(Manifest, MalformedLineCarriesLineNumber) {
  const fs::path dir = scratch_dir("manifest_bad");
  {
    std::ofstream out(dir / "bad.tsv");
    out << "a\tclips/a\tfine\n"
        << "b\tclips/b\n";
  }
  try {
    load_manifest(dir / "bad.tsv");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(load_manifest(dir / "missing.tsv"), DataError);
}

TEST(CorpusIo, RoundTripBothFormats) {
  const auto clips = generate_synthetic_corpus(3, 5, 32, 11);
  for (auto format : {FrameFormat::PpmDirectory, FrameFormat::Container}) {
    const fs::path dir = scratch_dir(format == FrameFormat::Container ? "io_vclip" : "io_ppm");
    const fs::path manifest = write_corpus(dir, clips, format);
    const auto desc = load_manifest(manifest);
    ASSERT_EQ(desc.size(), clips.size());
    for (std::size_t i = 0; i < clips.size(); ++i) {
      const VideoClip c = load_clip(desc[i]);
      EXPECT_EQ(c.clip_id, clips[i].clip_id);
      EXPECT_EQ(c.caption, clips[i].caption);
      EXPECT_EQ(c.frames, clips[i].frames);  // palette values survive 8-bit storage
    }
  }
}

TEST(CorpusIo, MissingFramesIsDataError) {
  ClipDescriptor d{"x", "/nonexistent/violet/frames", "cap", 1};
  EXPECT_THROW(load_clip(d), DataError);
}
