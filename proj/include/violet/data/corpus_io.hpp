// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "violet/data/video.hpp"

namespace violet::data {

/// One manifest record. `frames_path` is resolved against the manifest's
/// directory; pixels are loaded on demand by load_clip().
struct ClipDescriptor {
  std::string clip_id;
  std::filesystem::path frames_path;
  std::string caption;
  int line = 0;
};

/// Tab-separated `clip_id  frames_path  caption`, one record per line. Blank
/// lines and lines starting with '#' are skipped.
std::vector<ClipDescriptor> load_manifest(const std::filesystem::path& path);

/// frames_path is either a directory of numbered .ppm files (loaded in name
/// order) or a single .vclip container.
VideoClip load_clip(const ClipDescriptor& desc);

enum class FrameFormat { PpmDirectory, Container };

/// Writes every clip plus `manifest.tsv` under `dir`. Returns the manifest path.
std::filesystem::path write_corpus(const std::filesystem::path& dir, const std::vector<VideoClip>& clips,
                                   FrameFormat format = FrameFormat::PpmDirectory);

/// Binary 8-bit PPM (P6). Pixel values are quantized to k/255.
void write_ppm(const std::filesystem::path& path, const Frame& frame);
Frame read_ppm(const std::filesystem::path& path);

void write_container(const std::filesystem::path& path, const std::vector<Frame>& frames);
std::vector<Frame> read_container(const std::filesystem::path& path);

}  // namespace violet::data
