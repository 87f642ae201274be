// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "violet/data/video.hpp"

namespace violet::data {

// Procedural moving-shapes corpus. Every motion has a canonical path plus a
// `reversed` flag; a reversed path visits the same positions in opposite
// order, so a clip and its time-reversed twin differ only in frame order and
// in the direction words of the caption.

enum class ShapeKind { Square, Circle, Triangle, Diamond };
enum class PathKind { Horizontal, Vertical, Orbit };
enum class Direction { Left, Right, Up, Down, Clockwise, Counterclockwise };

inline constexpr int kNumShapes = 4;
inline constexpr int kNumColors = 6;
inline constexpr int kNumDirections = 6;

std::string_view shape_name(ShapeKind s);
std::string_view color_name(int color);
std::string_view direction_name(Direction d);
std::array<std::uint8_t, 3> color_rgb(int color);
Direction opposite(Direction d);
std::optional<ShapeKind> parse_shape(std::string_view word);
std::optional<int> parse_color(std::string_view word);
std::optional<Direction> parse_direction(std::string_view word);

struct MovingShape {
  ShapeKind shape = ShapeKind::Square;
  int color = 0;
  PathKind path = PathKind::Horizontal;
  bool reversed = false;
  double cx = 0.0;      // path centre, pixels
  double cy = 0.0;
  double radius = 0.0;  // half-size of the shape, pixels
  double extent = 0.0;  // travel length (linear paths) or orbit radius, pixels
  double phase = 0.0;   // orbit start angle, radians

  Direction direction() const;
};

/// Subject of one caption clause: "a {color} {shape} moves {direction}".
struct CaptionClause {
  int color = 0;
  ShapeKind shape = ShapeKind::Square;
  Direction direction = Direction::Left;
  bool operator==(const CaptionClause&) const = default;
};

std::string make_caption(const std::vector<CaptionClause>& clauses);
/// Inverse of make_caption; nullopt for text outside the template grammar.
std::optional<std::vector<CaptionClause>> parse_caption(std::string_view caption);

struct SyntheticClip {
  VideoClip clip;
  std::vector<MovingShape> objects;

  std::vector<CaptionClause> clauses() const;
};

struct SynthConfig {
  int n_clips = 8;
  int frames_per_clip = 16;
  int resolution = 64;
  int patch = 8;  // resolution must be divisible by it
  int min_objects = 1;
  int max_objects = 3;
  std::uint64_t seed = 0;
  /// Emit clips as (clip, time-reversed twin) pairs: clip 2k + 1 reverses 2k.
  bool twins = false;
  /// Reject clips whose caption (or whose twin's caption) was already emitted.
  bool unique_captions = false;
};

Frame render_frame(const std::vector<MovingShape>& objects, int frame, int num_frames, int resolution);

std::vector<SyntheticClip> generate_synthetic(const SynthConfig& cfg);

/// Convenience form returning plain clips with the default object counts.
std::vector<VideoClip> generate_synthetic_corpus(int n_clips, int frames_per_clip, int resolution,
                                                 std::uint64_t seed, int patch = 8);

/// The same objects on reversed paths, re-rendered and re-captioned.
SyntheticClip time_reversed(const SyntheticClip& clip, int num_frames, int resolution);

}  // namespace violet::data
