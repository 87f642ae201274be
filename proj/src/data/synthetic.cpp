// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

#include "violet/core/errors.hpp"

namespace violet::data {

namespace {

constexpr std::string_view kShapeNames[kNumShapes] = {"square", "circle", "triangle", "diamond"};
constexpr std::string_view kColorNames[kNumColors] = {"red", "green", "blue", "yellow", "purple", "orange"};
constexpr std::array<std::uint8_t, 3> kPalette[kNumColors] = {
    {{220, 40, 40}}, {{40, 200, 60}}, {{50, 90, 230}}, {{230, 210, 40}}, {{160, 60, 200}}, {{240, 140, 30}}};
constexpr std::string_view kDirectionNames[kNumDirections] = {"left", "right", "up", "down",
                                                             "clockwise", "counterclockwise"};

bool inside(ShapeKind s, double dx, double dy, double r) {
  switch (s) {
    case ShapeKind::Square:
      return std::abs(dx) <= r && std::abs(dy) <= r;
    case ShapeKind::Circle:
      return dx * dx + dy * dy <= r * r;
    case ShapeKind::Diamond:
      return std::abs(dx) + std::abs(dy) <= r;
    case ShapeKind::Triangle:  // apex up, base 2r wide
      return dy >= -r && dy <= r && std::abs(dx) <= 0.5 * (dy + r);
  }
  return false;
}

void position(const MovingShape& m, int frame, int num_frames, double& x, double& y) {
  const int n = m.reversed ? num_frames - 1 - frame : frame;
  const double s = num_frames > 1 ? static_cast<double>(n) / (num_frames - 1) : 0.0;
  switch (m.path) {
    case PathKind::Horizontal:
      x = m.cx + m.extent * (s - 0.5);
      y = m.cy;
      break;
    case PathKind::Vertical:
      x = m.cx;
      y = m.cy + m.extent * (s - 0.5);
      break;
    case PathKind::Orbit: {
      // image y grows downwards, so increasing angle turns clockwise on screen
      const double a = m.phase + s * 1.5 * std::numbers::pi;
      x = m.cx + m.extent * std::cos(a);
      y = m.cy + m.extent * std::sin(a);
      break;
    }
  }
}

MovingShape random_object(Rng& rng, int res, ShapeKind shape, int color) {
  MovingShape m;
  m.shape = shape;
  m.color = color;
  m.path = static_cast<PathKind>(rng.uniform_int(0, 2));
  m.reversed = rng.bernoulli(0.5);
  m.radius = res * rng.uniform(0.09, 0.14);
  const double r = m.radius;
  switch (m.path) {
    case PathKind::Horizontal:
      m.extent = res * rng.uniform(0.4, 0.6);
      m.cx = rng.uniform(r + m.extent / 2, res - r - m.extent / 2);
      m.cy = rng.uniform(r, res - r);
      break;
    case PathKind::Vertical:
      m.extent = res * rng.uniform(0.4, 0.6);
      m.cx = rng.uniform(r, res - r);
      m.cy = rng.uniform(r + m.extent / 2, res - r - m.extent / 2);
      break;
    case PathKind::Orbit:
      m.extent = res * rng.uniform(0.18, 0.25);
      m.cx = rng.uniform(m.extent + r, res - m.extent - r);
      m.cy = rng.uniform(m.extent + r, res - m.extent - r);
      m.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      break;
  }
  return m;
}

SyntheticClip assemble(std::vector<MovingShape> objects, int num_frames, int res, std::string id) {
  SyntheticClip out;
  out.objects = std::move(objects);
  out.clip.clip_id = std::move(id);
  out.clip.caption = make_caption(out.clauses());
  out.clip.frames.reserve(num_frames);
  for (int f = 0; f < num_frames; ++f) out.clip.frames.push_back(render_frame(out.objects, f, num_frames, res));
  return out;
}

std::string clip_id(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "synth-%05d", i);
  return buf;
}

}  // namespace

std::string_view shape_name(ShapeKind s) { return kShapeNames[static_cast<int>(s)]; }
std::string_view color_name(int color) { return kColorNames[color]; }
std::string_view direction_name(Direction d) { return kDirectionNames[static_cast<int>(d)]; }
std::array<std::uint8_t, 3> color_rgb(int color) { return kPalette[color]; }

Direction opposite(Direction d) {
  switch (d) {
    case Direction::Left: return Direction::Right;
    case Direction::Right: return Direction::Left;
    case Direction::Up: return Direction::Down;
    case Direction::Down: return Direction::Up;
    case Direction::Clockwise: return Direction::Counterclockwise;
    case Direction::Counterclockwise: return Direction::Clockwise;
  }
  return d;
}

std::optional<ShapeKind> parse_shape(std::string_view word) {
  for (int i = 0; i < kNumShapes; ++i)
    if (kShapeNames[i] == word) return static_cast<ShapeKind>(i);
  return std::nullopt;
}

std::optional<int> parse_color(std::string_view word) {
  for (int i = 0; i < kNumColors; ++i)
    if (kColorNames[i] == word) return i;
  return std::nullopt;
}

std::optional<Direction> parse_direction(std::string_view word) {
  for (int i = 0; i < kNumDirections; ++i)
    if (kDirectionNames[i] == word) return static_cast<Direction>(i);
  return std::nullopt;
}

Direction MovingShape::direction() const {
  switch (path) {
    case PathKind::Horizontal: return reversed ? Direction::Left : Direction::Right;
    case PathKind::Vertical: return reversed ? Direction::Up : Direction::Down;
    case PathKind::Orbit: return reversed ? Direction::Counterclockwise : Direction::Clockwise;
  }
  return Direction::Left;
}

std::string make_caption(const std::vector<CaptionClause>& clauses) {
  std::string out;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (i > 0) out += " and ";
    out += "a ";
    out += color_name(clauses[i].color);
    out += ' ';
    out += shape_name(clauses[i].shape);
    out += " moves ";
    out += direction_name(clauses[i].direction);
  }
  return out;
}

std::optional<std::vector<CaptionClause>> parse_caption(std::string_view caption) {
  std::istringstream in{std::string(caption)};
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  std::vector<CaptionClause> out;
  std::size_t i = 0;
  while (true) {
    if (i + 5 > words.size() || words[i] != "a" || words[i + 3] != "moves") return std::nullopt;
    const auto color = parse_color(words[i + 1]);
    const auto shape = parse_shape(words[i + 2]);
    const auto dir = parse_direction(words[i + 4]);
    if (!color || !shape || !dir) return std::nullopt;
    out.push_back({*color, *shape, *dir});
    i += 5;
    if (i == words.size()) break;
    if (words[i] != "and") return std::nullopt;
    ++i;
  }
  return out;
}

std::vector<CaptionClause> SyntheticClip::clauses() const {
  std::vector<CaptionClause> out;
  for (const auto& m : objects) out.push_back({m.color, m.shape, m.direction()});
  return out;
}

Frame render_frame(const std::vector<MovingShape>& objects, int frame, int num_frames, int resolution) {
  Frame f(resolution, resolution, 0.0);
  for (const auto& m : objects) {
    double x = 0, y = 0;
    position(m, frame, num_frames, x, y);
    const auto rgb = color_rgb(m.color);
    const int y0 = std::max(0, static_cast<int>(std::floor(y - m.radius - 1)));
    const int y1 = std::min(resolution - 1, static_cast<int>(std::ceil(y + m.radius + 1)));
    const int x0 = std::max(0, static_cast<int>(std::floor(x - m.radius - 1)));
    const int x1 = std::min(resolution - 1, static_cast<int>(std::ceil(x + m.radius + 1)));
    for (int py = y0; py <= y1; ++py) {
      for (int px = x0; px <= x1; ++px) {
        if (!inside(m.shape, px + 0.5 - x, py + 0.5 - y, m.radius)) continue;
        for (int c = 0; c < 3; ++c) f.at(py, px, c) = rgb[c] / 255.0;
      }
    }
  }
  return f;
}

std::vector<SyntheticClip> generate_synthetic(const SynthConfig& cfg) {
  if (cfg.resolution < 8 || cfg.patch < 1 || cfg.resolution % cfg.patch != 0) {
    throw ConfigError("synthetic corpus: resolution " + std::to_string(cfg.resolution) +
                      " must be >= 8 and divisible by patch " + std::to_string(cfg.patch));
  }
  if (cfg.n_clips < 1) throw ConfigError("synthetic corpus: n_clips must be >= 1");
  if (cfg.frames_per_clip < 1) throw ConfigError("synthetic corpus: frames_per_clip must be >= 1");
  if (cfg.min_objects < 1 || cfg.max_objects < cfg.min_objects ||
      cfg.max_objects > kNumShapes * kNumColors) {
    throw ConfigError("synthetic corpus: invalid object count range");
  }
  std::vector<SyntheticClip> out;
  std::set<std::string> seen;
  const int stride = cfg.twins ? 2 : 1;
  for (int i = 0; static_cast<int>(out.size()) < cfg.n_clips; i += stride) {
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000) throw ConfigError("synthetic corpus: cannot draw enough unique captions");
      Rng rng(derive_seed(cfg.seed, "clip/" + std::to_string(i) + "/" + std::to_string(attempt)));
      const int n_obj = rng.uniform_int(cfg.min_objects, cfg.max_objects);
      std::vector<MovingShape> objects;
      std::set<std::pair<int, int>> used;
      while (static_cast<int>(objects.size()) < n_obj) {
        const auto shape = static_cast<ShapeKind>(rng.uniform_int(0, kNumShapes - 1));
        const int color = rng.uniform_int(0, kNumColors - 1);
        if (!used.insert({color, static_cast<int>(shape)}).second) continue;
        objects.push_back(random_object(rng, cfg.resolution, shape, color));
      }
      SyntheticClip clip = assemble(std::move(objects), cfg.frames_per_clip, cfg.resolution, clip_id(i));
      if (cfg.unique_captions) {
        std::string twin_caption;
        if (cfg.twins) {
          auto cl = clip.clauses();
          for (auto& c : cl) c.direction = opposite(c.direction);
          twin_caption = make_caption(cl);
        }
        if (seen.count(clip.clip.caption) || (cfg.twins && seen.count(twin_caption))) continue;
        seen.insert(clip.clip.caption);
        if (cfg.twins) seen.insert(twin_caption);
      }
      if (cfg.twins && static_cast<int>(out.size()) + 1 < cfg.n_clips) {
        SyntheticClip twin = time_reversed(clip, cfg.frames_per_clip, cfg.resolution);
        twin.clip.clip_id = clip_id(i + 1);
        out.push_back(std::move(clip));
        out.push_back(std::move(twin));
      } else {
        out.push_back(std::move(clip));
      }
      break;
    }
  }
  return out;
}

std::vector<VideoClip> generate_synthetic_corpus(int n_clips, int frames_per_clip, int resolution,
                                                 std::uint64_t seed, int patch) {
  SynthConfig cfg;
  cfg.n_clips = n_clips;
  cfg.frames_per_clip = frames_per_clip;
  cfg.resolution = resolution;
  cfg.patch = patch;
  cfg.seed = seed;
  std::vector<VideoClip> out;
  for (auto& c : generate_synthetic(cfg)) out.push_back(std::move(c.clip));
  return out;
}

SyntheticClip time_reversed(const SyntheticClip& clip, int num_frames, int resolution) {
  auto objects = clip.objects;
  for (auto& m : objects) m.reversed = !m.reversed;
  return assemble(std::move(objects), num_frames, resolution, clip.clip.clip_id + "-rev");
}

}  // namespace violet::data
