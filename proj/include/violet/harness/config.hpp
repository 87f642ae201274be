// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "violet/core/optimizer.hpp"
#include "violet/model/model.hpp"
#include "violet/pretrain/objectives.hpp"
#include "violet/tokenizer/vq.hpp"

namespace violet::harness {

struct DataConfig {
  int clips = 64;
  int frames_per_clip = 12;  // F / T odd keeps the sampled frames of time-reversed twins mirrored
  int resolution = 32;
  int patch = 8;
  int min_objects = 1;
  int max_objects = 2;
  bool twins = true;
  bool unique_captions = true;
  int frames = 4;            // T sampled per clip
  int vocab_size = 256;
  double eval_fraction = 0.25;     // tail of the corpus held out for evaluation
  double pretrain_fraction = 1.0;  // share of the training split used for pretraining
  std::string manifest;            // empty: procedural corpus
};

/// One curriculum phase. `text_noise` replaces each caption word with a
/// random vocabulary entry at that rate, standing in for noisy transcripts.
struct Stage {
  std::string name;
  int steps = 0;
  double text_noise = 0.0;
  bool operator==(const Stage&) const = default;
};

struct FinetuneSettings {
  int steps = 200;
  int batch = 8;
  double lr = 1e-3;
  int mc_options = 2;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  DataConfig data;
  tokenizer::TokenizerConfig tokenizer;
  std::string tokenizer_path;
  model::ModelConfig model;
  pretrain::PretrainConfig pretrain;
  int pretrain_batch = 8;
  AdamWConfig optim{2e-5, 0.9, 0.98, 1e-8, 1e-3, 1.0};
  std::vector<Stage> stages{{"noisy", 100, 0.3}, {"clean", 100, 0.0}};
  FinetuneSettings finetune;
};

/// Desk-scale defaults: 32x32 frames, 8x8 patches, T=4, d=32.
ExperimentConfig default_config();

/// Every key, sorted.
std::vector<std::string> config_keys();
/// Sets one dotted key. Throws ConfigError for unknown keys or bad values.
void set_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);
std::string get_value(const ExperimentConfig& cfg, std::string_view key);

/// Applies `key = value` lines on top of `base`. '#' starts a comment.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = default_config());
ExperimentConfig load_config(const std::filesystem::path& path);
/// Every key with its resolved value, one `key = value` line each.
std::string to_text(const ExperimentConfig& cfg);
void write_resolved_config(const std::filesystem::path& dir, const ExperimentConfig& cfg);

/// Cross-field checks (matching widths, divisibility, stage names).
void validate(const ExperimentConfig& cfg);

std::string format_stages(const std::vector<Stage>& stages);
/// "name:steps:noise,name:steps:noise"
std::vector<Stage> parse_stages(std::string_view text);

}  // namespace violet::harness
