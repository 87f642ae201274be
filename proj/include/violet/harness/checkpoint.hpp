// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "violet/core/optimizer.hpp"
#include "violet/model/model.hpp"
#include "violet/text/vocab.hpp"

namespace violet::harness {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Matrix value;
  bool operator==(const NamedTensor&) const = default;
};

/// Model weights, optimizer moments, vocabulary and the resolved config text.
struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  std::string config_text;
  std::int64_t step = 0;
  std::vector<std::string> vocabulary;
  std::vector<NamedTensor> params;
  std::int64_t optimizer_steps = 0;
  std::vector<Matrix> first_moments;
  std::vector<Matrix> second_moments;

  bool operator==(const Checkpoint&) const = default;
};

Checkpoint capture(const std::string& config_text, const model::VioletModel& m, const AdamW* opt,
                   std::int64_t step, const text::Vocabulary& vocab);
/// Copies weights into `m` (names and shapes must match) and, when `opt` is
/// given, the optimizer moments.
void restore(const Checkpoint& ckpt, model::VioletModel& m, AdamW* opt = nullptr);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
/// DataError on a wrong magic, a newer version or a truncated file.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace violet::harness
