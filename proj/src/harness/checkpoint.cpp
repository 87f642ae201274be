// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/harness/checkpoint.hpp"

#include "violet/core/binary_io.hpp"
#include "violet/core/errors.hpp"

namespace violet::harness {

namespace {
constexpr std::string_view kMagic = "VIOLETCK";
}

Checkpoint capture(const std::string& config_text, const model::VioletModel& m, const AdamW* opt,
                   std::int64_t step, const text::Vocabulary& vocab) {
  Checkpoint c;
  c.config_text = config_text;
  c.step = step;
  c.vocabulary = vocab.tokens();
  for (const auto& p : m.params()) c.params.push_back({p.name, p.value});
  if (opt != nullptr) {
    c.optimizer_steps = opt->steps();
    c.first_moments = opt->first_moments();
    c.second_moments = opt->second_moments();
  }
  return c;
}

void restore(const Checkpoint& ckpt, model::VioletModel& m, AdamW* opt) {
  if (ckpt.params.size() != m.params().size())
    throw DataError("checkpoint holds " + std::to_string(ckpt.params.size()) + " tensors, model has " +
                    std::to_string(m.params().size()));
  for (const auto& t : ckpt.params) {
    Parameter* p = m.params().find(t.name);
    if (p == nullptr) throw DataError("checkpoint tensor '" + t.name + "' is not a model parameter");
    if (p->value.rows() != t.value.rows() || p->value.cols() != t.value.cols())
      throw DataError("checkpoint tensor '" + t.name + "' has the wrong shape");
    p->value = t.value;
  }
  if (opt != nullptr) {
    opt->set_steps(ckpt.optimizer_steps);
    opt->first_moments() = ckpt.first_moments;
    opt->second_moments() = ckpt.second_moments;
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  BinaryWriter w(path);
  w.magic(kMagic, ckpt.version);
  w.str(ckpt.config_text);
  w.i64(ckpt.step);
  w.strings(ckpt.vocabulary);
  w.u32(static_cast<std::uint32_t>(ckpt.params.size()));
  for (const auto& t : ckpt.params) {
    w.str(t.name);
    w.matrix(t.value);
  }
  w.i64(ckpt.optimizer_steps);
  w.u32(static_cast<std::uint32_t>(ckpt.first_moments.size()));
  for (std::size_t i = 0; i < ckpt.first_moments.size(); ++i) {
    w.matrix(ckpt.first_moments[i]);
    w.matrix(ckpt.second_moments[i]);
  }
  w.close();
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  BinaryReader r(path);
  Checkpoint c;
  c.version = r.magic(kMagic, kCheckpointVersion);
  c.config_text = r.str();
  c.step = r.i64();
  c.vocabulary = r.strings();
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    NamedTensor t;
    t.name = r.str();
    t.value = r.matrix();
    c.params.push_back(std::move(t));
  }
  c.optimizer_steps = r.i64();
  const std::uint32_t moments = r.u32();
  for (std::uint32_t i = 0; i < moments; ++i) {
    c.first_moments.push_back(r.matrix());
    c.second_moments.push_back(r.matrix());
  }
  return c;
}

}  // namespace violet::harness
