// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "violet/downstream/tasks.hpp"
#include "violet/harness/checkpoint.hpp"
#include "violet/harness/config.hpp"

namespace violet::harness {

/// Clips split into a training part and a held-out tail, plus the vocabulary.
/// Everything here is a pure function of the config.
struct Workspace {
  std::vector<data::SyntheticClip> train;
  std::vector<data::SyntheticClip> held_out;
  bool procedural = true;  // false for manifest corpora, which carry no scene labels
  text::Vocabulary vocab;
};

Workspace build_workspace(const ExperimentConfig& cfg);
/// Encoder geometry, codebook and vocabulary sizes filled in from the other sections.
model::ModelConfig resolve_model(const ExperimentConfig& cfg, const text::Vocabulary& vocab);
/// Tokenizer settings with the frame geometry and seed taken from the config.
tokenizer::TokenizerConfig resolve_tokenizer(const ExperimentConfig& cfg);
tokenizer::VisualTokenizer train_tokenizer(const ExperimentConfig& cfg, const Workspace& ws,
                                           tokenizer::TrainTrace* trace = nullptr);

struct TraceRecord {
  std::string stage;
  int step = 0;  // global, counted across stages
  pretrain::LossReport report;
};
std::string to_json_line(const TraceRecord& r);

struct PretrainResult {
  Checkpoint checkpoint;
  std::vector<TraceRecord> trace;
};

/// Runs the stages in order. ConfigError when a visual objective is on and
/// `tok` is null.
PretrainResult run_pretrain(const ExperimentConfig& cfg, const tokenizer::VisualTokenizer* tok);
/// Loads the tokenizer from `tokenizer.path` when the visual objective needs it.
PretrainResult run_pretrain(const ExperimentConfig& cfg);

/// Pretraining examples for a clip list; `noise` corrupts caption tokens.
std::vector<pretrain::PretrainExample> pretrain_examples(const ExperimentConfig& cfg,
                                                         std::span<const data::SyntheticClip> clips,
                                                         const text::Vocabulary& vocab,
                                                         const tokenizer::VisualTokenizer* tok, double noise,
                                                         Rng& rng);

/// Token accuracy of the visual-token head on `examples`, under the config's masking.
double mvm_accuracy(model::VioletModel& m, std::span<const pretrain::PretrainExample> examples,
                    const ExperimentConfig& cfg, std::uint64_t seed);

/// Task items for one split. Throws ConfigError when the corpus cannot
/// supply the task (scene questions on a manifest corpus).
std::vector<downstream::TaskExample> task_examples(const ExperimentConfig& cfg, const Workspace& ws,
                                                   downstream::Task task, bool held_out);

struct FinetuneResult {
  Checkpoint checkpoint;
  downstream::FinetuneTrace trace;
  std::vector<downstream::EvalRecord> train_metrics;
  std::vector<downstream::EvalRecord> held_out_metrics;
};

/// Finetunes from `pretrained` (random init when null). Retrieval copies the
/// matching head into the retrieval head first.
FinetuneResult run_finetune(const ExperimentConfig& cfg, downstream::Task task, const Checkpoint* pretrained);

/// Held-out metrics of a checkpoint; `zero_shot` scores retrieval with the matching head.
std::vector<downstream::EvalRecord> run_eval(const ExperimentConfig& cfg, downstream::Task task,
                                             const Checkpoint& ckpt, bool zero_shot);

/// Rebuilds a model from a checkpoint taken under `cfg`.
std::unique_ptr<model::VioletModel> model_from_checkpoint(const ExperimentConfig& cfg, const Checkpoint& ckpt);

}  // namespace violet::harness
