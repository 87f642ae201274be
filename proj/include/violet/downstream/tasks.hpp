// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "violet/core/optimizer.hpp"
#include "violet/data/synthetic.hpp"
#include "violet/downstream/heads.hpp"

namespace violet::downstream {

enum class Task { Retrieval, McQa, OpenQa, Fib };
Task parse_task(std::string_view name);
std::string_view task_name(Task t);

/// One labelled item. `text` is the caption (retrieval), the question (QA)
/// or the sentence holding [BLANK]. `answer` is an option index (MC) or an
/// answer class (open QA, FiB); -1 when the answer is outside the space.
struct TaskExample {
  std::string clip_id;
  data::PatchGrid grid;
  text::TextSequence text;
  std::vector<text::TextSequence> options;
  std::string answer_text;
  int answer = -1;
};

/// Clip geometry shared by every builder.
struct ClipSampling {
  int frames = 4;  // T sampled per clip
  int patch = 8;
};

data::PatchGrid clip_grid(const data::VideoClip& clip, const ClipSampling& s);

/// Question texts produced by the builders, for vocabulary construction.
std::vector<std::string> task_vocabulary_corpus();

std::vector<TaskExample> retrieval_examples(std::span<const data::SyntheticClip> clips, const text::Vocabulary& vocab,
                                            const ClipSampling& s);
/// "which way does the {color} {shape} move ?" with `n_options` direction
/// words (2 to 6). The true direction and its opposite are always present;
/// with two options they appear in canonical order, so a clip and its
/// time-reversed twin get identical option lists.
std::vector<TaskExample> mc_direction_examples(std::span<const data::SyntheticClip> clips,
                                               const text::Vocabulary& vocab, const ClipSampling& s, int n_options,
                                               Rng& rng);
/// Mixed colour and direction questions with one-word answers.
std::vector<TaskExample> open_qa_examples(std::span<const data::SyntheticClip> clips, const text::Vocabulary& vocab,
                                          const ClipSampling& s, Rng& rng);
/// Captions with the direction or colour word replaced by [BLANK].
std::vector<TaskExample> fib_examples(std::span<const data::SyntheticClip> clips, const text::Vocabulary& vocab,
                                      const ClipSampling& s, Rng& rng);

/// Sets `answer` from `answer_text` for open QA and FiB items.
void assign_answers(std::vector<TaskExample>& examples, const AnswerSpace& space);
AnswerSpace answer_space_for(std::span<const TaskExample> train, int size);

/// Training loss for one item. Retrieval pairs the clip with its caption and
/// with `negative`'s caption (required for retrieval, ignored otherwise).
Var task_loss(Tape& t, const model::VioletModel& m, Task task, const TaskExample& ex,
              const TaskExample* negative);

struct FinetuneConfig {
  int steps = 200;
  int batch = 8;
  int group = 1;  // items shuffle in blocks of this size; 2 keeps twin pairs in one batch
  AdamWConfig optimizer{1e-3, 0.9, 0.98, 1e-8, 1e-3, 1.0};
};

struct FinetuneTrace {
  std::vector<double> loss;
};

/// Minibatch training on `train`. Batches are drawn by shuffling and, for
/// retrieval, each item's negative is a uniformly drawn other batch member.
FinetuneTrace finetune(model::VioletModel& m, Task task, std::span<const TaskExample> train,
                       const FinetuneConfig& cfg, Rng& rng);

struct EvalRecord {
  std::string task;
  std::string metric;
  double value = 0.0;
  int n = 0;
};

/// Retrieval: R@1, R@5, R@10 (k capped at the set size). QA and FiB: accuracy.
std::vector<EvalRecord> evaluate(const model::VioletModel& m, Task task, std::span<const TaskExample> examples,
                                 bool zero_shot = false);

std::string to_json_line(const EvalRecord& r);
void write_jsonl(const std::filesystem::path& path, std::span<const EvalRecord> records);
void write_csv(const std::filesystem::path& path, std::span<const EvalRecord> records);

}  // namespace violet::downstream
