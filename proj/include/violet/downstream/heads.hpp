// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "violet/model/model.hpp"
#include "violet/text/vocab.hpp"

namespace violet::downstream {

/// Index of the largest value; ties go to the lowest index.
int argmax(std::span<const double> values);

// ---- Text-to-video retrieval ------------------------------------------------

/// Matching logit on h_c. Zero-shot scoring uses the pretraining matching
/// head verbatim; finetuned scoring uses the retrieval head.
Var retrieval_logit(Tape& t, const model::VioletModel& m, const model::VideoEncoding& video,
                    const text::TextSequence& text, bool zero_shot);
/// sigmoid(retrieval_logit), in (0, 1).
double retrieval_score(const model::VioletModel& m, const data::PatchGrid& grid, const text::TextSequence& text,
                       bool zero_shot);

struct ScoreMatrix {
  Matrix scores;  // n_text x n_video
  std::vector<std::string> text_ids;
  std::vector<std::string> video_ids;
};

/// Scores every text against every video; each video is encoded once.
ScoreMatrix score_matrix(const model::VioletModel& m, std::span<const data::PatchGrid> videos,
                         std::span<const text::TextSequence> texts, bool zero_shot);

/// Fraction of texts i whose video i ranks within the top k of row i.
/// Videos with equal scores rank by lower index. Throws InputError unless
/// 1 <= k <= n_video.
double recall_at_k(const Matrix& scores, int k);

// ---- Multiple-choice QA -----------------------------------------------------

/// question [SEP] answer
text::TextSequence join_question_answer(const text::TextSequence& question, const text::TextSequence& answer);
/// 1 x n_options scores from the scalar choice head on h_c.
Var mc_logits(Tape& t, const model::VioletModel& m, const model::VideoEncoding& video,
              const text::TextSequence& question, std::span<const text::TextSequence> options);
int mc_qa_predict(const model::VioletModel& m, const data::PatchGrid& grid, const text::TextSequence& question,
                  std::span<const text::TextSequence> options);

// ---- Open-ended QA and fill-in-the-blank -----------------------------------

/// 1 x A class logits from h_c.
Var open_qa_logits(Tape& t, const model::VioletModel& m, const model::VideoEncoding& video,
                   const text::TextSequence& question);
int open_qa_predict(const model::VioletModel& m, const data::PatchGrid& grid, const text::TextSequence& question);

/// Position of the single [BLANK]; InputError if there is none or several.
int blank_position(const text::TextSequence& text);
/// 1 x A class logits from the joint feature at [BLANK].
Var fib_logits(Tape& t, const model::VioletModel& m, const model::VideoEncoding& video,
               const text::TextSequence& text);
int fib_predict(const model::VioletModel& m, const data::PatchGrid& grid, const text::TextSequence& text);

struct AnswerSpace {
  std::vector<std::string> answers;
  std::unordered_map<std::string, int> index;

  int size() const noexcept { return static_cast<int>(answers.size()); }
  /// -1 when the answer is outside the space.
  int id(std::string_view answer) const;
};

/// The `size` most frequent answers; equal counts order lexicographically.
AnswerSpace build_answer_space(std::span<const std::string> answers, int size);

struct AnswerSpacePreset {
  std::string_view task;
  int size;
};
/// Answer-space sizes of the full-scale open-ended QA benchmarks.
inline constexpr AnswerSpacePreset kAnswerSpacePresets[] = {
    {"tgif-frame", 1540}, {"msrvtt-qa", 1500}, {"lsmdc-fib", 1000}, {"msvd-qa", 908}};

}  // namespace violet::downstream
