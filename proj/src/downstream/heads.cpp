// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/downstream/heads.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "violet/core/errors.hpp"

namespace violet::downstream {

using model::Head;

int argmax(std::span<const double> values) {
  if (values.empty()) throw InputError("argmax of an empty set");
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

namespace {

Var cls_logits(Tape& t, const model::VioletModel& m, const model::VideoEncoding& video,
               const text::TextSequence& text, Head head) {
  const auto jf = m.fuse(t, video, text.ids, text.valid);
  return m.apply_head(t, fusion::cls_part(t, jf), head);
}

std::vector<double> row_values(const Matrix& m) { return {m.data(), m.data() + m.cols()}; }

}  // namespace

Var retrieval_logit(Tape& t, const model::VioletModel& m, const model::VideoEncoding& video,
                    const text::TextSequence& text, bool zero_shot) {
  return cls_logits(t, m, video, text, zero_shot ? Head::Vtm : Head::T2v);
}

double retrieval_score(const model::VioletModel& m, const data::PatchGrid& grid, const text::TextSequence& text,
                       bool zero_shot) {
  Tape t(false);
  const double z = t.value(retrieval_logit(t, m, m.encode_video(t, grid), text, zero_shot))(0, 0);
  return 1.0 / (1.0 + std::exp(-z));
}

ScoreMatrix score_matrix(const model::VioletModel& m, std::span<const data::PatchGrid> videos,
                         std::span<const text::TextSequence> texts, bool zero_shot) {
  ScoreMatrix out;
  out.scores = Matrix(static_cast<int>(texts.size()), static_cast<int>(videos.size()));
  for (int v = 0; v < static_cast<int>(videos.size()); ++v) {
    Tape enc_tape(false);
    const auto enc = m.encode_video(enc_tape, videos[v]);
    const Matrix feats = enc_tape.value(enc.v);
    const Matrix pos = enc_tape.value(enc.pv);
    for (int i = 0; i < static_cast<int>(texts.size()); ++i) {
      Tape t(false);
      const model::VideoEncoding cached{t.constant(feats), t.constant(pos), enc.frames};
      const double z = t.value(retrieval_logit(t, m, cached, texts[i], zero_shot))(0, 0);
      out.scores(i, v) = 1.0 / (1.0 + std::exp(-z));
    }
  }
  return out;
}

double recall_at_k(const Matrix& scores, int k) {
  const int n_text = scores.rows(), n_video = scores.cols();
  if (k < 1 || k > n_video) throw InputError("recall_at_k: k must lie in [1, n_video]");
  if (n_text > n_video) throw InputError("recall_at_k: every text needs its own video");
  if (n_text == 0) return 0.0;
  int hits = 0;
  for (int i = 0; i < n_text; ++i) {
    const double truth = scores(i, i);
    // Videos ranked ahead of the truth: strictly higher, or equal with a lower index.
    int ahead = 0;
    for (int v = 0; v < n_video; ++v)
      if (scores(i, v) > truth || (scores(i, v) == truth && v < i)) ++ahead;
    hits += ahead < k;
  }
  return static_cast<double>(hits) / n_text;
}

text::TextSequence join_question_answer(const text::TextSequence& question, const text::TextSequence& answer) {
  text::TextSequence out = question;
  if (out.valid.size() != out.ids.size()) out.valid.assign(out.ids.size(), 1);
  out.ids.push_back(text::kSep);
  out.valid.push_back(1);
  out.ids.insert(out.ids.end(), answer.ids.begin(), answer.ids.end());
  if (answer.valid.size() == answer.ids.size())
    out.valid.insert(out.valid.end(), answer.valid.begin(), answer.valid.end());
  else
    out.valid.insert(out.valid.end(), answer.ids.size(), 1);
  return out;
}

Var mc_logits(Tape& t, const model::VioletModel& m, const model::VideoEncoding& video,
              const text::TextSequence& question, std::span<const text::TextSequence> options) {
  if (options.empty()) throw InputError("multiple-choice question without options");
  std::vector<Var> scores;
  for (const auto& option : options)
    scores.push_back(cls_logits(t, m, video, join_question_answer(question, option), Head::Mc));
  return ops::transpose(t, ops::concat_rows(t, scores));
}

int mc_qa_predict(const model::VioletModel& m, const data::PatchGrid& grid, const text::TextSequence& question,
                  std::span<const text::TextSequence> options) {
  Tape t(false);
  const Matrix& z = t.value(mc_logits(t, m, m.encode_video(t, grid), question, options));
  return argmax(std::span<const double>(z.data(), z.size()));
}

Var open_qa_logits(Tape& t, const model::VioletModel& m, const model::VideoEncoding& video,
                   const text::TextSequence& question) {
  return cls_logits(t, m, video, question, Head::Qa);
}

int open_qa_predict(const model::VioletModel& m, const data::PatchGrid& grid, const text::TextSequence& question) {
  Tape t(false);
  return argmax(row_values(t.value(open_qa_logits(t, m, m.encode_video(t, grid), question))));
}

int blank_position(const text::TextSequence& text) {
  int pos = -1;
  for (int i = 0; i < text.size(); ++i)
    if (text.ids[i] == text::kBlank) {
      if (pos >= 0) throw InputError("fill-in-the-blank text has more than one [BLANK]");
      pos = i;
    }
  if (pos < 0) throw InputError("fill-in-the-blank text has no [BLANK]");
  return pos;
}

Var fib_logits(Tape& t, const model::VioletModel& m, const model::VideoEncoding& video,
               const text::TextSequence& text) {
  const int blank = blank_position(text);
  const auto jf = m.fuse(t, video, text.ids, text.valid);
  return m.apply_head(t, ops::gather_rows(t, jf.h, {jf.text_row(blank)}), Head::Fib);
}

int fib_predict(const model::VioletModel& m, const data::PatchGrid& grid, const text::TextSequence& text) {
  Tape t(false);
  return argmax(row_values(t.value(fib_logits(t, m, m.encode_video(t, grid), text))));
}

int AnswerSpace::id(std::string_view answer) const {
  const auto it = index.find(std::string(answer));
  return it == index.end() ? -1 : it->second;
}

AnswerSpace build_answer_space(std::span<const std::string> answers, int size) {
  if (answers.empty()) throw InputError("answer space from an empty answer list");
  if (size < 1) throw ConfigError("answer space size must be positive");
  std::map<std::string, int> counts;
  for (const auto& a : answers) ++counts[a];
  std::vector<std::pair<std::string, int>> ranked(counts.begin(), counts.end());
  // std::map iteration is lexicographic, so a stable sort by count keeps that order on ties.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  AnswerSpace space;
  for (int i = 0; i < std::min<int>(size, static_cast<int>(ranked.size())); ++i) {
    space.index[ranked[i].first] = i;
    space.answers.push_back(ranked[i].first);
  }
  return space;
}

}  // namespace violet::downstream
