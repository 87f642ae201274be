// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "violet/core/errors.hpp"
#include "violet/downstream/heads.hpp"
#include "violet/downstream/tasks.hpp"

using namespace violet;
using namespace violet::downstream;

namespace {

// Brute-force rank: sort every video by (score desc, index asc).
double recall_oracle(const Matrix& s, int k) {
  int hits = 0;
  for (int i = 0; i < s.rows(); ++i) {
    std::vector<int> order(s.cols());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (s(i, a) != s(i, b)) return s(i, a) > s(i, b);
      return a < b;
    });
    const int rank = static_cast<int>(std::find(order.begin(), order.end(), i) - order.begin());
    hits += rank < k;
  }
  return static_cast<double>(hits) / s.rows();
}

struct TaskSetup {
  std::vector<data::SyntheticClip> clips;
  text::Vocabulary vocab;
  model::ModelConfig cfg;
  ClipSampling sampling{2, 4};
};

TaskSetup task_setup(int n_clips, bool twins, std::uint64_t seed = 3) {
  TaskSetup s;
  data::SynthConfig sc;
  sc.n_clips = n_clips;
  sc.frames_per_clip = 4;
  sc.resolution = 8;
  sc.patch = 4;
  sc.max_objects = 1;
  sc.seed = seed;
  sc.twins = twins;
  sc.unique_captions = true;
  s.clips = data::generate_synthetic(sc);
  auto corpus = task_vocabulary_corpus();
  s.vocab = text::Vocabulary::build(corpus, 256);

  auto& m = s.cfg;
  m.video.d = 16;
  m.video.depth = 1;
  m.video.heads = 2;
  m.video.window = {2, 2, 2};
  m.video.patch_dim = 4 * 4 * 3;
  m.video.grid_h = 2;
  m.video.grid_w = 2;
  m.video.t_max = 2;
  m.ct.d = 16;
  m.ct.depth = 1;
  m.ct.heads = 2;
  m.ct.l_max = 32;
  m.vocab_size = s.vocab.size();
  m.codebook_size = 8;
  m.feature_dim = 4;
  m.num_answers = 8;
  m.seed = seed;
  return s;
}

}  // namespace

TEST(Retrieval, RecallMatchesBruteForceWithTies) {
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const int n_video = rng.uniform_int(1, 8);
    const int n_text = rng.uniform_int(1, n_video);
    Matrix s(n_text, n_video);
    // Few distinct values so ties are common.
    for (auto& v : s.values()) v = rng.uniform_int(0, 3) * 0.25;
    for (int k = 1; k <= n_video; ++k) ASSERT_DOUBLE_EQ(recall_at_k(s, k), recall_oracle(s, k)) << trial;
  }
}

TEST(Retrieval, RecallInvariantUnderMonotoneMaps) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix s(6, 6);
    for (auto& v : s.values()) v = rng.normal();
    Matrix m = s;
    for (auto& v : m.values()) v = std::exp(3.0 * v) + 7.0;
    for (int k : {1, 3, 6}) EXPECT_DOUBLE_EQ(recall_at_k(s, k), recall_at_k(m, k));
  }
}

TEST(Retrieval, RecallBoundsAndErrors) {
  Matrix s(3, 3, 0.5);  // all tied: only text 0 finds its video at rank 0
  EXPECT_DOUBLE_EQ(recall_at_k(s, 1), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(recall_at_k(s, 3), 1.0);
  EXPECT_THROW(recall_at_k(s, 0), InputError);
  EXPECT_THROW(recall_at_k(s, 4), InputError);
  EXPECT_THROW(recall_at_k(Matrix(4, 3), 1), InputError);
}

TEST(Retrieval, ZeroShotScoresWithMatchingHead) {
  auto s = task_setup(4, false);
  model::VioletModel m(s.cfg);
  const auto ex = retrieval_examples(s.clips, s.vocab, s.sampling);
  const double zs = retrieval_score(m, ex[0].grid, ex[0].text, true);
  const double ft = retrieval_score(m, ex[0].grid, ex[0].text, false);
  // Perturbing the retrieval head leaves zero-shot scores untouched.
  auto& w = m.head(model::Head::T2v).w->value.values();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] += 0.1 * static_cast<double>(i + 1);
  EXPECT_EQ(retrieval_score(m, ex[0].grid, ex[0].text, true), zs);
  EXPECT_NE(retrieval_score(m, ex[0].grid, ex[0].text, false), ft);
  m.init_t2v_from_vtm();
  EXPECT_DOUBLE_EQ(retrieval_score(m, ex[0].grid, ex[0].text, false), zs);
}

TEST(Retrieval, ScoreMatrixMatchesSingleScores) {
  auto s = task_setup(3, false);
  model::VioletModel m(s.cfg);
  const auto ex = retrieval_examples(s.clips, s.vocab, s.sampling);
  std::vector<data::PatchGrid> grids;
  std::vector<text::TextSequence> texts;
  for (const auto& e : ex) {
    grids.push_back(e.grid);
    texts.push_back(e.text);
  }
  const auto sm = score_matrix(m, grids, texts, false);
  for (int i = 0; i < 3; ++i)
    for (int v = 0; v < 3; ++v) EXPECT_NEAR(sm.scores(i, v), retrieval_score(m, grids[v], texts[i], false), 1e-12);
}

TEST(MultipleChoice, TiesPickFirstOption) {
  const double tied[] = {0.3, 0.7, 0.7, 0.1};
  EXPECT_EQ(argmax(tied), 1);
  auto s = task_setup(2, false);
  model::VioletModel m(s.cfg);
  const auto q = text::tokenize_text("which way does the red square move ?", s.vocab);
  const auto opt = text::tokenize_text("left", s.vocab);
  const std::vector<text::TextSequence> same{opt, opt, opt};
  const auto ex = retrieval_examples(s.clips, s.vocab, s.sampling);
  EXPECT_EQ(mc_qa_predict(m, ex[0].grid, q, same), 0);
  EXPECT_THROW(mc_qa_predict(m, ex[0].grid, q, {}), InputError);
}

TEST(MultipleChoice, TwinsShareOptionsWithSwappedAnswers) {
  auto s = task_setup(8, true);
  Rng rng(2);
  const auto ex = mc_direction_examples(s.clips, s.vocab, s.sampling, 2, rng);
  for (std::size_t k = 0; k + 1 < ex.size(); k += 2) {
    EXPECT_EQ(ex[k].text.ids, ex[k + 1].text.ids);
    ASSERT_EQ(ex[k].options.size(), 2u);
    EXPECT_EQ(ex[k].options[0].ids, ex[k + 1].options[0].ids);
    EXPECT_EQ(ex[k].options[1].ids, ex[k + 1].options[1].ids);
    EXPECT_EQ(ex[k].answer + ex[k + 1].answer, 1);
  }
  Rng rng6(2);
  for (const auto& e : mc_direction_examples(s.clips, s.vocab, s.sampling, 6, rng6)) {
    EXPECT_EQ(e.options.size(), 6u);
    EXPECT_GE(e.answer, 0);
  }
  EXPECT_THROW(mc_direction_examples(s.clips, s.vocab, s.sampling, 7, rng), ConfigError);
}

TEST(FillInBlank, BlankPositionErrors) {
  auto s = task_setup(2, false);
  EXPECT_EQ(blank_position(text::tokenize_text("a red [BLANK] moves left", s.vocab)), 2);
  EXPECT_THROW(blank_position(text::tokenize_text("a red square moves left", s.vocab)), InputError);
  EXPECT_THROW(blank_position(text::tokenize_text("a [BLANK] [BLANK] moves left", s.vocab)), InputError);
}

TEST(FillInBlank, BuildersEmitOneBlankAndAnswerableText) {
  auto s = task_setup(6, false);
  Rng rng(9);
  for (const auto& e : fib_examples(s.clips, s.vocab, s.sampling, rng)) {
    EXPECT_NO_THROW(blank_position(e.text));
    EXPECT_TRUE(data::parse_direction(e.answer_text) || data::parse_color(e.answer_text)) << e.answer_text;
  }
}

TEST(FillInBlank, HeadsAreIndependent) {
  auto s = task_setup(2, false);
  model::VioletModel m(s.cfg);
  const auto grid = retrieval_examples(s.clips, s.vocab, s.sampling)[0].grid;
  const auto sentence = text::tokenize_text("a red [BLANK] moves left", s.vocab);
  const auto question = text::tokenize_text("which way does the red square move ?", s.vocab);
  auto eval = [&](bool fib) {
    Tape t(false);
    const auto video = m.encode_video(t, grid);
    return t.value(fib ? fib_logits(t, m, video, sentence) : open_qa_logits(t, m, video, question));
  };
  const Matrix fib0 = eval(true), qa0 = eval(false);
  for (auto& v : m.head(model::Head::Qa).w->value.values()) v += 1.0;
  EXPECT_EQ(eval(true).values(), fib0.values());
  EXPECT_NE(eval(false).values(), qa0.values());
  for (auto& v : m.head(model::Head::Fib).w->value.values()) v += 1.0;
  EXPECT_NE(eval(true).values(), fib0.values());
}

TEST(AnswerSpace, FrequencyThenLexicographic) {
  const std::vector<std::string> answers{"b", "a", "b", "c", "a", "d"};
  const auto two = build_answer_space(answers, 2);
  EXPECT_EQ(two.answers, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(two.id("c"), -1);
  const auto all = build_answer_space(answers, 10);
  EXPECT_EQ(all.answers, (std::vector<std::string>{"a", "b", "c", "d"}));
  EXPECT_THROW(build_answer_space({}, 2), InputError);
  EXPECT_THROW(build_answer_space(answers, 0), ConfigError);
}

TEST(AnswerSpace, PresetSizes) {
  auto size_of = [](std::string_view task) {
    for (const auto& p : kAnswerSpacePresets)
      if (p.task == task) return p.size;
    return -1;
  };
  EXPECT_EQ(size_of("tgif-frame"), 1540);
  EXPECT_EQ(size_of("msrvtt-qa"), 1500);
  EXPECT_EQ(size_of("lsmdc-fib"), 1000);
  EXPECT_EQ(size_of("msvd-qa"), 908);
}

TEST(Finetune, OpenQaOverfitsTinySet) {
  auto s = task_setup(4, false);
  model::VioletModel m(s.cfg);
  Rng rng(4);
  auto train = open_qa_examples(s.clips, s.vocab, s.sampling, rng);
  assign_answers(train, answer_space_for(train, s.cfg.num_answers));
  FinetuneConfig fc;
  fc.steps = 120;
  fc.batch = 4;
  fc.optimizer.lr = 3e-3;
  const auto trace = finetune(m, Task::OpenQa, train, fc, rng);
  EXPECT_LT(trace.loss.back(), trace.loss.front());
  const auto rec = evaluate(m, Task::OpenQa, train);
  ASSERT_EQ(rec.size(), 1u);
  EXPECT_EQ(rec[0].metric, "accuracy");
  EXPECT_DOUBLE_EQ(rec[0].value, 1.0);
}

TEST(Finetune, RetrievalLossDescendsAndReportsRecall) {
  auto s = task_setup(4, false);
  model::VioletModel m(s.cfg);
  m.init_t2v_from_vtm();
  Rng rng(6);
  const auto train = retrieval_examples(s.clips, s.vocab, s.sampling);
  FinetuneConfig fc;
  fc.steps = 80;
  fc.batch = 4;
  fc.optimizer.lr = 3e-3;
  const auto trace = finetune(m, Task::Retrieval, train, fc, rng);
  EXPECT_LT(trace.loss.back(), trace.loss.front());
  const auto rec = evaluate(m, Task::Retrieval, train);
  ASSERT_EQ(rec.size(), 1u);  // R@5 and R@10 exceed the set size
  EXPECT_EQ(rec[0].metric, "R@1");
  EXPECT_THROW(finetune(m, Task::Retrieval, std::span(train).first(1), fc, rng), InputError);
}

TEST(Finetune, ZeroStepsLeavesWeightsAlone) {
  auto s = task_setup(2, false);
  model::VioletModel m(s.cfg);
  const Matrix before = m.head(model::Head::Qa).w->value;
  Rng rng(1);
  FinetuneConfig fc;
  fc.steps = 0;
  EXPECT_TRUE(finetune(m, Task::OpenQa, {}, fc, rng).loss.empty());
  EXPECT_EQ(m.head(model::Head::Qa).w->value.values(), before.values());
}

TEST(Reports, JsonlAndCsvRoundTrip) {
  const std::vector<EvalRecord> recs{{"retrieval", "R@1", 0.25, 8}, {"mc_qa", "accuracy", 0.5, 4}};
  EXPECT_EQ(to_json_line(recs[0]), R"({"metric":"R@1","n":8,"task":"retrieval","value":0.25})");
  const auto dir = std::filesystem::temp_directory_path() / "violet_test_reports";
  std::filesystem::create_directories(dir);
  write_jsonl(dir / "r.jsonl", recs);
  write_csv(dir / "r.csv", recs);
  std::ifstream j(dir / "r.jsonl"), c(dir / "r.csv");
  std::string line;
  int lines = 0;
  while (std::getline(j, line)) ++lines;
  EXPECT_EQ(lines, 2);
  std::getline(c, line);
  EXPECT_EQ(line, "task,metric,value,n");
  std::filesystem::remove_all(dir);
}

TEST(Tasks, ParseNames) {
  for (Task t : {Task::Retrieval, Task::McQa, Task::OpenQa, Task::Fib}) EXPECT_EQ(parse_task(task_name(t)), t);
  EXPECT_THROW(parse_task("captioning"), ConfigError);
}
