// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <limits>

#include "violet/core/errors.hpp"
#include "violet/core/kernels.hpp"
#include "violet/data/synthetic.hpp"
#include "violet/tokenizer/vq.hpp"

using namespace violet;
using namespace violet::tokenizer;

namespace {

TokenizerConfig small_config(int K, int steps) {
  TokenizerConfig cfg;
  cfg.K = K;
  cfg.patch = 8;
  cfg.resolution = 32;
  cfg.hidden = 32;
  cfg.code_dim = 8;
  cfg.steps = steps;
  cfg.batch = 64;
  cfg.seed = 3;
  return cfg;
}

std::vector<data::Frame> corpus_frames(int clips, std::uint64_t seed) {
  std::vector<data::Frame> out;
  for (const auto& c : data::generate_synthetic_corpus(clips, 4, 32, seed))
    for (const auto& f : c.frames) out.push_back(f);
  return out;
}

}  // namespace

TEST(Tokenizer, UniformCorpusIsRepresentedExactly) {
  std::vector<data::Frame> frames(4, data::Frame(32, 32, 0.4));
  for (auto& v : frames[2].pixels) v = 0.8;
  const auto tok = VisualTokenizer::train(frames, small_config(2, 300));
  EXPECT_LT(tok.reconstruction_mse(frames), 1e-3);
}

TEST(Tokenizer, SeededTrainingIsDeterministic) {
  const auto frames = corpus_frames(4, 1);
  const auto a = VisualTokenizer::train(frames, small_config(16, 40));
  const auto b = VisualTokenizer::train(frames, small_config(16, 40));
  EXPECT_EQ(a.codebook(), b.codebook());
  EXPECT_EQ(a.tokenize(frames[0]), b.tokenize(frames[0]));
}

TEST(Tokenizer, ReconstructionLossDecreases) {
  const auto frames = corpus_frames(12, 2);
  TrainTrace trace;
  const auto tok = VisualTokenizer::train(frames, small_config(32, 400), &trace);
  ASSERT_EQ(trace.reconstruction_mse.size(), 400u);
  auto window_mean = [&](int from) {
    double s = 0;
    for (int i = from; i < from + 20; ++i) s += trace.reconstruction_mse[i];
    return s / 20;
  };
  EXPECT_LT(window_mean(380), window_mean(0));
  EXPECT_LT(window_mean(380), 0.5 * window_mean(0));
}

TEST(Tokenizer, GridShapeIdsInRangeAndDeterministic) {
  const auto frames = corpus_frames(2, 3);
  const auto tok = VisualTokenizer::train(frames, small_config(16, 20));
  const TokenGrid g = tok.tokenize(frames[0]);
  EXPECT_EQ(g.frames, 1);
  EXPECT_EQ(g.rows, 4);
  EXPECT_EQ(g.cols, 4);
  for (int id : g.ids) {
    EXPECT_GE(id, 0);
    EXPECT_LT(id, 16);
  }
  EXPECT_EQ(tok.tokenize(frames[0]), g);
  EXPECT_EQ(tok.reconstruct(g), tok.reconstruct(g));
}

TEST(Tokenizer, ZeroFrameMapsToOneCode) {
  const auto tok = VisualTokenizer::train(corpus_frames(2, 4), small_config(16, 20));
  const TokenGrid g = tok.tokenize(data::Frame(32, 32, 0.0));
  for (int id : g.ids) EXPECT_EQ(id, g.ids[0]);
}

TEST(Tokenizer, NearestEntryByBruteForce) {
  const auto frames = corpus_frames(4, 5);
  const auto tok = VisualTokenizer::train(frames, small_config(32, 60));
  const Matrix z = tok.encode(data::patchify(frames, 8).patches);
  const Matrix& cb = tok.codebook();
  for (int r = 0; r < z.rows(); ++r) {
    const int id = tok.nearest(z.data() + r * z.cols());
    double best = std::numeric_limits<double>::infinity();
    int arg = -1;
    for (int k = 0; k < cb.rows(); ++k) {
      double d = 0;
      for (int c = 0; c < cb.cols(); ++c) d += (z(r, c) - cb(k, c)) * (z(r, c) - cb(k, c));
      if (d < best) {
        best = d;
        arg = k;
      }
    }
    EXPECT_EQ(id, arg);
  }
}

TEST(Tokenizer, TieGoesToLowestIndex) {
  VisualTokenizer tok(small_config(4, 0));
  Matrix& cb = tok.parameters().at("codebook").value;
  cb.fill(0.0);
  const std::vector<double> z(8, 0.0);
  EXPECT_EQ(tok.nearest(z.data()), 0);
}

TEST(Tokenizer, InputErrors) {
  VisualTokenizer tok(small_config(4, 0));
  EXPECT_THROW(tok.tokenize(data::Frame(16, 16)), InputError);
  TokenGrid g{1, 4, 4, std::vector<int>(16, 0)};
  g.ids[5] = 4;
  EXPECT_THROW(tok.reconstruct(g), InputError);
  EXPECT_THROW(VisualTokenizer(small_config(1, 0)), ConfigError);
}

TEST(Tokenizer, ReconstructionClampedToUnitRange) {
  VisualTokenizer tok(small_config(4, 0));
  for (auto& v : tok.parameters().at("dec2.b").value.values()) v = 5.0;
  const auto f = tok.reconstruct(TokenGrid{1, 4, 4, std::vector<int>(16, 1)});
  for (double v : f.pixels) EXPECT_EQ(v, 1.0);
}

TEST(Tokenizer, CheckpointRoundTrip) {
  const auto frames = corpus_frames(2, 6);
  const auto tok = VisualTokenizer::train(frames, small_config(8, 10));
  const auto path = std::filesystem::temp_directory_path() / "violet_tok_test.bin";
  tok.save(path);
  const auto back = VisualTokenizer::load(path);
  EXPECT_EQ(back.codebook(), tok.codebook());
  EXPECT_EQ(back.tokenize(frames[1]), tok.tokenize(frames[1]));
  EXPECT_EQ(back.config().K, 8);
}
