// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance gate: one PASS/FAIL line per criterion. Arguments select
// criteria by number (default: all). Exit status is nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fixtures.hpp"
#include "grad_check.hpp"
#include "violet/downstream/heads.hpp"
#include "violet/harness/ablation.hpp"
#include "violet/pretrain/masking.hpp"
#include "violet/pretrain/objectives.hpp"

using namespace violet;
using namespace violet::harness;
using downstream::Task;
using pretrain::MaskStrategy;

namespace {

// Budgets for the ablation criteria. Every arm of an axis gets the same ones.
constexpr int kAblationClips = 144;
constexpr int kTemporalFinetuneSteps = 1500;
constexpr int kPretrainClips = 144;
constexpr int kPretrainStageSteps = 150;
constexpr int kRetrievalFinetuneSteps = 600;
const std::vector<std::uint64_t> kSeeds{0, 1, 2};

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---- shared oracles -------------------------------------------------------------

// -log softmax(z)[y] in plain arithmetic.
double cross_entropy(const std::vector<double>& z, int y) {
  double m = z[0];
  for (double v : z) m = std::max(m, v);
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return std::log(s) + m - z[y];
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

bool rel_close(double got, double want, double tol) { return std::abs(got - want) <= tol * std::abs(want); }

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
  Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
  return m;
}

double scalar(Tape& t, Var v) { return t.value(v)(0, 0); }

int flat_count(const std::vector<std::vector<int>>& mask) {
  int n = 0;
  for (const auto& f : mask) n += static_cast<int>(f.size());
  return n;
}

/// Top ceil(rate * |eligible|) indices by descending score, lower index first on ties.
std::vector<int> top_k_oracle(const std::vector<double>& scores, const std::vector<char>& eligible, double rate) {
  std::vector<int> pool;
  for (int i = 0; i < static_cast<int>(scores.size()); ++i)
    if (eligible.empty() || eligible[i]) pool.push_back(i);
  const int k = static_cast<int>(std::ceil(rate * static_cast<double>(pool.size()) - 1e-9));
  std::sort(pool.begin(), pool.end(), [&](int a, int b) { return scores[a] != scores[b] ? scores[a] > scores[b] : a < b; });
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

// ---- 1. loss oracles --------------------------------------------------------------

Outcome loss_oracles() {
  constexpr double tol = 1e-6;
  Tape t(false);
  std::vector<std::string> bad;
  auto expect = [&](const char* what, double got, double want) {
    if (!rel_close(got, want, tol)) bad.push_back(fmt::format("{} got {:.9g} want {:.9g}", what, got, want));
  };

  // MLM: mean cross-entropy over masked rows.
  const std::vector<std::vector<double>> mlm_rows{{0.4, -1.1, 2.0, 0.3}, {-0.2, 0.9, 0.1, -1.5}};
  const std::vector<int> mlm_targets{3, 1};
  expect("mlm hand", scalar(t, pretrain::mlm_loss(t, t.constant(rows_to_matrix(mlm_rows)), mlm_targets)),
         (cross_entropy(mlm_rows[0], 3) + cross_entropy(mlm_rows[1], 1)) / 2.0);
  const std::vector<std::vector<double>> one{{1.0, 2.0, 3.0}};
  expect("mlm single", scalar(t, pretrain::mlm_loss(t, t.constant(rows_to_matrix(one)), std::vector<int>{0})),
         cross_entropy(one[0], 0));
  const int vocab = default_config().data.vocab_size;
  expect("mlm uniform", scalar(t, pretrain::mlm_loss(t, t.constant(Matrix(4, vocab, 0.25)), std::vector<int>{6, 7, 8, 200})),
         std::log(static_cast<double>(vocab)));

  // VTM: binary cross-entropy of one matched and one mismatched pair.
  for (const auto [p, n] : {std::pair{0.7, -0.4}, std::pair{-1.3, 2.2}}) {
    const double want = -std::log(sigmoid(p)) - std::log(1.0 - sigmoid(n));
    expect("vtm hand", scalar(t, pretrain::vtm_loss(t, t.constant(Matrix(1, 1, p)), t.constant(Matrix(1, 1, n)))), want);
  }
  expect("vtm uniform", scalar(t, pretrain::vtm_loss(t, t.constant(Matrix(1, 1, 0.0)), t.constant(Matrix(1, 1, 0.0)))),
         2.0 * std::log(2.0));

  // MVM: per-frame mean cross-entropy, summed over frames.
  const std::vector<std::vector<double>> mvm_rows{{0.5, -0.5, 1.5}, {2.0, 0.0, -1.0}, {0.3, 0.3, 0.9}, {-2.0, 1.0, 0.0}};
  const std::vector<int> frames{0, 0, 0, 1}, targets{2, 1, 0, 1};
  const double want = (cross_entropy(mvm_rows[0], 2) + cross_entropy(mvm_rows[1], 1) + cross_entropy(mvm_rows[2], 0)) / 3.0 +
                      cross_entropy(mvm_rows[3], 1);
  expect("mvm hand", scalar(t, pretrain::mvm_loss(t, t.constant(rows_to_matrix(mvm_rows)), frames, targets).loss), want);
  const int K = default_config().tokenizer.K;
  expect("mvm uniform",
         scalar(t, pretrain::mvm_loss(t, t.constant(Matrix(3, K, -0.6)), std::vector<int>{0, 0, 0}, std::vector<int>{1, 5, 9}).loss),
         std::log(static_cast<double>(K)));

  if (!bad.empty()) return {false, bad.front()};
  return {true, fmt::format("MLM, VTM and MVM hand cases within {:g}; uniform cases give ln {}, 2 ln 2, ln {}", tol, vocab, K)};
}

// ---- 2. gradient check -------------------------------------------------------------

Outcome gradient_check() {
  auto s = testing::micro_setup(3, 2, 11);
  for (auto& ex : s.examples) ex.text = text::pad_to(ex.text, 4);
  model::VioletModel m(s.cfg);
  // Move norms and biases off their init so no term sits at a symmetric point.
  for (auto& p : m.params())
    if (p.name.find("ln") != std::string::npos || p.name.ends_with(".b"))
      for (auto& e : p.value.values()) e += 0.05;
  pretrain::PretrainConfig cfg;
  Rng rng(3);
  std::vector<pretrain::ExamplePlan> plans;
  for (int i = 0; i < 3; ++i) plans.push_back(pretrain::plan_example(m, s.examples, i, cfg, rng));
  auto fn = [&](Tape& t) {
    pretrain::LossReport r;
    Var total = pretrain::example_loss(t, m, s.examples, 0, plans[0], cfg, r);
    for (int i = 1; i < 3; ++i) total = ops::add(t, total, pretrain::example_loss(t, m, s.examples, i, plans[i], cfg, r));
    return total;
  };
  double worst = 0.0;
  std::string worst_name;
  int tensors = 0, entries = 0;
  for (const auto& r : testing::check_gradients(m.params(), fn, 64)) {
    ++tensors;
    entries += r.checked;
    if (r.rel_error > worst) {
      worst = r.rel_error;
      worst_name = r.name;
    }
  }
  return {worst < 1e-4, fmt::format("{} tensors, {} entries; worst relative error {:.2e} ({})", tensors, entries, worst,
                                    worst_name.empty() ? "-" : worst_name)};
}

// ---- 3. masking invariants -------------------------------------------------------------

Outcome masking_invariants() {
  constexpr double rate = 0.15;
  constexpr int draws = 1000;
  Rng rng(20);
  int random_bad = 0, text_bad = 0, bm_low = 0, bm_high = 0, bm_decomp = 0, am_bad = 0, bm_empty = 0;
  for (int d = 0; d < draws; ++d) {
    const int T = rng.uniform_int(1, 4), H = rng.uniform_int(1, 7), W = rng.uniform_int(1, 7);
    const int n = T * H * W;
    const int budget = static_cast<int>(std::ceil(rate * n - 1e-9));

    random_bad += flat_count(pretrain::random_video_mask(T, H, W, rate, rng)) != budget;

    // Text: random lengths with reserved tokens and padding mixed in.
    text::TextSequence seq;
    const int L = rng.uniform_int(2, 24);
    std::vector<char> eligible(L, 0);
    for (int i = 0; i < L; ++i) {
      const bool reserved = i == 0 || rng.uniform() < 0.15;
      const bool pad = !reserved && rng.uniform() < 0.1;
      seq.ids.push_back(reserved ? text::kSep : rng.uniform_int(text::kNumReserved, 60));
      seq.valid.push_back(pad ? 0 : 1);
      eligible[i] = !reserved && !pad;
    }
    const int l_eff = static_cast<int>(std::count(eligible.begin(), eligible.end(), 1));
    const auto picked = pretrain::random_text_positions(seq, rate, rng);
    const std::set<int> distinct(picked.begin(), picked.end());
    bool ok = static_cast<int>(picked.size()) == static_cast<int>(std::ceil(rate * l_eff - 1e-9)) &&
              distinct.size() == picked.size();
    for (int p : picked) ok = ok && eligible[p];
    text_bad += !ok;

    // Blockwise: stopping rule, upper bound and box decomposition.
    std::vector<pretrain::Box> boxes;
    const auto bm = pretrain::blockwise_mask(T, H, W, rate, rng, {}, &boxes);
    const int vmax = std::min(4, H) * std::min(4, W) * T;
    const double f = static_cast<double>(flat_count(bm)) / n;
    bm_low += !(f > rate);
    // With a single-patch maximum block the interval (rate, rate] is empty.
    if (vmax == 1)
      ++bm_empty;
    else
      bm_high += f > rate + static_cast<double>(vmax - 1) / n + 1e-12;
    std::set<int> rebuilt, got;
    for (const auto& b : boxes)
      for (int t = b.t; t < b.t + b.frames; ++t)
        for (int i = b.i; i < b.i + b.rows; ++i)
          for (int j = b.j; j < b.j + b.cols; ++j) rebuilt.insert((t * H + i) * W + j);
    for (int t = 0; t < T; ++t)
      for (int s : bm[t]) got.insert(t * H * W + s);
    bm_decomp += rebuilt != got;

    // Attended: top-k with index tie-break, on tie-heavy scores and random eligibility.
    std::vector<double> scores(rng.uniform_int(1, 60));
    std::vector<char> elig(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      scores[i] = rng.uniform_int(0, 6) * 0.125;
      elig[i] = rng.uniform() < 0.8;
    }
    const bool use_elig = d % 2 == 1;
    const auto am = pretrain::top_k_positions(scores, rate, use_elig ? std::span<const char>(elig) : std::span<const char>{});
    am_bad += am != top_k_oracle(scores, use_elig ? elig : std::vector<char>{}, rate);
  }

  // Attended masking inside the pretraining plan, scored by the intact forward pass.
  auto s = testing::micro_setup(4, 2, 12);
  model::VioletModel m(s.cfg);
  pretrain::PretrainConfig cfg;
  cfg.strategy = MaskStrategy::Attended;
  int plan_bad = 0;
  for (int i = 0; i < static_cast<int>(s.examples.size()); ++i) {
    const auto plan = pretrain::plan_example(m, s.examples, i, cfg, rng);
    const auto sc = pretrain::intact_attention_scores(m, s.examples[i]);
    const auto video = top_k_oracle(sc.video, {}, rate);
    std::vector<char> elig(s.examples[i].text.size(), 0);
    for (int p : pretrain::maskable_text_positions(s.examples[i].text)) elig[p] = 1;
    plan_bad += plan.plan.video_flat(s.examples[i].grid.rows * s.examples[i].grid.cols) != video ||
                plan.plan.text_mask != top_k_oracle(sc.text, elig, rate);
  }

  const bool pass = random_bad + text_bad + bm_low + bm_high + bm_decomp + am_bad + plan_bad == 0;
  return {pass, fmt::format("{} draws; violations: random count {}, text count {}, BM not above rate {}, BM above "
                            "rate+(Vmax-1)/N {} ({} draws with Vmax=1 have no admissible fraction), BM decomposition {}, "
                            "AM top-k {}, AM in plan {}",
                            draws, random_bad, text_bad, bm_low, bm_high, bm_empty, bm_decomp, am_bad, plan_bad)};
}

// ---- 4-6. ablation directions ---------------------------------------------------------

std::string render(const std::vector<OrdinalCheck>& checks, bool& pass) {
  std::string out;
  pass = !checks.empty();
  for (const auto& c : checks) {
    pass = pass && c.pass;
    out += fmt::format("{}{} [{}] ({})", out.empty() ? "" : "; ", c.name, c.pass ? "holds" : "fails", c.detail);
  }
  return out;
}

Outcome temporal_modeling() {
  ExperimentConfig base = default_config();
  base.data.clips = kAblationClips;
  base.data.max_objects = 1;
  base.finetune.steps = kTemporalFinetuneSteps;
  AblationSettings s;
  s.seeds = kSeeds;
  s.pretrain = false;
  const auto table = run_ablation(base, AblationAxis::VideoEncoding, s, nullptr);
  spdlog::info("video encoding ablation\n{}", table.to_markdown());
  Outcome o;
  o.detail = render(ordinal_checks(table, base.finetune.mc_options), o.pass);
  return o;
}

ExperimentConfig pretraining_base() {
  ExperimentConfig base = default_config();
  base.data.clips = kPretrainClips;
  base.data.max_objects = 1;
  base.stages = {{"noisy", kPretrainStageSteps, 0.3}, {"clean", kPretrainStageSteps, 0.0}};
  base.finetune.steps = kRetrievalFinetuneSteps;
  return base;
}

// The tokenizer depends only on the data section, so one serves every seed.
const tokenizer::VisualTokenizer& shared_tokenizer(const ExperimentConfig& base) {
  static const tokenizer::VisualTokenizer tok = train_tokenizer(base, build_workspace(base));
  return tok;
}

Outcome mvm_helps() {
  const ExperimentConfig base = pretraining_base();
  const auto& tok = shared_tokenizer(base);
  AblationSettings s;
  s.seeds = kSeeds;
  s.tasks = {Task::Retrieval};
  s.arms = {"off", "mvm"};
  const auto table = run_ablation(base, AblationAxis::MvmVariant, s, &tok);
  spdlog::info("visual objective ablation\n{}", table.to_markdown());
  Outcome o;
  o.detail = render(ordinal_checks(table), o.pass);

  // Visual-token pretraining alone on growing shares of the training split.
  std::vector<double> accuracy, recall;
  std::string sweep;
  for (const double fraction : {0.25, 0.5, 1.0}) {
    ExperimentConfig cfg = base;
    cfg.pretrain.use_text = false;
    cfg.data.pretrain_fraction = fraction;
    double acc = 0.0, r5 = 0.0;
    for (const std::uint64_t seed : kSeeds) {
      cfg.seed = seed;
      const auto pre = run_pretrain(cfg, &tok);
      Workspace ws = build_workspace(cfg);
      auto m = model_from_checkpoint(cfg, pre.checkpoint);
      Rng noise(0);
      const auto held = pretrain_examples(cfg, ws.held_out, ws.vocab, &tok, 0.0, noise);
      acc += mvm_accuracy(*m, held, cfg, derive_seed(seed, "mvm-probe"));
      for (const auto& rec : run_finetune(cfg, Task::Retrieval, &pre.checkpoint).held_out_metrics)
        if (rec.metric == "R@5") r5 += rec.value;
    }
    accuracy.push_back(acc / kSeeds.size());
    recall.push_back(r5 / kSeeds.size());
    sweep += fmt::format(" {:.2f}:mvm={:.4f},R@5={:.4f}", fraction, accuracy.back(), recall.back());
    spdlog::info("fraction {:.2f}: mvm accuracy {:.4f}, R@5 {:.4f}", fraction, accuracy.back(), recall.back());
  }
  const double rho = spearman(accuracy, recall);
  const bool positive = !std::isnan(rho) && rho > 0.0;
  o.pass = o.pass && positive;
  o.detail += fmt::format("; spearman(mvm accuracy, R@5) = {:.3f} [{}] ({})", rho, positive ? "holds" : "fails", sweep.substr(1));
  return o;
}

Outcome masking_strategy() {
  const ExperimentConfig base = pretraining_base();
  const auto& tok = shared_tokenizer(base);
  AblationSettings s;
  s.seeds = kSeeds;
  s.tasks = {Task::Retrieval};
  s.arms = {"random", "bm+am"};
  const auto table = run_ablation(base, AblationAxis::Masking, s, &tok);
  spdlog::info("masking ablation\n{}", table.to_markdown());
  Outcome o;
  o.detail = render(ordinal_checks(table), o.pass);
  return o;
}

// ---- 7. tokenizer ------------------------------------------------------------------------

Outcome tokenizer_checks() {
  const ExperimentConfig cfg = default_config();
  const Workspace ws = build_workspace(cfg);
  const auto tok = train_tokenizer(cfg, ws);
  std::vector<data::Frame> held;
  for (const auto& c : ws.held_out) held.insert(held.end(), c.clip.frames.begin(), c.clip.frames.end());
  const double mse = tok.reconstruction_mse(held);

  const auto again = train_tokenizer(cfg, ws);
  bool deterministic = again.codebook() == tok.codebook();
  for (const auto& f : held) deterministic = deterministic && tok.tokenize(f) == again.tokenize(f) && tok.tokenize(f) == tok.tokenize(f);

  // 100 patches: half cut from held-out frames, half uniform noise.
  const int dim = cfg.data.patch * cfg.data.patch * 3;
  const Matrix all = data::patchify(held, cfg.data.patch).patches;
  Rng rng(70);
  Matrix patches(100, dim);
  for (int r = 0; r < 100; ++r) {
    const int src = rng.uniform_int(0, all.rows() - 1);
    for (int c = 0; c < dim; ++c) patches(r, c) = r < 50 ? all(src, c) : rng.uniform();
  }
  const Matrix z = tok.encode(patches);
  const Matrix& cb = tok.codebook();
  int mismatches = 0;
  for (int r = 0; r < z.rows(); ++r) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < cb.rows(); ++k) {
      double d = 0.0;
      for (int c = 0; c < cb.cols(); ++c) d += (z(r, c) - cb(k, c)) * (z(r, c) - cb(k, c));
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    mismatches += tok.nearest(z.data() + static_cast<std::size_t>(r) * z.cols()) != best;
  }
  return {mse < 0.01 && deterministic && mismatches == 0,
          fmt::format("held-out MSE {:.5f} over {} frames (< 0.01); determinism {}; nearest-entry mismatches {}/100 over K={}",
                      mse, held.size(), deterministic ? "ok" : "broken", mismatches, cb.rows())};
}

// ---- 8. overfit -----------------------------------------------------------------------

Outcome overfit() {
  ExperimentConfig cfg = default_config();
  cfg.data.clips = 10;
  cfg.data.eval_fraction = 0.2;  // leaves 8 training clips
  const Workspace ws = build_workspace(cfg);
  const auto tok = train_tokenizer(cfg, ws);
  Rng noise(0);
  const auto examples = pretrain_examples(cfg, ws.train, ws.vocab, &tok, 0.0, noise);
  model::VioletModel m(resolve_model(cfg, ws.vocab));
  AdamW opt(cfg.optim);
  auto probe = [&] {
    Rng r(5);
    return pretrain::batch_loss(m, examples, cfg.pretrain, r, false).total;
  };
  const double start = probe();
  double best = start;
  int halved_at = -1;
  Rng rng(6);
  for (int step = 1; step <= 500 && halved_at < 0; ++step) {
    pretrain::pretrain_step(m, opt, examples, cfg.pretrain, rng);
    if (step % 10 == 0) {
      best = std::min(best, probe());
      if (best <= 0.5 * start) halved_at = step;
    }
  }
  std::string detail = fmt::format("{} clips; loss {:.3f} -> {:.3f}{}", examples.size(), start, best,
                                   halved_at > 0 ? fmt::format(" (halved by step {})", halved_at) : " (not halved in 500 steps)");
  bool pass = halved_at > 0;

  const auto ckpt = capture(to_text(cfg), m, nullptr, 0, ws.vocab);
  for (const Task task : {Task::Retrieval, Task::McQa, Task::OpenQa, Task::Fib}) {
    // Twin captions differ in one word and meet as negatives in only one
    // of every B-1 draws, so matching needs the longest run to memorize.
    cfg.finetune.steps = task == Task::Retrieval ? 2500 : 400;
    const auto r = run_finetune(cfg, task, &ckpt);
    const auto& head = r.train_metrics.front();  // R@1 for retrieval, accuracy otherwise
    pass = pass && head.value >= 0.99;
    detail += fmt::format("; {} {} {:.3f}", head.task, head.metric, head.value);
  }
  return {pass, detail};
}

// ---- 9. recall oracle -------------------------------------------------------------------

Outcome recall_oracle() {
  Rng rng(90);
  int bad = 0, checks = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n_video = rng.uniform_int(1, 8), n_text = rng.uniform_int(1, n_video);
    Matrix s(n_text, n_video);
    for (auto& v : s.values()) v = rng.uniform_int(0, 4) * 0.5;  // frequent ties
    for (int k = 1; k <= n_video; ++k) {
      int hits = 0;
      for (int i = 0; i < n_text; ++i) {
        std::vector<int> order(n_video);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return s(i, a) > s(i, b); });
        hits += std::find(order.begin(), order.begin() + k, i) != order.begin() + k;
      }
      ++checks;
      bad += downstream::recall_at_k(s, k) != static_cast<double>(hits) / n_text;
    }
  }
  return {bad == 0, fmt::format("500 matrices, {} (matrix, k) pairs, {} mismatches", checks, bad)};
}

// ---- 10. static images ---------------------------------------------------------------

Outcome static_images() {
  ExperimentConfig cfg = default_config();
  cfg.data.clips = 12;
  cfg.data.frames = 1;
  cfg.tokenizer.steps = 50;
  cfg.stages = {{"only", 2, 0.0}};
  cfg.finetune.steps = 2;
  const Workspace ws = build_workspace(cfg);
  const auto tok = train_tokenizer(cfg, ws);
  int runs = 0;
  for (const char* variant : {"mean", "concat", "vt"})
    for (const char* strategy : {"random", "bm", "am", "bm+am"})
      for (const char* visual : {"mvm", "mfm", "off"}) {
        ExperimentConfig c = cfg;
        set_value(c, "encoder.variant", variant);
        set_value(c, "pretrain.strategy", strategy);
        set_value(c, "mvm.variant", visual);
        const auto pre = run_pretrain(c, &tok);
        for (const auto& rec : pre.trace)
          if (!std::isfinite(rec.report.total)) return {false, fmt::format("non-finite loss ({}, {}, {})", variant, strategy, visual)};
        ++runs;
        if (std::string(strategy) != "bm+am" || std::string(visual) != "mvm") continue;
        for (const Task task : {Task::Retrieval, Task::McQa, Task::OpenQa, Task::Fib}) {
          for (const auto& rec : run_finetune(c, task, &pre.checkpoint).held_out_metrics)
            if (!std::isfinite(rec.value)) return {false, fmt::format("non-finite {} {}", rec.task, rec.metric)};
          ++runs;
        }
        for (const auto& rec : run_eval(c, Task::Retrieval, pre.checkpoint, true))
          if (!std::isfinite(rec.value)) return {false, "non-finite zero-shot retrieval"};
        ++runs;
      }
  return {true, fmt::format("T=1 through {} pretrain/finetune/eval runs over every encoder, masking and visual objective", runs)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::info);
  const std::vector<Criterion> criteria{
      {1, "loss-formula oracles", loss_oracles},
      {2, "gradient check of the full pretraining loss", gradient_check},
      {3, "masking invariants", masking_invariants},
      {4, "temporal modeling: vt >= concat >= mean", temporal_modeling},
      {5, "visual-token modeling helps retrieval", mvm_helps},
      {6, "bm+am >= random masking", masking_strategy},
      {7, "visual tokenizer", tokenizer_checks},
      {8, "overfit sanity", overfit},
      {9, "recall@k oracle", recall_oracle},
      {10, "static-image path", static_images},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  std::vector<std::string> lines;
  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    lines.push_back(fmt::format("{} [{}] {}: {} ({:.1f}s)", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail, secs));
    std::printf("%s\n", lines.back().c_str());
    std::fflush(stdout);
  }
  std::printf("\nsummary\n");
  for (const auto& l : lines) std::printf("%s\n", l.c_str());
  return failed == 0 ? 0 : 1;
}
