// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/harness/runner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "violet/core/errors.hpp"
#include "violet/data/corpus_io.hpp"

namespace violet::harness {

using downstream::Task;

namespace {

bool pairs_of_twins(const ExperimentConfig& cfg) { return cfg.data.manifest.empty() && cfg.data.twins; }

int round_to_pairs(int n, bool pairs) { return pairs && n % 2 != 0 ? n + 1 : n; }

// Batches drawn from a reshuffled order; twin pairs stay adjacent when `group` is 2.
class BatchSampler {
 public:
  BatchSampler(int n, int group, Rng& rng) : n_(n), group_(group), rng_(rng) {}

  std::vector<int> next(int batch) {
    std::vector<int> out;
    while (static_cast<int>(out.size()) < std::min(batch, n_)) {
      if (cursor_ == order_.size()) refill();
      out.push_back(order_[cursor_++]);
    }
    return out;
  }

 private:
  void refill() {
    const int groups = (n_ + group_ - 1) / group_;
    std::vector<int> g(groups);
    std::iota(g.begin(), g.end(), 0);
    rng_.shuffle(std::span<int>(g));
    order_.clear();
    for (int k : g)
      for (int i = k * group_; i < std::min(n_, (k + 1) * group_); ++i) order_.push_back(i);
    cursor_ = 0;
  }

  int n_;
  int group_;
  Rng& rng_;
  std::vector<int> order_;
  std::size_t cursor_ = 0;
};

}  // namespace

Workspace build_workspace(const ExperimentConfig& cfg) {
  validate(cfg);
  Workspace ws;
  std::vector<data::SyntheticClip> clips;
  if (cfg.data.manifest.empty()) {
    data::SynthConfig sc;
    sc.n_clips = cfg.data.clips;
    sc.frames_per_clip = cfg.data.frames_per_clip;
    sc.resolution = cfg.data.resolution;
    sc.patch = cfg.data.patch;
    sc.min_objects = cfg.data.min_objects;
    sc.max_objects = cfg.data.max_objects;
    sc.twins = cfg.data.twins;
    sc.unique_captions = cfg.data.unique_captions;
    sc.seed = derive_seed(cfg.seed, "data");
    clips = data::generate_synthetic(sc);
  } else {
    ws.procedural = false;
    for (const auto& desc : data::load_manifest(cfg.data.manifest)) clips.push_back({data::load_clip(desc), {}});
  }
  const bool pairs = pairs_of_twins(cfg);
  const int n = static_cast<int>(clips.size());
  const int n_eval = round_to_pairs(std::max(1, static_cast<int>(std::lround(n * cfg.data.eval_fraction))), pairs);
  if (n - n_eval < 2) throw ConfigError("corpus too small for a training split");
  ws.train.assign(clips.begin(), clips.end() - n_eval);
  ws.held_out.assign(clips.end() - n_eval, clips.end());

  std::vector<std::string> corpus;
  for (const auto& c : ws.train) corpus.push_back(c.clip.caption);
  if (ws.procedural) {
    const auto extra = downstream::task_vocabulary_corpus();
    corpus.insert(corpus.end(), extra.begin(), extra.end());
  }
  ws.vocab = text::Vocabulary::build(corpus, cfg.data.vocab_size);
  return ws;
}

model::ModelConfig resolve_model(const ExperimentConfig& cfg, const text::Vocabulary& vocab) {
  model::ModelConfig m = cfg.model;
  m.video.patch_dim = cfg.data.patch * cfg.data.patch * 3;
  m.video.grid_h = m.video.grid_w = cfg.data.resolution / cfg.data.patch;
  m.video.t_max = cfg.data.frames;
  m.vocab_size = vocab.size();
  m.codebook_size = cfg.tokenizer.K;
  m.feature_dim = cfg.tokenizer.code_dim;
  m.seed = derive_seed(cfg.seed, "model");
  return m;
}

tokenizer::TokenizerConfig resolve_tokenizer(const ExperimentConfig& cfg) {
  tokenizer::TokenizerConfig t = cfg.tokenizer;
  t.patch = cfg.data.patch;
  t.resolution = cfg.data.resolution;
  t.seed = derive_seed(cfg.seed, "tokenizer");
  return t;
}

tokenizer::VisualTokenizer train_tokenizer(const ExperimentConfig& cfg, const Workspace& ws,
                                           tokenizer::TrainTrace* trace) {
  std::vector<data::Frame> frames;
  for (const auto& c : ws.train) frames.insert(frames.end(), c.clip.frames.begin(), c.clip.frames.end());
  return tokenizer::VisualTokenizer::train(frames, resolve_tokenizer(cfg), trace);
}

std::string to_json_line(const TraceRecord& r) {
  nlohmann::json j;
  j["stage"] = r.stage;
  j["step"] = r.step;
  j["total"] = r.report.total;
  j["mlm"] = r.report.l_mlm;
  j["vtm"] = r.report.l_vtm;
  j["visual"] = r.report.l_visual;
  j["mvm_accuracy"] = r.report.mvm_accuracy();
  j["text_masked"] = r.report.text_masked;
  j["video_masked"] = r.report.video_masked;
  return j.dump();
}

std::vector<pretrain::PretrainExample> pretrain_examples(const ExperimentConfig& cfg,
                                                         std::span<const data::SyntheticClip> clips,
                                                         const text::Vocabulary& vocab,
                                                         const tokenizer::VisualTokenizer* tok, double noise,
                                                         Rng& rng) {
  std::vector<pretrain::PretrainExample> out;
  for (const auto& c : clips) {
    auto text = text::tokenize_text(c.clip.caption, vocab);
    if (noise > 0.0)
      for (auto& id : text.ids)
        if (!text::Vocabulary::is_special(id) && rng.bernoulli(noise))
          id = rng.uniform_int(text::kNumReserved, vocab.size() - 1);
    const auto grid = data::patchify(data::sample_frames(c.clip, cfg.data.frames), cfg.data.patch);
    out.push_back(pretrain::make_example(grid, std::move(text), tok));
  }
  return out;
}

PretrainResult run_pretrain(const ExperimentConfig& cfg, const tokenizer::VisualTokenizer* tok) {
  validate(cfg);
  const bool visual = cfg.pretrain.visual != pretrain::VisualObjective::Off && cfg.pretrain.lambda_visual != 0.0;
  if (visual && tok == nullptr) throw ConfigError("the visual objective needs a trained tokenizer (tokenizer.path)");
  if (tok != nullptr && (tok->config().patch != cfg.data.patch || tok->K() != cfg.tokenizer.K ||
                         tok->config().code_dim != cfg.tokenizer.code_dim))
    throw ConfigError("tokenizer geometry does not match data.patch, tokenizer.K and tokenizer.code_dim");

  const Workspace ws = build_workspace(cfg);
  model::VioletModel m(resolve_model(cfg, ws.vocab));
  AdamW opt(cfg.optim);

  const bool pairs = pairs_of_twins(cfg);
  const int n_train = static_cast<int>(ws.train.size());
  const int n_pool = std::min(
      n_train, std::max(2, round_to_pairs(static_cast<int>(std::ceil(cfg.data.pretrain_fraction * n_train - 1e-9)), pairs)));
  const std::span<const data::SyntheticClip> pool(ws.train.data(), n_pool);

  PretrainResult result;
  int step = 0;
  for (std::size_t s = 0; s < cfg.stages.size(); ++s) {
    const Stage& stage = cfg.stages[s];
    Rng rng(derive_seed(cfg.seed, fmt::format("pretrain/{}/{}", s, stage.name)));
    const auto examples = pretrain_examples(cfg, pool, ws.vocab, tok, stage.text_noise, rng);
    BatchSampler sampler(n_pool, pairs ? 2 : 1, rng);
    spdlog::info("stage {} ({} steps, {} clips, text noise {})", stage.name, stage.steps, n_pool, stage.text_noise);
    for (int k = 0; k < stage.steps; ++k) {
      std::vector<pretrain::PretrainExample> batch;
      for (int i : sampler.next(cfg.pretrain_batch)) batch.push_back(examples[i]);
      const auto report = pretrain::pretrain_step(m, opt, batch, cfg.pretrain, rng);
      result.trace.push_back({stage.name, ++step, report});
      if (step % 50 == 0) spdlog::debug("step {} loss {:.4f}", step, report.total);
    }
  }
  result.checkpoint = capture(to_text(cfg), m, &opt, step, ws.vocab);
  return result;
}

PretrainResult run_pretrain(const ExperimentConfig& cfg) {
  const bool visual = cfg.pretrain.visual != pretrain::VisualObjective::Off && cfg.pretrain.lambda_visual != 0.0;
  if (!visual) return run_pretrain(cfg, nullptr);
  if (cfg.tokenizer_path.empty()) throw ConfigError("the visual objective is on but tokenizer.path is empty");
  if (!std::filesystem::exists(cfg.tokenizer_path))
    throw ConfigError("tokenizer checkpoint " + cfg.tokenizer_path + " does not exist");
  const auto tok = tokenizer::VisualTokenizer::load(cfg.tokenizer_path);
  return run_pretrain(cfg, &tok);
}

double mvm_accuracy(model::VioletModel& m, std::span<const pretrain::PretrainExample> examples,
                    const ExperimentConfig& cfg, std::uint64_t seed) {
  pretrain::PretrainConfig pc = cfg.pretrain;
  pc.visual = pretrain::VisualObjective::Mvm;
  Rng rng(seed);
  int correct = 0, count = 0;
  const int B = std::max(2, cfg.pretrain_batch);
  for (std::size_t i = 0; i < examples.size(); i += B) {
    const auto n = std::min<std::size_t>(B, examples.size() - i);
    const auto r = pretrain::batch_loss(m, examples.subspan(i, n), pc, rng, false);
    correct += r.mvm_correct;
    count += r.mvm_count;
  }
  return count == 0 ? 0.0 : static_cast<double>(correct) / count;
}

std::vector<downstream::TaskExample> task_examples(const ExperimentConfig& cfg, const Workspace& ws, Task task,
                                                   bool held_out) {
  if (!ws.procedural && task != Task::Retrieval)
    throw ConfigError(fmt::format("task {} needs the procedural corpus; manifest corpora only support retrieval",
                                  downstream::task_name(task)));
  const downstream::ClipSampling sampling{cfg.data.frames, cfg.data.patch};
  auto build = [&](bool eval) {
    const auto& clips = eval ? ws.held_out : ws.train;
    Rng rng(derive_seed(cfg.seed, fmt::format("tasks/{}/{}", downstream::task_name(task), eval ? "eval" : "train")));
    switch (task) {
      case Task::Retrieval: return downstream::retrieval_examples(clips, ws.vocab, sampling);
      case Task::McQa: return downstream::mc_direction_examples(clips, ws.vocab, sampling, cfg.finetune.mc_options, rng);
      case Task::OpenQa: return downstream::open_qa_examples(clips, ws.vocab, sampling, rng);
      case Task::Fib: return downstream::fib_examples(clips, ws.vocab, sampling, rng);
    }
    return std::vector<downstream::TaskExample>{};
  };
  auto out = build(held_out);
  if (task == Task::OpenQa || task == Task::Fib) {
    const auto train = held_out ? build(false) : out;
    downstream::assign_answers(out, downstream::answer_space_for(train, cfg.model.num_answers));
  }
  return out;
}

std::unique_ptr<model::VioletModel> model_from_checkpoint(const ExperimentConfig& cfg, const Checkpoint& ckpt) {
  const auto vocab = text::Vocabulary::from_tokens(ckpt.vocabulary);
  auto m = std::make_unique<model::VioletModel>(resolve_model(cfg, vocab));
  restore(ckpt, *m);
  return m;
}

FinetuneResult run_finetune(const ExperimentConfig& cfg, Task task, const Checkpoint* pretrained) {
  Workspace ws = build_workspace(cfg);
  if (pretrained != nullptr) ws.vocab = text::Vocabulary::from_tokens(pretrained->vocabulary);
  auto m = pretrained != nullptr ? model_from_checkpoint(cfg, *pretrained)
                                 : std::make_unique<model::VioletModel>(resolve_model(cfg, ws.vocab));
  if (task == Task::Retrieval) m->init_t2v_from_vtm();

  const auto train = task_examples(cfg, ws, task, false);
  const auto held = task_examples(cfg, ws, task, true);
  downstream::FinetuneConfig fc;
  fc.steps = cfg.finetune.steps;
  fc.batch = cfg.finetune.batch;
  fc.group = pairs_of_twins(cfg) ? 2 : 1;
  fc.optimizer = cfg.optim;
  fc.optimizer.lr = cfg.finetune.lr;
  Rng rng(derive_seed(cfg.seed, fmt::format("finetune/{}", downstream::task_name(task))));

  FinetuneResult r;
  r.trace = downstream::finetune(*m, task, train, fc, rng);
  r.train_metrics = downstream::evaluate(*m, task, train);
  r.held_out_metrics = downstream::evaluate(*m, task, held);
  r.checkpoint = capture(to_text(cfg), *m, nullptr, fc.steps, ws.vocab);
  return r;
}

std::vector<downstream::EvalRecord> run_eval(const ExperimentConfig& cfg, Task task, const Checkpoint& ckpt,
                                             bool zero_shot) {
  Workspace ws = build_workspace(cfg);
  ws.vocab = text::Vocabulary::from_tokens(ckpt.vocabulary);
  const auto m = model_from_checkpoint(cfg, ckpt);
  return downstream::evaluate(*m, task, task_examples(cfg, ws, task, true), zero_shot);
}

}  // namespace violet::harness
