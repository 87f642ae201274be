// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/downstream/tasks.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "violet/core/errors.hpp"

namespace violet::downstream {

using data::CaptionClause;

Task parse_task(std::string_view name) {
  if (name == "retrieval") return Task::Retrieval;
  if (name == "mc_qa" || name == "mc-qa") return Task::McQa;
  if (name == "open_qa" || name == "open-qa") return Task::OpenQa;
  if (name == "fib") return Task::Fib;
  throw ConfigError("unknown task '" + std::string(name) + "'");
}

std::string_view task_name(Task t) {
  switch (t) {
    case Task::Retrieval: return "retrieval";
    case Task::McQa: return "mc_qa";
    case Task::OpenQa: return "open_qa";
    case Task::Fib: return "fib";
  }
  return "?";
}

data::PatchGrid clip_grid(const data::VideoClip& clip, const ClipSampling& s) {
  return data::patchify(data::sample_frames(clip, s.frames), s.patch);
}

namespace {

std::string subject(const CaptionClause& c) {
  return std::string(data::color_name(c.color)) + " " + std::string(data::shape_name(c.shape));
}

std::string direction_question(const CaptionClause& c) { return "which way does the " + subject(c) + " move ?"; }

std::string color_question(const CaptionClause& c) {
  return "what color is the " + std::string(data::shape_name(c.shape)) + " that moves " +
         std::string(data::direction_name(c.direction)) + " ?";
}

TaskExample base_example(const data::SyntheticClip& clip, const ClipSampling& s) {
  TaskExample ex;
  ex.clip_id = clip.clip.clip_id;
  ex.grid = clip_grid(clip.clip, s);
  return ex;
}

}  // namespace

std::vector<std::string> task_vocabulary_corpus() {
  std::vector<std::string> out;
  for (int c = 0; c < data::kNumColors; ++c)
    for (int sh = 0; sh < data::kNumShapes; ++sh)
      for (int d = 0; d < data::kNumDirections; ++d) {
        const CaptionClause cl{c, static_cast<data::ShapeKind>(sh), static_cast<data::Direction>(d)};
        out.push_back(direction_question(cl));
        out.push_back(color_question(cl));
        out.push_back(data::make_caption({cl}));
      }
  return out;
}

std::vector<TaskExample> retrieval_examples(std::span<const data::SyntheticClip> clips, const text::Vocabulary& vocab,
                                            const ClipSampling& s) {
  std::vector<TaskExample> out;
  for (const auto& clip : clips) {
    TaskExample ex = base_example(clip, s);
    ex.text = text::tokenize_text(clip.clip.caption, vocab);
    ex.answer_text = clip.clip.caption;
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<TaskExample> mc_direction_examples(std::span<const data::SyntheticClip> clips,
                                               const text::Vocabulary& vocab, const ClipSampling& s, int n_options,
                                               Rng& rng) {
  if (n_options < 2 || n_options > data::kNumDirections) throw ConfigError("mc options must lie in [2, 6]");
  std::vector<TaskExample> out;
  for (const auto& clip : clips) {
    const auto clauses = clip.clauses();
    const CaptionClause& target = clauses[rng.uniform_int(0, static_cast<int>(clauses.size()) - 1)];
    std::vector<data::Direction> dirs{target.direction, data::opposite(target.direction)};
    std::vector<data::Direction> rest;
    for (int d = 0; d < data::kNumDirections; ++d) {
      const auto dir = static_cast<data::Direction>(d);
      if (dir != dirs[0] && dir != dirs[1]) rest.push_back(dir);
    }
    rng.shuffle(std::span<data::Direction>(rest));
    for (int k = 2; k < n_options; ++k) dirs.push_back(rest[k - 2]);
    if (n_options == 2)
      std::sort(dirs.begin(), dirs.end());
    else
      rng.shuffle(std::span<data::Direction>(dirs));

    TaskExample ex = base_example(clip, s);
    ex.text = text::tokenize_text(direction_question(target), vocab);
    for (int k = 0; k < n_options; ++k) {
      ex.options.push_back(text::tokenize_text(data::direction_name(dirs[k]), vocab));
      if (dirs[k] == target.direction) ex.answer = k;
    }
    ex.answer_text = std::string(data::direction_name(target.direction));
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<TaskExample> open_qa_examples(std::span<const data::SyntheticClip> clips, const text::Vocabulary& vocab,
                                          const ClipSampling& s, Rng& rng) {
  std::vector<TaskExample> out;
  for (const auto& clip : clips) {
    const auto clauses = clip.clauses();
    const CaptionClause& c = clauses[rng.uniform_int(0, static_cast<int>(clauses.size()) - 1)];
    // A colour question is only fair when no other object shares the shape and direction.
    bool unique_colour = true;
    for (const auto& o : clauses)
      if (!(o == c) && o.shape == c.shape && o.direction == c.direction) unique_colour = false;
    TaskExample ex = base_example(clip, s);
    if (unique_colour && rng.bernoulli(0.5)) {
      ex.text = text::tokenize_text(color_question(c), vocab);
      ex.answer_text = std::string(data::color_name(c.color));
    } else {
      ex.text = text::tokenize_text(direction_question(c), vocab);
      ex.answer_text = std::string(data::direction_name(c.direction));
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<TaskExample> fib_examples(std::span<const data::SyntheticClip> clips, const text::Vocabulary& vocab,
                                      const ClipSampling& s, Rng& rng) {
  std::vector<TaskExample> out;
  for (const auto& clip : clips) {
    const auto clauses = clip.clauses();
    const int k = rng.uniform_int(0, static_cast<int>(clauses.size()) - 1);
    const bool blank_direction = rng.bernoulli(0.5);
    std::string sentence;
    for (int i = 0; i < static_cast<int>(clauses.size()); ++i) {
      const auto& c = clauses[i];
      if (i > 0) sentence += " and ";
      const std::string colour = (i == k && !blank_direction) ? "[BLANK]" : std::string(data::color_name(c.color));
      const std::string dir =
          (i == k && blank_direction) ? "[BLANK]" : std::string(data::direction_name(c.direction));
      sentence += "a " + colour + " " + std::string(data::shape_name(c.shape)) + " moves " + dir;
    }
    TaskExample ex = base_example(clip, s);
    ex.text = text::tokenize_text(sentence, vocab);
    ex.answer_text = blank_direction ? std::string(data::direction_name(clauses[k].direction))
                                     : std::string(data::color_name(clauses[k].color));
    out.push_back(std::move(ex));
  }
  return out;
}

void assign_answers(std::vector<TaskExample>& examples, const AnswerSpace& space) {
  for (auto& ex : examples) ex.answer = space.id(ex.answer_text);
}

AnswerSpace answer_space_for(std::span<const TaskExample> train, int size) {
  std::vector<std::string> answers;
  for (const auto& ex : train) answers.push_back(ex.answer_text);
  return build_answer_space(answers, size);
}

Var task_loss(Tape& t, const model::VioletModel& m, Task task, const TaskExample& ex,
              const TaskExample* negative) {
  const auto video = m.encode_video(t, ex.grid);
  switch (task) {
    case Task::Retrieval: {
      if (negative == nullptr) throw InputError("retrieval training needs a mismatched caption");
      const Var pos = retrieval_logit(t, m, video, ex.text, false);
      const Var neg = retrieval_logit(t, m, video, negative->text, false);
      return ops::add(t, ops::bce_with_logits(t, pos, 1.0), ops::bce_with_logits(t, neg, 0.0));
    }
    case Task::McQa: {
      if (ex.answer < 0) throw InputError("multiple-choice item without an answer");
      const int target[] = {ex.answer};
      const double w[] = {1.0};
      return ops::cross_entropy(t, mc_logits(t, m, video, ex.text, ex.options), target, w);
    }
    case Task::OpenQa:
    case Task::Fib: {
      if (ex.answer < 0 || ex.answer >= m.config().num_answers)
        throw InputError("answer outside the model's answer space");
      const Var logits = task == Task::OpenQa ? open_qa_logits(t, m, video, ex.text) : fib_logits(t, m, video, ex.text);
      const int target[] = {ex.answer};
      const double w[] = {1.0};
      return ops::cross_entropy(t, logits, target, w);
    }
  }
  throw InputError("unknown task");
}

FinetuneTrace finetune(model::VioletModel& m, Task task, std::span<const TaskExample> train,
                       const FinetuneConfig& cfg, Rng& rng) {
  FinetuneTrace trace;
  if (cfg.steps <= 0) return trace;
  if (train.empty()) throw InputError("finetuning on an empty split");
  if (task == Task::Retrieval && train.size() < 2) throw InputError("retrieval finetuning needs two or more pairs");
  std::vector<TaskExample> usable;
  for (const auto& ex : train)
    if (task == Task::Retrieval || ex.answer >= 0) usable.push_back(ex);
  if (usable.empty()) throw InputError("no finetuning item has an answer inside the space");

  AdamW opt(cfg.optimizer);
  const int n = static_cast<int>(usable.size());
  const int group = std::max(1, cfg.group);
  const int n_groups = (n + group - 1) / group;
  std::vector<int> order;
  std::size_t cursor = 0;
  auto refill = [&] {
    std::vector<int> groups(n_groups);
    std::iota(groups.begin(), groups.end(), 0);
    rng.shuffle(std::span<int>(groups));
    order.clear();
    for (int g : groups)
      for (int i = g * group; i < std::min(n, (g + 1) * group); ++i) order.push_back(i);
    cursor = 0;
  };
  refill();
  const int B = std::min(cfg.batch, n);
  for (int step = 0; step < cfg.steps; ++step) {
    std::vector<int> batch;
    while (static_cast<int>(batch.size()) < B) {
      if (cursor == order.size()) refill();
      batch.push_back(order[cursor++]);
    }
    m.params().zero_grad();
    double total = 0.0;
    for (int b = 0; b < B; ++b) {
      const TaskExample* neg = nullptr;
      if (task == Task::Retrieval) {
        int other;
        if (B >= 2) {
          const int r = rng.uniform_int(0, B - 2);
          other = batch[r >= b ? r + 1 : r];
        } else {
          const int r = rng.uniform_int(0, n - 2);
          other = r >= batch[b] ? r + 1 : r;
        }
        neg = &usable[other];
      }
      Tape tape(true);
      const Var loss = task_loss(tape, m, task, usable[batch[b]], neg);
      total += tape.value(loss)(0, 0);
      tape.backward(loss, 1.0 / B);
    }
    opt.step(m.params());
    trace.loss.push_back(total / B);
  }
  return trace;
}

std::vector<EvalRecord> evaluate(const model::VioletModel& m, Task task, std::span<const TaskExample> examples,
                                 bool zero_shot) {
  std::vector<EvalRecord> out;
  const int n = static_cast<int>(examples.size());
  if (n == 0) return out;
  const std::string name(task_name(task));
  if (task == Task::Retrieval) {
    std::vector<data::PatchGrid> grids;
    std::vector<text::TextSequence> texts;
    for (const auto& ex : examples) {
      grids.push_back(ex.grid);
      texts.push_back(ex.text);
    }
    const auto sm = score_matrix(m, grids, texts, zero_shot);
    for (int k : {1, 5, 10})
      if (k <= n) out.push_back({name, "R@" + std::to_string(k), recall_at_k(sm.scores, k), n});
    return out;
  }
  int correct = 0;
  for (const auto& ex : examples) {
    int pred = -1;
    if (task == Task::McQa)
      pred = mc_qa_predict(m, ex.grid, ex.text, ex.options);
    else if (task == Task::OpenQa)
      pred = open_qa_predict(m, ex.grid, ex.text);
    else
      pred = fib_predict(m, ex.grid, ex.text);
    correct += ex.answer >= 0 && pred == ex.answer;
  }
  out.push_back({name, "accuracy", static_cast<double>(correct) / n, n});
  return out;
}

std::string to_json_line(const EvalRecord& r) {
  nlohmann::json j;
  j["task"] = r.task;
  j["metric"] = r.metric;
  j["value"] = r.value;
  j["n"] = r.n;
  return j.dump();
}

void write_jsonl(const std::filesystem::path& path, std::span<const EvalRecord> records) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  for (const auto& r : records) f << to_json_line(r) << '\n';
}

void write_csv(const std::filesystem::path& path, std::span<const EvalRecord> records) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  f << "task,metric,value,n\n";
  for (const auto& r : records) f << r.task << ',' << r.metric << ',' << r.value << ',' << r.n << '\n';
}

}  // namespace violet::downstream
