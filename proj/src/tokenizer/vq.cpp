// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/tokenizer/vq.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "violet/core/binary_io.hpp"
#include "violet/core/errors.hpp"
#include "violet/core/kernels.hpp"
#include "violet/core/ops.hpp"
#include "violet/core/optimizer.hpp"

namespace violet::tokenizer {

namespace {

constexpr char kTag[] = "VIOLETVQ";
constexpr std::uint32_t kVersion = 1;

Var mlp2(Tape& t, Var x, ParameterStore& ps, const char* a, const char* b) {
  const std::string sa(a), sb(b);
  Var h = ops::gelu(t, ops::linear(t, x, t.param(ps.at(sa + ".w")), t.param(ps.at(sa + ".b"))));
  return ops::linear(t, h, t.param(ps.at(sb + ".w")), t.param(ps.at(sb + ".b")));
}

std::uint64_t row_hash(const double* p, int n) {
  std::uint64_t h = 1469598103934665603ULL;
  for (int i = 0; i < n; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, p + i, sizeof bits);
    h = (h ^ bits) * 1099511628211ULL;
  }
  return h;
}

Matrix gather(const Matrix& src, std::span<const int> rows) {
  Matrix out(static_cast<int>(rows.size()), src.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy_n(src.data() + static_cast<long>(rows[i]) * src.cols(), src.cols(), out.data() + i * src.cols());
  return out;
}

}  // namespace

VisualTokenizer::VisualTokenizer(const TokenizerConfig& cfg) : cfg_(cfg), params_(std::make_unique<ParameterStore>()) {
  if (cfg.K < 2) throw ConfigError("tokenizer K must be >= 2");
  if (cfg.patch < 1 || cfg.resolution % cfg.patch != 0) {
    throw ConfigError("tokenizer resolution must be divisible by its patch size");
  }
  if (cfg.hidden < 1 || cfg.code_dim < 1) throw ConfigError("tokenizer widths must be positive");
  Rng rng(derive_seed(cfg.seed, "tokenizer/init"));
  const int dim = cfg.patch * cfg.patch * 3;
  auto& ps = *params_;
  auto layer = [&](const std::string& name, int in, int out) {
    ps.add(name + ".w", in, out, Init::Normal, rng, 1.0 / std::sqrt(in));
    ps.add(name + ".b", 1, out, Init::Zeros, rng, 0.0, false);
  };
  layer("enc1", dim, cfg.hidden);
  layer("enc2", cfg.hidden, cfg.code_dim);
  ps.add("codebook", cfg.K, cfg.code_dim, Init::Normal, rng, 1.0, false);
  layer("dec1", cfg.code_dim, cfg.hidden);
  layer("dec2", cfg.hidden, dim);
}

Matrix VisualTokenizer::encode(const Matrix& patches) const {
  if (patches.cols() != cfg_.patch * cfg_.patch * 3) throw InputError("tokenizer: patch width mismatch");
  Tape t(false);
  return t.value(mlp2(t, t.constant(patches), *params_, "enc1", "enc2"));
}

Matrix VisualTokenizer::decode(const Matrix& codes) const {
  Tape t(false);
  return t.value(mlp2(t, t.constant(codes), *params_, "dec1", "dec2"));
}

int VisualTokenizer::nearest(const double* z) const {
  const Matrix& cb = codebook();
  const auto& k = kernels::active();
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < cb.rows(); ++c) {
    const double d = k.squared_distance(z, cb.data() + static_cast<long>(c) * cb.cols(), cb.cols());
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

void VisualTokenizer::check_grid(const data::PatchGrid& grid) const {
  if (grid.patch != cfg_.patch || grid.rows * grid.patch != cfg_.resolution ||
      grid.cols * grid.patch != cfg_.resolution) {
    throw InputError("tokenizer trained for " + std::to_string(cfg_.resolution) + "px frames with patch " +
                     std::to_string(cfg_.patch));
  }
}

TokenGrid VisualTokenizer::tokenize(const data::PatchGrid& grid) const {
  check_grid(grid);
  const Matrix z = encode(grid.patches);
  TokenGrid out{grid.frames, grid.rows, grid.cols, std::vector<int>(grid.count())};
  for (int r = 0; r < z.rows(); ++r) out.ids[r] = nearest(z.data() + static_cast<long>(r) * z.cols());
  return out;
}

TokenGrid VisualTokenizer::tokenize(const data::Frame& frame) const {
  if (frame.height != cfg_.resolution || frame.width != cfg_.resolution) {
    throw InputError("tokenizer expects " + std::to_string(cfg_.resolution) + "x" +
                     std::to_string(cfg_.resolution) + " frames");
  }
  const data::Frame frames[] = {frame};
  return tokenize(data::patchify(frames, cfg_.patch));
}

data::Frame VisualTokenizer::reconstruct(const TokenGrid& grid) const {
  if (grid.frames != 1) throw InputError("reconstruct expects a single-frame grid");
  if (grid.rows * cfg_.patch != cfg_.resolution || grid.cols * cfg_.patch != cfg_.resolution ||
      static_cast<int>(grid.ids.size()) != grid.rows * grid.cols) {
    throw InputError("token grid does not match the tokenizer resolution");
  }
  for (int id : grid.ids) {
    if (id < 0 || id >= cfg_.K) throw InputError("visual token id " + std::to_string(id) + " out of range");
  }
  Matrix pixels = decode(gather(codebook(), grid.ids));
  for (auto& v : pixels.values()) v = std::clamp(v, 0.0, 1.0);
  data::PatchGrid pg{1, grid.rows, grid.cols, cfg_.patch, std::move(pixels)};
  return data::reassemble(pg).front();
}

double VisualTokenizer::reconstruction_mse(std::span<const data::Frame> frames) const {
  double err = 0.0;
  long n = 0;
  for (const auto& f : frames) {
    const data::Frame r = reconstruct(tokenize(f));
    for (std::size_t i = 0; i < f.pixels.size(); ++i) {
      const double d = r.pixels[i] - f.pixels[i];
      err += d * d;
    }
    n += static_cast<long>(f.pixels.size());
  }
  return n > 0 ? err / n : 0.0;
}

VisualTokenizer VisualTokenizer::train(std::span<const data::Frame> frames, const TokenizerConfig& cfg,
                                       TrainTrace* trace) {
  if (frames.empty()) throw InputError("train_tokenizer: no frames");
  VisualTokenizer tok(cfg);
  for (const auto& f : frames) {
    if (f.height != cfg.resolution || f.width != cfg.resolution) {
      throw InputError("train_tokenizer: frame size differs from configured resolution");
    }
  }
  const Matrix X = data::patchify(frames, cfg.patch).patches;
  const int N = X.rows(), dim = X.cols();

  std::unordered_set<std::uint64_t> distinct;
  for (int r = 0; r < N; ++r) distinct.insert(row_hash(X.data() + static_cast<long>(r) * dim, dim));
  if (static_cast<int>(distinct.size()) < cfg.K) {
    spdlog::warn("tokenizer: K={} exceeds the {} distinct training patches", cfg.K, distinct.size());
  }

  Rng rng(derive_seed(cfg.seed, "tokenizer/train"));
  ParameterStore& ps = *tok.params_;
  Parameter& cb = ps.at("codebook");
  auto reseed = [&](int code) {
    const int r = rng.uniform_int(0, N - 1);
    const Matrix z = tok.encode(gather(X, std::span<const int>(&r, 1)));
    for (int c = 0; c < cb.value.cols(); ++c) cb.value(code, c) = z(0, c) + 1e-3 * rng.normal();
  };
  for (int k = 0; k < cfg.K; ++k) reseed(k);

  AdamW opt({.lr = cfg.lr, .beta1 = 0.9, .beta2 = 0.99, .eps = 1e-8, .weight_decay = 0.0});
  const int batch = std::min(cfg.batch, N);
  const int epoch_len = (N + batch - 1) / batch;
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> usage(cfg.K, 0);
  if (trace != nullptr) {
    trace->distinct_patches = static_cast<int>(distinct.size());
    trace->reconstruction_mse.reserve(cfg.steps);
  }
  int cursor = N;
  for (int step = 0; step < cfg.steps; ++step) {
    if (cursor + batch > N) {
      rng.shuffle(std::span<int>(order));
      cursor = 0;
    }
    const Matrix xb = gather(X, std::span<const int>(order.data() + cursor, batch));
    cursor += batch;

    Tape t(true);
    Var x = t.constant(xb);
    Var z = mlp2(t, x, ps, "enc1", "enc2");
    std::vector<int> ids(batch);
    const Matrix& zv = t.value(z);
    for (int r = 0; r < batch; ++r) {
      ids[r] = tok.nearest(zv.data() + static_cast<long>(r) * zv.cols());
      ++usage[ids[r]];
    }
    Var e = ops::gather_rows(t, t.param(cb), ids);
    Var q = ops::straight_through(t, z, e);
    Var xr = mlp2(t, q, ps, "dec1", "dec2");
    const Var parts[] = {ops::mse(t, xr, x), ops::mse(t, ops::stop_gradient(t, z), e),
                         ops::mse(t, z, ops::stop_gradient(t, e))};
    const double weights[] = {1.0, 1.0, cfg.commitment};
    Var loss = ops::weighted_sum(t, parts, weights);
    if (trace != nullptr) trace->reconstruction_mse.push_back(t.value(parts[0])(0, 0));
    ps.zero_grad();
    t.backward(loss);
    opt.step(ps);

    if ((step + 1) % epoch_len == 0) {
      for (int k = 0; k < cfg.K; ++k) {
        if (usage[k] == 0) {
          reseed(k);
          if (trace != nullptr) ++trace->reseeded_codes;
        }
      }
      std::fill(usage.begin(), usage.end(), 0);
    }
  }
  return tok;
}

void VisualTokenizer::save(const std::filesystem::path& path) const {
  BinaryWriter w(path);
  w.magic(kTag, kVersion);
  w.i64(cfg_.K);
  w.i64(cfg_.patch);
  w.i64(cfg_.resolution);
  w.i64(cfg_.hidden);
  w.i64(cfg_.code_dim);
  w.i64(cfg_.steps);
  w.i64(cfg_.batch);
  w.f64(cfg_.lr);
  w.f64(cfg_.commitment);
  w.i64(static_cast<std::int64_t>(cfg_.seed));
  w.u32(static_cast<std::uint32_t>(params_->size()));
  for (const auto& p : *params_) {
    w.str(p.name);
    w.matrix(p.value);
  }
  w.close();
}

VisualTokenizer VisualTokenizer::load(const std::filesystem::path& path) {
  BinaryReader r(path);
  r.magic(kTag, kVersion);
  TokenizerConfig cfg;
  cfg.K = static_cast<int>(r.i64());
  cfg.patch = static_cast<int>(r.i64());
  cfg.resolution = static_cast<int>(r.i64());
  cfg.hidden = static_cast<int>(r.i64());
  cfg.code_dim = static_cast<int>(r.i64());
  cfg.steps = static_cast<int>(r.i64());
  cfg.batch = static_cast<int>(r.i64());
  cfg.lr = r.f64();
  cfg.commitment = r.f64();
  cfg.seed = static_cast<std::uint64_t>(r.i64());
  VisualTokenizer tok(cfg);
  const auto n = r.u32();
  if (n != tok.params_->size()) throw DataError("tokenizer checkpoint has unexpected tensor count");
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::string name = r.str();
    Parameter* p = tok.params_->find(name);
    Matrix m = r.matrix();
    if (p == nullptr || !p->value.same_shape(m)) throw DataError("tokenizer checkpoint tensor mismatch: " + name);
    p->value = std::move(m);
  }
  return tok;
}

}  // namespace violet::tokenizer
