// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/text/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>

#include "violet/core/errors.hpp"
#include "violet/core/ops.hpp"

namespace violet::text {

namespace {

bool is_punct(unsigned char c) { return std::ispunct(c) != 0; }

std::string strip_continuation(const std::string& s) {
  return s.starts_with(kContinuation) ? s.substr(kContinuation.size()) : s;
}

}  // namespace

const std::vector<std::string>& reserved_tokens() {
  static const std::vector<std::string> names = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "[BLANK]"};
  return names;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      flush();
      continue;
    }
    if (c == '[') {
      bool matched = false;
      for (const auto& r : reserved_tokens()) {
        if (text.substr(i, r.size()) == r) {
          flush();
          out.push_back(r);
          i += r.size() - 1;
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    if (is_punct(c)) {
      flush();
      out.emplace_back(1, static_cast<char>(c));
      continue;
    }
    cur.push_back(static_cast<char>(c));
  }
  flush();
  return out;
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  const auto& reserved = reserved_tokens();
  if (tokens.size() < reserved.size() || !std::equal(reserved.begin(), reserved.end(), tokens.begin())) {
    throw ConfigError("vocabulary must start with the reserved tokens");
  }
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
    if (v.tokens_[i].empty()) throw ConfigError("vocabulary contains an empty token");
    if (!v.index_.emplace(v.tokens_[i], static_cast<int>(i)).second) {
      throw ConfigError("duplicate vocabulary token: " + v.tokens_[i]);
    }
  }
  return v;
}

Vocabulary Vocabulary::build(std::span<const std::string> corpus, int size) {
  if (corpus.empty()) throw InputError("build_vocab: empty corpus");
  std::map<std::string, long> word_counts;
  for (const auto& line : corpus) {
    for (auto& w : split_words(line)) {
      if (std::find(reserved_tokens().begin(), reserved_tokens().end(), w) != reserved_tokens().end()) continue;
      ++word_counts[w];
    }
  }
  // Every word starts as its characters: "c", "##c", "##c", ...
  std::vector<std::pair<std::vector<std::string>, long>> words;
  std::set<std::string> alphabet;
  for (const auto& [w, n] : word_counts) {
    std::vector<std::string> sym;
    for (std::size_t i = 0; i < w.size(); ++i) {
      sym.push_back(i == 0 ? std::string(1, w[i]) : std::string(kContinuation) + w[i]);
      alphabet.insert(sym.back());
    }
    words.emplace_back(std::move(sym), n);
  }
  const int minimum = kNumReserved + static_cast<int>(alphabet.size());
  if (size < minimum) {
    throw ConfigError("vocabulary size " + std::to_string(size) + " below reserved + alphabet (" +
                      std::to_string(minimum) + ")");
  }
  std::vector<std::string> tokens = reserved_tokens();
  tokens.insert(tokens.end(), alphabet.begin(), alphabet.end());
  std::set<std::string> present(tokens.begin(), tokens.end());

  while (static_cast<int>(tokens.size()) < size) {
    std::map<std::pair<std::string, std::string>, long> pairs;
    for (const auto& [sym, n] : words)
      for (std::size_t i = 0; i + 1 < sym.size(); ++i) pairs[{sym[i], sym[i + 1]}] += n;
    if (pairs.empty()) break;
    // std::map iterates in lexicographic order, so the first maximum wins ties.
    auto best = pairs.begin();
    for (auto it = pairs.begin(); it != pairs.end(); ++it)
      if (it->second > best->second) best = it;
    const auto [a, b] = best->first;
    const std::string merged = a + strip_continuation(b);
    for (auto& [sym, n] : words) {
      std::vector<std::string> next;
      for (std::size_t i = 0; i < sym.size(); ++i) {
        if (i + 1 < sym.size() && sym[i] == a && sym[i + 1] == b) {
          next.push_back(merged);
          ++i;
        } else {
          next.push_back(sym[i]);
        }
      }
      sym = std::move(next);
    }
    if (present.insert(merged).second) tokens.push_back(merged);
  }
  return from_tokens(std::move(tokens));
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary: " + path.string());
  std::vector<std::string> tokens;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  try {
    return from_tokens(std::move(tokens));
  } catch (const ConfigError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write vocabulary: " + path.string());
  for (const auto& t : tokens_) out << t << '\n';
}

int Vocabulary::id(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  return it == index_.end() ? -1 : it->second;
}

TextSequence tokenize_text(std::string_view text, const Vocabulary& vocab) {
  TextSequence seq;
  for (const auto& word : split_words(text)) {
    if (const int special = vocab.id(word); special >= 0 && Vocabulary::is_special(special)) {
      seq.ids.push_back(special);
      continue;
    }
    std::vector<int> pieces;
    std::size_t start = 0;
    bool ok = true;
    while (start < word.size()) {
      int found = -1;
      std::size_t end = word.size();
      for (; end > start; --end) {
        std::string piece = word.substr(start, end - start);
        if (start > 0) piece = std::string(kContinuation) + piece;
        found = vocab.id(piece);
        if (found >= kNumReserved) break;
        found = -1;
      }
      if (found < 0) {
        ok = false;
        break;
      }
      pieces.push_back(found);
      start = end;
    }
    if (ok) {
      seq.ids.insert(seq.ids.end(), pieces.begin(), pieces.end());
    } else {
      seq.ids.push_back(kUnk);
    }
  }
  seq.valid.assign(seq.ids.size(), 1);
  return seq;
}

std::string detokenize(std::span<const int> ids, const Vocabulary& vocab) {
  std::string out;
  for (int id : ids) {
    if (id == kPad) continue;
    const std::string& tok = vocab.token(id);
    if (!Vocabulary::is_special(id) && tok.starts_with(kContinuation)) {
      out += tok.substr(kContinuation.size());
      continue;
    }
    if (!out.empty()) out += ' ';
    out += tok;
  }
  return out;
}

TextSequence pad_to(TextSequence seq, int length) {
  seq.ids.resize(length, kPad);
  seq.valid.resize(length, 0);
  return seq;
}

Var embed_text(Tape& t, std::span<const int> ids, Parameter& table) {
  for (int id : ids) {
    if (id < 0 || id >= table.value.rows()) throw InputError("token id " + std::to_string(id) + " out of range");
  }
  return ops::gather_rows(t, t.param(table), std::vector<int>(ids.begin(), ids.end()));
}

}  // namespace violet::text
