// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "violet/core/parameters.hpp"
#include "violet/core/tape.hpp"

namespace violet::text {

// Reserved ids occupy the head of every vocabulary.
inline constexpr int kPad = 0;
inline constexpr int kUnk = 1;
inline constexpr int kCls = 2;
inline constexpr int kSep = 3;
inline constexpr int kMask = 4;
inline constexpr int kBlank = 5;
inline constexpr int kNumReserved = 6;

/// Continuation pieces carry this prefix, as in WordPiece.
inline constexpr std::string_view kContinuation = "##";

class Vocabulary {
 public:
  Vocabulary() = default;

  /// Greedy pair merges over the corpus words (most frequent pair first, ties
  /// to the lexicographically smallest) until `size` entries or no pair is left.
  static Vocabulary build(std::span<const std::string> corpus, int size);
  /// Takes an explicit token list; the reserved tokens must lead it in order.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  static Vocabulary load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  int size() const noexcept { return static_cast<int>(tokens_.size()); }
  /// -1 when absent.
  int id(std::string_view token) const;
  const std::string& token(int id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  static bool is_special(int id) noexcept { return id >= 0 && id < kNumReserved; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

const std::vector<std::string>& reserved_tokens();

struct TextSequence {
  std::vector<int> ids;
  std::vector<char> valid;  // attention flags; false for [PAD]

  int size() const noexcept { return static_cast<int>(ids.size()); }
};

/// Whitespace split with punctuation as separate words; bracketed reserved
/// tokens such as "[BLANK]" are kept whole.
std::vector<std::string> split_words(std::string_view text);

/// Greedy longest-match subwording. Words that cannot be covered become [UNK].
TextSequence tokenize_text(std::string_view text, const Vocabulary& vocab);
std::string detokenize(std::span<const int> ids, const Vocabulary& vocab);

/// Pads with [PAD] (valid = false) or truncates to exactly `length`.
TextSequence pad_to(TextSequence seq, int length);

/// Lookup of rows of `table` (V x d).
Var embed_text(Tape& t, std::span<const int> ids, Parameter& table);

}  // namespace violet::text
