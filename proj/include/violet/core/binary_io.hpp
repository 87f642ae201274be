// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "violet/core/matrix.hpp"

namespace violet {

// Host-endian binary streams for checkpoints. Doubles are written as raw
// IEEE-754 bits so a save/load round trip is bit-exact.

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::filesystem::path& path);

  void magic(std::string_view tag, std::uint32_t version);
  void u32(std::uint32_t v);
  void i64(std::int64_t v);
  void f64(double v);
  void str(std::string_view s);
  void matrix(const Matrix& m);
  void strings(const std::vector<std::string>& items);
  void close();

 private:
  void raw(const void* p, std::size_t n);
  std::filesystem::path path_;
  std::ofstream out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path);

  /// Checks the tag and returns the stored version; throws DataError when the
  /// tag differs or the version is newer than `max_version`.
  std::uint32_t magic(std::string_view tag, std::uint32_t max_version);
  std::uint32_t u32();
  std::int64_t i64();
  double f64();
  std::string str();
  Matrix matrix();
  std::vector<std::string> strings();

 private:
  void raw(void* p, std::size_t n);
  std::filesystem::path path_;
  std::ifstream in_;
};

}  // namespace violet
