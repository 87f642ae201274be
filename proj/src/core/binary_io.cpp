// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/core/binary_io.hpp"

#include "violet/core/errors.hpp"

namespace violet {

BinaryWriter::BinaryWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw DataError("cannot open '" + path.string() + "' for writing");
}

void BinaryWriter::raw(const void* p, std::size_t n) {
  out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  if (!out_) throw DataError("write failed on '" + path_.string() + "'");
}

void BinaryWriter::magic(std::string_view tag, std::uint32_t version) {
  raw(tag.data(), tag.size());
  u32(version);
}
void BinaryWriter::u32(std::uint32_t v) { raw(&v, sizeof v); }
void BinaryWriter::i64(std::int64_t v) { raw(&v, sizeof v); }
void BinaryWriter::f64(double v) { raw(&v, sizeof v); }
void BinaryWriter::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  raw(s.data(), s.size());
}
void BinaryWriter::matrix(const Matrix& m) {
  u32(static_cast<std::uint32_t>(m.rows()));
  u32(static_cast<std::uint32_t>(m.cols()));
  raw(m.data(), m.size() * sizeof(double));
}
void BinaryWriter::strings(const std::vector<std::string>& items) {
  u32(static_cast<std::uint32_t>(items.size()));
  for (const auto& s : items) str(s);
}
void BinaryWriter::close() {
  out_.close();
  if (!out_) throw DataError("close failed on '" + path_.string() + "'");
}

BinaryReader::BinaryReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw DataError("cannot open '" + path.string() + "'");
}

void BinaryReader::raw(void* p, std::size_t n) {
  in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n) throw DataError("truncated file '" + path_.string() + "'");
}

std::uint32_t BinaryReader::magic(std::string_view tag, std::uint32_t max_version) {
  std::string got(tag.size(), '\0');
  raw(got.data(), got.size());
  if (got != tag) throw DataError("'" + path_.string() + "' is not a " + std::string(tag) + " file");
  const auto version = u32();
  if (version == 0 || version > max_version) {
    throw DataError("'" + path_.string() + "' has unsupported format version " + std::to_string(version));
  }
  return version;
}
std::uint32_t BinaryReader::u32() {
  std::uint32_t v;
  raw(&v, sizeof v);
  return v;
}
std::int64_t BinaryReader::i64() {
  std::int64_t v;
  raw(&v, sizeof v);
  return v;
}
double BinaryReader::f64() {
  double v;
  raw(&v, sizeof v);
  return v;
}
std::string BinaryReader::str() {
  const auto n = u32();
  if (n > (1u << 28)) throw DataError("corrupt string length in '" + path_.string() + "'");
  std::string s(n, '\0');
  raw(s.data(), n);
  return s;
}
Matrix BinaryReader::matrix() {
  const auto rows = u32();
  const auto cols = u32();
  if (static_cast<std::uint64_t>(rows) * cols > (1ull << 32)) {
    throw DataError("corrupt matrix header in '" + path_.string() + "'");
  }
  Matrix m(static_cast<int>(rows), static_cast<int>(cols));
  raw(m.data(), m.size() * sizeof(double));
  return m;
}
std::vector<std::string> BinaryReader::strings() {
  const auto n = u32();
  std::vector<std::string> out;
  out.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(str());
  return out;
}

}  // namespace violet
