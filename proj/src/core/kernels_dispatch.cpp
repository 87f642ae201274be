// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string>

#include "violet/core/errors.hpp"
#include "violet/core/kernels.hpp"

namespace violet::kernels {

#if defined(VIOLET_HAVE_AVX2)
const KernelTable& avx2_table_unchecked();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(VIOLET_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* best_available() {
  if (const auto* t = avx2_table()) return t;
  return &scalar_table();
}

const KernelTable* from_environment() {
  const char* env = std::getenv("VIOLET_KERNELS");
  if (env == nullptr) return best_available();
  const std::string name(env);
  if (name == "scalar") return &scalar_table();
  if (name == "avx2" && avx2_table() != nullptr) return avx2_table();
  return best_available();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{from_environment()};
  return table;
}

}  // namespace

const KernelTable* avx2_table() {
#if defined(VIOLET_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

void use(std::string_view name) {
  if (name == "scalar") {
    current().store(&scalar_table());
  } else if (name == "avx2") {
    const auto* t = avx2_table();
    if (t == nullptr) throw ConfigError("AVX2 kernels are not available on this machine");
    current().store(t);
  } else if (name == "auto") {
    current().store(best_available());
  } else {
    throw ConfigError("unknown kernel set '" + std::string(name) + "'");
  }
}

}  // namespace violet::kernels
