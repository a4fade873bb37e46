#include <cassert>
#include <cstdlib>
#include <string_view>

#include "asc/simd/kernels.hpp"
#include "kernels_internal.hpp"

namespace asc::simd {
namespace {

bool cpu_has_avx2() {
#if defined(ASC_SIMD_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* select_kernels() {
  if (const char* forced = std::getenv("ASC_SIMD"); forced && std::string_view(forced) == "scalar") {
    return &scalar_kernels();
  }
  const auto tables = vector_kernels();
  return tables.empty() ? &scalar_kernels() : tables.front();
}

const KernelTable*& active_slot() {
  static const KernelTable* table = select_kernels();
  return table;
}

}  // namespace

std::vector<const KernelTable*> vector_kernels() {
  std::vector<const KernelTable*> tables;
#ifdef ASC_SIMD_HAVE_AVX2
  if (cpu_has_avx2()) tables.push_back(avx2_kernels());
#endif
#ifdef ASC_SIMD_HAVE_NEON
  tables.push_back(neon_kernels());
#endif
  return tables;
}

const KernelTable& active_kernels() { return *active_slot(); }

void set_active_kernels(const KernelTable& table) { active_slot() = &table; }

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active_kernels().dot(a.data(), b.data(), a.size());
}

double sum_squares(std::span<const double> a) {
  return active_kernels().sum_squares(a.data(), a.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active_kernels().squared_distance(a.data(), b.data(), a.size());
}

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  assert(a.size() == b.size() && out.size() == a.size());
  active_kernels().multiply(a.data(), b.data(), out.data(), a.size());
}

}  // namespace asc::simd
