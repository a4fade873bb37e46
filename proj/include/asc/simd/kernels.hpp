#pragma once

// Data-parallel numeric kernels shared by the analyzers.
//
// Every kernel has a scalar reference implementation. Vector variants (AVX2+FMA
// on x86-64, NEON on AArch64) are compiled into separate translation units and
// selected once at runtime from the CPU feature set. Setting ASC_SIMD=scalar in
// the environment forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace asc::simd {

struct KernelTable {
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_squares)(const double* a, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // out[i] = a[i] * b[i]; out may alias a.
  void (*multiply)(const double* a, const double* b, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();

// Vector tables compiled for this target, usable on this CPU. Never contains
// the scalar table.
std::vector<const KernelTable*> vector_kernels();

// The table used by the span helpers below.
const KernelTable& active_kernels();

// Replace the active table (tests and benchmarks). Not thread-safe with
// respect to concurrent kernel calls.
void set_active_kernels(const KernelTable& table);

double dot(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);
void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out);

}  // namespace asc::simd
