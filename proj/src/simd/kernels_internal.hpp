#pragma once

#include "asc/simd/kernels.hpp"

namespace asc::simd {

#if defined(__x86_64__) || defined(_M_X64)
#define ASC_SIMD_HAVE_AVX2 1
const KernelTable* avx2_kernels();
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
#define ASC_SIMD_HAVE_NEON 1
const KernelTable* neon_kernels();
#endif

}  // namespace asc::simd
