#pragma once

#include "windesign/pair_kernel.hpp"

namespace windesign::detail {

void scalar_pair_kernel_impl(const PairTables& tables, PairCounts& out, KernelWorkspace& ws);
// Defined only when the translation unit is compiled (WINDESIGN_HAVE_AVX2).
void avx2_pair_kernel_impl(const PairTables& tables, PairCounts& out, KernelWorkspace& ws);

}  // namespace windesign::detail
