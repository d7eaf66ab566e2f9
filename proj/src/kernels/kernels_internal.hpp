#pragma once

#include "tfcl/kernels.hpp"

namespace tfcl::simd::detail {

const KernelTable& avx2_table() noexcept;
const KernelTable& neon_table() noexcept;

}  // namespace tfcl::simd::detail
