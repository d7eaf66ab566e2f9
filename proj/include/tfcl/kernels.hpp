#pragma once

// Inner-loop kernels with a scalar reference and vectorized variants chosen
// at runtime. Reductions (dot, sum_squares) may differ from the scalar
// reference by floating-point reassociation; element-wise kernels and
// comparisons (accumulate, max, count_above) are bit-identical across
// variants.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace tfcl::simd {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
  Isa isa;

  // sum_i double(a[i]) * b[i]
  double (*dot_f32_f64)(const float* a, const double* b, std::size_t n);
  // sum_i double(a[i])^2
  double (*sum_squares_f32)(const float* a, std::size_t n);
  double (*sum_squares_f64)(const double* a, std::size_t n);
  // acc[i] += double(row[i])
  void (*accumulate_f32)(double* acc, const float* row, std::size_t n);
  // max_i a[i]; n >= 1, no NaNs
  float (*max_f32)(const float* a, std::size_t n);
  // counts[i] += (double(row[i]) > threshold); returns the number of hits
  std::size_t (*count_above)(const float* row, double threshold,
                             std::uint32_t* counts, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;

/// Variant table for `isa`, or nullptr when it was not compiled in or the
/// running CPU lacks the instructions.
const KernelTable* kernels_for(Isa isa) noexcept;

/// Every ISA usable on this machine, scalar first.
std::vector<Isa> available_isas();

/// The table used by the library. Defaults to the widest available ISA;
/// the TFCL_ISA environment variable (scalar|avx2|neon) overrides it.
const KernelTable& active_kernels() noexcept;

/// Throws tfcl::Error if `isa` is not available.
void select_isa(Isa isa);

Isa parse_isa(std::string_view name);

// Convenience wrappers over the active table.
inline double dot(std::span<const float> a, std::span<const double> b) {
  return active_kernels().dot_f32_f64(a.data(), b.data(), a.size());
}
inline double sum_squares(std::span<const float> a) {
  return active_kernels().sum_squares_f32(a.data(), a.size());
}
inline double sum_squares(std::span<const double> a) {
  return active_kernels().sum_squares_f64(a.data(), a.size());
}

}  // namespace tfcl::simd
