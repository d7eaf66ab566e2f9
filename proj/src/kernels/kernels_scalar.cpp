#include "tfcl/kernels.hpp"

namespace tfcl::simd {
namespace {

double dot_f32_f64(const float* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += static_cast<double>(a[i]) * b[i];
  return sum;
}

double sum_squares_f32(const float* a, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = a[i];
    sum += v * v;
  }
  return sum;
}

double sum_squares_f64(const double* a, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * a[i];
  return sum;
}

void accumulate_f32(double* acc, const float* row, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += static_cast<double>(row[i]);
}

float max_f32(const float* a, std::size_t n) {
  float m = a[0];
  for (std::size_t i = 1; i < n; ++i) m = a[i] > m ? a[i] : m;
  return m;
}

std::size_t count_above(const float* row, double threshold,
                        std::uint32_t* counts, std::size_t n) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool on = static_cast<double>(row[i]) > threshold;
    counts[i] += on ? 1u : 0u;
    hits += on ? 1u : 0u;
  }
  return hits;
}

constexpr KernelTable kScalar{
    Isa::scalar,     dot_f32_f64, sum_squares_f32, sum_squares_f64,
    accumulate_f32, max_f32,     count_above,
};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace tfcl::simd
