// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <array>
#include <bit>

#include "kernels_internal.hpp"

namespace tfcl::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double dot_f32_f64(const float* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 x = _mm256_loadu_ps(a + i);
    const __m256d x0 = _mm256_cvtps_pd(_mm256_castps256_ps128(x));
    const __m256d x1 = _mm256_cvtps_pd(_mm256_extractf128_ps(x, 1));
    acc0 = _mm256_fmadd_pd(x0, _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(x1, _mm256_loadu_pd(b + i + 4), acc1);
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += static_cast<double>(a[i]) * b[i];
  return sum;
}

double sum_squares_f32(const float* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 x = _mm256_loadu_ps(a + i);
    const __m256d x0 = _mm256_cvtps_pd(_mm256_castps256_ps128(x));
    const __m256d x1 = _mm256_cvtps_pd(_mm256_extractf128_ps(x, 1));
    acc0 = _mm256_fmadd_pd(x0, x0, acc0);
    acc1 = _mm256_fmadd_pd(x1, x1, acc1);
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double v = a[i];
    sum += v * v;
  }
  return sum;
}

double sum_squares_f64(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d x0 = _mm256_loadu_pd(a + i);
    const __m256d x1 = _mm256_loadu_pd(a + i + 4);
    acc0 = _mm256_fmadd_pd(x0, x0, acc0);
    acc1 = _mm256_fmadd_pd(x1, x1, acc1);
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * a[i];
  return sum;
}

void accumulate_f32(double* acc, const float* row, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_cvtps_pd(_mm_loadu_ps(row + i));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), x));
  }
  for (; i < n; ++i) acc[i] += static_cast<double>(row[i]);
}

float max_f32(const float* a, std::size_t n) {
  std::size_t i = 0;
  float m = a[0];
  if (n >= 8) {
    __m256 vm = _mm256_loadu_ps(a);
    for (i = 8; i + 8 <= n; i += 8) vm = _mm256_max_ps(vm, _mm256_loadu_ps(a + i));
    alignas(32) std::array<float, 8> lanes;
    _mm256_store_ps(lanes.data(), vm);
    m = lanes[0];
    for (float v : lanes) m = v > m ? v : m;
  }
  for (; i < n; ++i) m = a[i] > m ? a[i] : m;
  return m;
}

// lane increments for a 4-bit compare mask
constexpr auto kMaskIncrements = [] {
  std::array<std::array<std::uint32_t, 4>, 16> lut{};
  for (unsigned mask = 0; mask < 16; ++mask)
    for (unsigned lane = 0; lane < 4; ++lane) lut[mask][lane] = (mask >> lane) & 1u;
  return lut;
}();

std::size_t count_above(const float* row, double threshold,
                        std::uint32_t* counts, std::size_t n) {
  const __m256d thr = _mm256_set1_pd(threshold);
  std::size_t hits = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_cvtps_pd(_mm_loadu_ps(row + i));
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(x, thr, _CMP_GT_OQ));
    if (mask == 0) continue;
    auto* dst = reinterpret_cast<__m128i*>(counts + i);
    const __m128i inc = _mm_loadu_si128(
        reinterpret_cast<const __m128i*>(kMaskIncrements[static_cast<unsigned>(mask)].data()));
    _mm_storeu_si128(dst, _mm_add_epi32(_mm_loadu_si128(dst), inc));
    hits += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(mask)));
  }
  for (; i < n; ++i) {
    const bool on = static_cast<double>(row[i]) > threshold;
    counts[i] += on ? 1u : 0u;
    hits += on ? 1u : 0u;
  }
  return hits;
}

constexpr KernelTable kAvx2{
    Isa::avx2,      dot_f32_f64, sum_squares_f32, sum_squares_f64,
    accumulate_f32, max_f32,     count_above,
};

}  // namespace

const KernelTable& detail::avx2_table() noexcept { return kAvx2; }

}  // namespace tfcl::simd
