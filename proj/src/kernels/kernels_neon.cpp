// AArch64 Advanced SIMD variants. NEON is mandatory on AArch64, so no
// runtime feature probe is needed beyond the build-time architecture check.

#include <arm_neon.h>

#include "kernels_internal.hpp"

namespace tfcl::simd {
namespace {

double dot_f32_f64(const float* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t x = vld1q_f32(a + i);
    acc0 = vfmaq_f64(acc0, vcvt_f64_f32(vget_low_f32(x)), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vcvt_high_f64_f32(x), vld1q_f64(b + i + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += static_cast<double>(a[i]) * b[i];
  return sum;
}

double sum_squares_f32(const float* a, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t x = vld1q_f32(a + i);
    const float64x2_t x0 = vcvt_f64_f32(vget_low_f32(x));
    const float64x2_t x1 = vcvt_high_f64_f32(x);
    acc0 = vfmaq_f64(acc0, x0, x0);
    acc1 = vfmaq_f64(acc1, x1, x1);
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) {
    const double v = a[i];
    sum += v * v;
  }
  return sum;
}

double sum_squares_f64(const double* a, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t x0 = vld1q_f64(a + i);
    const float64x2_t x1 = vld1q_f64(a + i + 2);
    acc0 = vfmaq_f64(acc0, x0, x0);
    acc1 = vfmaq_f64(acc1, x1, x1);
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * a[i];
  return sum;
}

void accumulate_f32(double* acc, const float* row, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t x = vld1q_f32(row + i);
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vcvt_f64_f32(vget_low_f32(x))));
    vst1q_f64(acc + i + 2, vaddq_f64(vld1q_f64(acc + i + 2), vcvt_high_f64_f32(x)));
  }
  for (; i < n; ++i) acc[i] += static_cast<double>(row[i]);
}

float max_f32(const float* a, std::size_t n) {
  std::size_t i = 0;
  float m = a[0];
  if (n >= 4) {
    float32x4_t vm = vld1q_f32(a);
    for (i = 4; i + 4 <= n; i += 4) vm = vmaxq_f32(vm, vld1q_f32(a + i));
    const float lane_max = vmaxvq_f32(vm);
    m = lane_max > m ? lane_max : m;
  }
  for (; i < n; ++i) m = a[i] > m ? a[i] : m;
  return m;
}

std::size_t count_above(const float* row, double threshold,
                        std::uint32_t* counts, std::size_t n) {
  const float64x2_t thr = vdupq_n_f64(threshold);
  const uint32x4_t one = vdupq_n_u32(1);
  std::size_t hits = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t x = vld1q_f32(row + i);
    const uint64x2_t lo = vcgtq_f64(vcvt_f64_f32(vget_low_f32(x)), thr);
    const uint64x2_t hi = vcgtq_f64(vcvt_high_f64_f32(x), thr);
    const uint32x4_t mask = vcombine_u32(vmovn_u64(lo), vmovn_u64(hi));
    const uint32x4_t inc = vandq_u32(mask, one);
    vst1q_u32(counts + i, vaddq_u32(vld1q_u32(counts + i), inc));
    hits += vaddvq_u32(inc);
  }
  for (; i < n; ++i) {
    const bool on = static_cast<double>(row[i]) > threshold;
    counts[i] += on ? 1u : 0u;
    hits += on ? 1u : 0u;
  }
  return hits;
}

constexpr KernelTable kNeon{
    Isa::neon,      dot_f32_f64, sum_squares_f32, sum_squares_f64,
    accumulate_f32, max_f32,     count_above,
};

}  // namespace

const KernelTable& detail::neon_table() noexcept { return kNeon; }

}  // namespace tfcl::simd
