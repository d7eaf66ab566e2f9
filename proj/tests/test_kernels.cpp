#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tfcl/error.hpp"
#include "tfcl/kernels.hpp"

using tfcl::simd::Isa;
using tfcl::simd::KernelTable;

namespace {

struct Buffers {
  std::vector<float> a;
  std::vector<double> b;
};

Buffers random_buffers(std::size_t n, std::mt19937_64& gen, bool with_negatives) {
  std::uniform_real_distribution<float> fa(with_negatives ? -3.0f : 0.0f, 3.0f);
  std::uniform_real_distribution<double> fb(-2.0, 2.0);
  Buffers out{std::vector<float>(n), std::vector<double>(n)};
  for (auto& v : out.a) v = fa(gen);
  for (auto& v : out.b) v = fb(gen);
  return out;
}

bool close(double x, double y) {
  return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
}

}  // namespace

TEST_CASE("scalar table is always available and listed first") {
  const auto isas = tfcl::simd::available_isas();
  REQUIRE(!isas.empty());
  CHECK(isas.front() == Isa::scalar);
  CHECK(tfcl::simd::kernels_for(Isa::scalar) == &tfcl::simd::scalar_kernels());
  MESSAGE("active kernels: " << tfcl::simd::to_string(tfcl::simd::active_kernels().isa));
}

TEST_CASE("every available variant matches the scalar reference") {
  const KernelTable& ref = tfcl::simd::scalar_kernels();
  std::mt19937_64 gen(2024);
  for (Isa isa : tfcl::simd::available_isas()) {
    const KernelTable& k = *tfcl::simd::kernels_for(isa);
    CAPTURE(tfcl::simd::to_string(isa));
    for (std::size_t n = 0; n <= 70; ++n) {
      CAPTURE(n);
      auto buf = random_buffers(n, gen, n % 2 == 0);

      CHECK(close(k.dot_f32_f64(buf.a.data(), buf.b.data(), n),
                  ref.dot_f32_f64(buf.a.data(), buf.b.data(), n)));
      CHECK(close(k.sum_squares_f32(buf.a.data(), n), ref.sum_squares_f32(buf.a.data(), n)));
      CHECK(close(k.sum_squares_f64(buf.b.data(), n), ref.sum_squares_f64(buf.b.data(), n)));

      std::vector<double> acc_k(buf.b), acc_r(buf.b);
      k.accumulate_f32(acc_k.data(), buf.a.data(), n);
      ref.accumulate_f32(acc_r.data(), buf.a.data(), n);
      CHECK(acc_k == acc_r);

      if (n == 0) continue;
      CHECK(k.max_f32(buf.a.data(), n) == ref.max_f32(buf.a.data(), n));

      for (double thr : {-1.0, 0.0, 0.5, 1.7, 10.0}) {
        std::vector<std::uint32_t> ck(n, 3), cr(n, 3);
        const auto hk = k.count_above(buf.a.data(), thr, ck.data(), n);
        const auto hr = ref.count_above(buf.a.data(), thr, cr.data(), n);
        CHECK(hk == hr);
        CHECK(ck == cr);
      }
    }
  }
}

TEST_CASE("count_above compares strictly in double precision") {
  const float row[] = {1.0f, 0.1f, 2.0f, 0.5f, 1.0f};
  for (Isa isa : tfcl::simd::available_isas()) {
    const KernelTable& k = *tfcl::simd::kernels_for(isa);
    std::vector<std::uint32_t> counts(5, 0);
    CHECK(k.count_above(row, 1.0, counts.data(), 5) == 1);
    CHECK(counts == std::vector<std::uint32_t>{0, 0, 1, 0, 0});
  }
}

TEST_CASE("select_isa switches the active table and rejects unknown names") {
  const Isa before = tfcl::simd::active_kernels().isa;
  tfcl::simd::select_isa(Isa::scalar);
  CHECK(tfcl::simd::active_kernels().isa == Isa::scalar);
  tfcl::simd::select_isa(before);
  CHECK(tfcl::simd::active_kernels().isa == before);
  CHECK_THROWS_AS(tfcl::simd::parse_isa("sse9"), tfcl::Error);
#if !defined(__aarch64__)
  CHECK_THROWS_AS(tfcl::simd::select_isa(Isa::neon), tfcl::Error);
#endif
}
