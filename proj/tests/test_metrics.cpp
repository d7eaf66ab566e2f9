#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "tfcl/error.hpp"
#include "tfcl/metrics.hpp"
#include "tfcl/transform.hpp"
#include "test_util.hpp"

namespace {

std::vector<std::uint32_t> brute_activated(std::span<const float> row, double frac) {
  float peak = row[0];
  for (float v : row) peak = std::max(peak, v);
  std::vector<std::uint32_t> out;
  for (std::size_t c = 0; c < row.size(); ++c)
    if (static_cast<double>(row[c]) > frac * static_cast<double>(peak))
      out.push_back(static_cast<std::uint32_t>(c));
  return out;
}

tfcl::EmbeddingSet positive_set(std::mt19937_64& gen, std::size_t n, std::size_t dim) {
  std::gamma_distribution<float> g(0.5f, 1.0f);  // skewed, many small channels
  std::vector<float> f(n * dim);
  for (auto& v : f) v = g(gen);
  return tfcl::EmbeddingSet(std::move(f), std::vector<std::uint32_t>(n, 0), dim, "g",
                            tfcl::Split::train);
}

}  // namespace

TEST_CASE("task accuracy counts exact matches in percent") {
  const std::uint32_t pred[] = {0, 1, 2};
  const std::uint32_t truth[] = {0, 9, 2};
  CHECK(tfcl::task_accuracy(pred, truth) == doctest::Approx(66.667).epsilon(1e-5));
  CHECK(tfcl::task_accuracy(truth, truth) == 100.0);
}

TEST_CASE("task accuracy agrees with a counting loop") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + gen() % 200;
    std::vector<std::uint32_t> p(n), t(n);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = gen() % 4;
      t[i] = gen() % 4;
      hits += p[i] == t[i];
    }
    CHECK(tfcl::task_accuracy(p, t) == 100.0 * static_cast<double>(hits) / static_cast<double>(n));
  }
}

TEST_CASE("accuracy input errors") {
  const std::uint32_t a[] = {1, 2};
  const std::uint32_t b[] = {1};
  CHECK_THROWS_AS((void)tfcl::task_accuracy(a, b), tfcl::Error);
  CHECK_THROWS_AS((void)tfcl::task_accuracy({}, {}), tfcl::Error);
  CHECK_THROWS_AS((void)tfcl::average_accuracy({}), tfcl::Error);
}

TEST_CASE("average accuracy is the plain mean") {
  const double acc[] = {90, 80, 70};
  CHECK(tfcl::average_accuracy(acc) == 80.0);
}

TEST_CASE("activated channels use the sample's own maximum") {
  const float row[] = {10.0f, 0.5f, 2.0f};
  CHECK(tfcl::activated_channels(row, 0.1) == std::vector<std::uint32_t>{0, 2});
  const float flat[] = {1.0f, 1.0f};
  CHECK(tfcl::activated_channels(flat, 0.5) == std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("channel counts agree with a brute-force recount") {
  std::mt19937_64 gen(50);
  const auto ref = positive_set(gen, 50, 37);
  const auto cmp = positive_set(gen, 50, 37);
  const auto table = tfcl::channel_activation_frequency(ref, cmp, 0.1, 5);
  std::vector<std::uint32_t> rc(37, 0), cc(37, 0);
  for (std::size_t i = 0; i < 50; ++i) {
    for (auto c : brute_activated(ref.row(i), 0.1)) ++rc[c];
    for (auto c : brute_activated(cmp.row(i), 0.1)) ++cc[c];
  }
  CHECK(table.ref_counts == rc);
  CHECK(table.cmp_counts == cc);
  CHECK(table.ref_samples == 50);
  // permutation sorts by descending reference count, stable on channel id
  for (std::size_t r = 1; r < 37; ++r) {
    const auto a = table.permutation[r - 1], b = table.permutation[r];
    CHECK((rc[a] > rc[b] || (rc[a] == rc[b] && a < b)));
  }
}

TEST_CASE("transformed features activate a superset of the raw channels") {
  std::mt19937_64 gen(51);
  const auto raw = positive_set(gen, 50, 64);
  for (const auto& spec : {tfcl::TransformSpec::log(0.1), tfcl::TransformSpec::power(0.3)}) {
    const auto tf = tfcl::apply_transform(raw, spec);
    std::size_t strictly_more = 0;
    for (std::size_t i = 0; i < 50; ++i) {
      const auto before = tfcl::activated_channels(raw.row(i), 0.1);
      const auto after = tfcl::activated_channels(tf.row(i), 0.1);
      CHECK(std::ranges::includes(after, before));
      strictly_more += after.size() > before.size();
    }
    CHECK(strictly_more > 0);
  }
}

TEST_CASE("centered moving average") {
  const double s[] = {1, 2, 3, 4, 5};
  CHECK(tfcl::centered_moving_average(s, 1) == std::vector<double>{1, 2, 3, 4, 5});
  CHECK(tfcl::centered_moving_average(s, 3) == std::vector<double>{1.5, 2, 3, 4, 4.5});
  // even window leans right: [i-1, i+2]
  CHECK(tfcl::centered_moving_average(s, 4) == std::vector<double>{2, 2.5, 3.5, 4, 4.5});
  CHECK(tfcl::centered_moving_average(s, 25) == std::vector<double>(5, 3.0));
  CHECK_THROWS_AS((void)tfcl::centered_moving_average(s, 0), tfcl::Error);
}

TEST_CASE("channel analysis argument errors") {
  const auto a = testing::make_set({{1, 2}}, {0});
  const auto b = testing::make_set({{1, 2, 3}}, {0});
  CHECK_THROWS_AS((void)tfcl::channel_activation_frequency(a, b, 0.1, 3), tfcl::Error);
  CHECK_THROWS_AS((void)tfcl::channel_activation_frequency(a, a, 0.0, 3), tfcl::Error);
  CHECK_THROWS_AS((void)tfcl::channel_activation_frequency(a, a, 1.0, 3), tfcl::Error);
  CHECK_THROWS_AS((void)tfcl::channel_activation_frequency(a, a, 0.1, 0), tfcl::Error);
}

TEST_CASE("channels csv layout") {
  const auto ref = testing::make_set({{1, 5, 0}, {1, 5, 4}}, {0, 0});
  const auto cmp = testing::make_set({{5, 5, 5}}, {0});
  const auto table = tfcl::channel_activation_frequency(ref, cmp, 0.1, 1);
  CHECK(tfcl::channels_csv(table) ==
        "rank,channel_id,ref_count,cmp_count,cmp_moving_avg\n"
        "0,0,2,1,1.000000\n"
        "1,1,2,1,1.000000\n"
        "2,2,1,1,1.000000\n");
}

TEST_CASE("report finalize and csv") {
  tfcl::RunReport report;
  report.tasks = {{1, 90.0, 10, 100, 50}, {2, 80.0, 20, 200, 50}, {3, 70.0, 30, 300, 50}};
  tfcl::finalize(report);
  CHECK(report.average_accuracy == 80.0);
  CHECK(report.last_accuracy == 70.0);
  CHECK(tfcl::per_task_csv(report) ==
        "task,accuracy\n1,90.0000000000\n2,80.0000000000\n3,70.0000000000\n");
  const auto j = tfcl::to_json(report);
  CHECK(j["average_accuracy"] == 80.0);
  CHECK(j["per_task"].size() == 3);
  CHECK(tfcl::to_text(report).find("80") != std::string::npos);
}
