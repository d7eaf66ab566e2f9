#include "tfcl/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "tfcl/error.hpp"
#include "tfcl/kernels.hpp"

namespace tfcl {

double task_accuracy(std::span<const std::uint32_t> predictions,
                     std::span<const std::uint32_t> truth) {
  if (predictions.size() != truth.size())
    fail(ErrorKind::invalid_argument, "accuracy: prediction/truth length mismatch");
  if (truth.empty()) fail(ErrorKind::invalid_argument, "accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predictions[i] == truth[i] ? 1 : 0;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(truth.size());
}

double average_accuracy(std::span<const double> per_task) {
  if (per_task.empty()) fail(ErrorKind::invalid_argument, "average accuracy of an empty list");
  return std::accumulate(per_task.begin(), per_task.end(), 0.0) /
         static_cast<double>(per_task.size());
}

namespace {

// Adds one sample's activations into counts.
void count_sample(std::span<const float> row, double threshold_fraction,
                  std::uint32_t* counts) {
  const auto& k = simd::active_kernels();
  const double peak = k.max_f32(row.data(), row.size());
  k.count_above(row.data(), threshold_fraction * peak, counts, row.size());
}

std::vector<std::uint32_t> count_set(const EmbeddingSet& set, double threshold_fraction) {
  std::vector<std::uint32_t> counts(set.dim(), 0);
  for (std::size_t i = 0; i < set.num_samples(); ++i)
    count_sample(set.row(i), threshold_fraction, counts.data());
  return counts;
}

}  // namespace

std::vector<std::uint32_t> activated_channels(std::span<const float> row,
                                              double threshold_fraction) {
  if (row.empty()) return {};
  std::vector<std::uint32_t> hits(row.size(), 0);
  count_sample(row, threshold_fraction, hits.data());
  std::vector<std::uint32_t> out;
  for (std::size_t c = 0; c < hits.size(); ++c)
    if (hits[c] != 0) out.push_back(static_cast<std::uint32_t>(c));
  return out;
}

std::vector<double> centered_moving_average(std::span<const double> series,
                                            std::size_t window) {
  if (window < 1) fail(ErrorKind::invalid_argument, "moving-average window must be >= 1");
  const std::size_t n = series.size();
  const std::size_t left = (window - 1) / 2;
  const std::size_t right = window / 2;
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + series[i];
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= left ? i - left : 0;
    const std::size_t hi = std::min(n, i + right + 1);
    out[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
  }
  return out;
}

ChannelFrequencyTable channel_activation_frequency(const EmbeddingSet& ref,
                                                   const EmbeddingSet& cmp,
                                                   double threshold_fraction,
                                                   std::size_t ma_window) {
  if (ref.dim() != cmp.dim())
    fail(ErrorKind::validation, "channel analysis: dim mismatch (" + std::to_string(ref.dim()) +
                                    " vs " + std::to_string(cmp.dim()) + ")");
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0))
    fail(ErrorKind::invalid_argument, "channel analysis: threshold must lie in (0, 1)");
  if (ma_window < 1) fail(ErrorKind::invalid_argument, "channel analysis: window must be >= 1");

  ChannelFrequencyTable table;
  table.threshold_fraction = threshold_fraction;
  table.window = ma_window;
  table.ref_samples = ref.num_samples();
  table.cmp_samples = cmp.num_samples();
  table.ref_counts = count_set(ref, threshold_fraction);
  table.cmp_counts = count_set(cmp, threshold_fraction);

  table.permutation.resize(ref.dim());
  std::iota(table.permutation.begin(), table.permutation.end(), 0u);
  std::stable_sort(table.permutation.begin(), table.permutation.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return table.ref_counts[a] > table.ref_counts[b];
                   });

  std::vector<double> sorted_cmp(ref.dim());
  for (std::size_t r = 0; r < sorted_cmp.size(); ++r)
    sorted_cmp[r] = table.cmp_counts[table.permutation[r]];
  table.cmp_moving_average = centered_moving_average(sorted_cmp, ma_window);
  return table;
}

}  // namespace tfcl
