#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tfcl/embedding_set.hpp"

namespace tfcl {

/// Top-1 accuracy in percent.
double task_accuracy(std::span<const std::uint32_t> predictions,
                     std::span<const std::uint32_t> truth);

/// Mean of per-task accuracies (percent).
double average_accuracy(std::span<const double> per_task);

inline constexpr double kDefaultActivationThreshold = 0.1;
inline constexpr std::size_t kDefaultMovingAverageWindow = 25;

/// Channels of one sample whose value exceeds threshold_fraction times the
/// sample's own maximum channel value, ascending.
std::vector<std::uint32_t> activated_channels(std::span<const float> row,
                                              double threshold_fraction);

struct ChannelFrequencyTable {
  double threshold_fraction = kDefaultActivationThreshold;
  std::size_t window = kDefaultMovingAverageWindow;
  std::size_t ref_samples = 0;
  std::size_t cmp_samples = 0;
  // indexed by channel id
  std::vector<std::uint32_t> ref_counts;
  std::vector<std::uint32_t> cmp_counts;
  // rank -> channel id, descending ref count (ties: lower channel id first)
  std::vector<std::uint32_t> permutation;
  // indexed by rank: centered moving average of cmp counts along the permutation
  std::vector<double> cmp_moving_average;
};

ChannelFrequencyTable channel_activation_frequency(const EmbeddingSet& ref,
                                                   const EmbeddingSet& cmp,
                                                   double threshold_fraction,
                                                   std::size_t ma_window);

/// Centered moving average; the window covers [i - (w-1)/2, i + w/2],
/// truncated at both ends.
std::vector<double> centered_moving_average(std::span<const double> series, std::size_t window);

/// columns: rank,channel_id,ref_count,cmp_count,cmp_moving_avg
std::string channels_csv(const ChannelFrequencyTable& table);

struct TaskResult {
  std::size_t task = 0;  // 1-based
  double accuracy = 0.0;
  std::size_t seen_classes = 0;
  std::size_t test_samples = 0;
  std::size_t train_samples = 0;
};

struct RunReport {
  std::vector<TaskResult> tasks;
  double average_accuracy = 0.0;
  double last_accuracy = 0.0;
  nlohmann::ordered_json config;
  std::vector<std::vector<std::uint32_t>> schedule;  // class IDs per task
  std::optional<ChannelFrequencyTable> channel_analysis;
  std::vector<std::string> warnings;

  std::vector<double> per_task_accuracy() const;
};

/// Fills average_accuracy and last_accuracy from the task list.
void finalize(RunReport& report);

nlohmann::ordered_json to_json(const RunReport& report);
std::string to_text(const RunReport& report);
/// columns: task,accuracy
std::string per_task_csv(const RunReport& report);

/// Writes report.json, report.txt, per_task.csv and, when present, channels.csv.
void export_report(const RunReport& report, const std::filesystem::path& dir);

}  // namespace tfcl
