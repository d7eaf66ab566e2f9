#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "tfcl/embedding_set.hpp"

namespace tfcl {

/// B0: every task adds `inc` classes. BH: the first task holds the
/// ceiling half of the classes, then `inc` per task.
enum class ScheduleMode { b0, bh };

std::string_view to_string(ScheduleMode mode) noexcept;
ScheduleMode parse_schedule_mode(std::string_view name);

enum class SliceScope { current, seen };
enum class MarginalScope { train, test };

/// Task t (1-based) owns class_order[boundaries[t-1].first, boundaries[t-1].second).
class TaskSchedule {
 public:
  TaskSchedule(std::vector<std::uint32_t> class_order,
               std::vector<std::pair<std::size_t, std::size_t>> boundaries, ScheduleMode mode,
               std::uint32_t inc, std::uint64_t seed);

  std::size_t num_tasks() const noexcept { return boundaries_.size(); }
  std::uint32_t num_classes() const noexcept {
    return static_cast<std::uint32_t>(class_order_.size());
  }
  std::span<const std::uint32_t> class_order() const noexcept { return class_order_; }
  std::span<const std::pair<std::size_t, std::size_t>> boundaries() const noexcept {
    return boundaries_;
  }
  ScheduleMode mode() const noexcept { return mode_; }
  std::uint32_t inc() const noexcept { return inc_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Classes introduced at task t, in class_order order.
  std::span<const std::uint32_t> task_classes(std::size_t t) const;
  /// Classes introduced at tasks 1..t.
  std::span<const std::uint32_t> seen_classes(std::size_t t) const;

  /// 1-based task that introduces `class_id`.
  std::size_t task_of(std::uint32_t class_id) const;

 private:
  void check_task(std::size_t t) const;

  std::vector<std::uint32_t> class_order_;
  std::vector<std::pair<std::size_t, std::size_t>> boundaries_;
  std::vector<std::size_t> task_of_class_;
  ScheduleMode mode_;
  std::uint32_t inc_;
  std::uint64_t seed_;
};

/// class_order is 0..num_classes-1 shuffled by Fisher-Yates on a
/// Xoshiro256(seed) stream (see rng.hpp).
TaskSchedule make_schedule(std::uint32_t num_classes, ScheduleMode mode, std::uint32_t inc,
                           std::uint64_t seed);

/// current: samples of task t only (no replay). seen: samples of tasks 1..t.
EmbeddingSet slice_task(const EmbeddingSet& set, const TaskSchedule& schedule, std::size_t t,
                        SliceScope scope);

/// Probability over all class IDs: train is uniform over task t's classes,
/// test is uniform over every class seen through t.
std::vector<double> class_marginal(const TaskSchedule& schedule, std::size_t t,
                                   MarginalScope scope);

double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace tfcl
