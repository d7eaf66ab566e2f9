#include "tfcl/schedule.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "tfcl/error.hpp"
#include "tfcl/rng.hpp"

namespace tfcl {

std::string_view to_string(ScheduleMode mode) noexcept {
  return mode == ScheduleMode::b0 ? "B0" : "BH";
}

ScheduleMode parse_schedule_mode(std::string_view name) {
  if (name == "B0" || name == "b0") return ScheduleMode::b0;
  if (name == "BH" || name == "bh") return ScheduleMode::bh;
  fail(ErrorKind::invalid_argument, "schedule mode must be B0 or BH, got '" +
                                        std::string(name) + "'");
}

TaskSchedule::TaskSchedule(std::vector<std::uint32_t> class_order,
                           std::vector<std::pair<std::size_t, std::size_t>> boundaries,
                           ScheduleMode mode, std::uint32_t inc, std::uint64_t seed)
    : class_order_(std::move(class_order)),
      boundaries_(std::move(boundaries)),
      mode_(mode),
      inc_(inc),
      seed_(seed) {
  const std::size_t n = class_order_.size();
  std::size_t expected_start = 0;
  for (const auto& [start, end] : boundaries_) {
    if (start != expected_start || end <= start || end > n)
      fail(ErrorKind::schedule, "task boundaries must be contiguous and non-empty");
    expected_start = end;
  }
  if (expected_start != n) fail(ErrorKind::schedule, "task boundaries must cover class_order");

  task_of_class_.assign(n, 0);
  std::vector<bool> present(n, false);
  for (std::size_t t = 0; t < boundaries_.size(); ++t) {
    for (std::size_t i = boundaries_[t].first; i < boundaries_[t].second; ++i) {
      const auto c = class_order_[i];
      if (c >= n || present[c]) fail(ErrorKind::schedule, "class_order is not a permutation");
      present[c] = true;
      task_of_class_[c] = t + 1;
    }
  }
}

void TaskSchedule::check_task(std::size_t t) const {
  if (t < 1 || t > boundaries_.size())
    fail(ErrorKind::schedule, "task index " + std::to_string(t) + " out of range [1, " +
                                  std::to_string(boundaries_.size()) + "]");
}

std::span<const std::uint32_t> TaskSchedule::task_classes(std::size_t t) const {
  check_task(t);
  const auto [start, end] = boundaries_[t - 1];
  return std::span<const std::uint32_t>(class_order_).subspan(start, end - start);
}

std::span<const std::uint32_t> TaskSchedule::seen_classes(std::size_t t) const {
  check_task(t);
  return std::span<const std::uint32_t>(class_order_).first(boundaries_[t - 1].second);
}

std::size_t TaskSchedule::task_of(std::uint32_t class_id) const {
  if (class_id >= class_order_.size())
    fail(ErrorKind::schedule, "unknown label " + std::to_string(class_id) + " (schedule has " +
                                  std::to_string(class_order_.size()) + " classes)");
  return task_of_class_[class_id];
}

TaskSchedule make_schedule(std::uint32_t num_classes, ScheduleMode mode, std::uint32_t inc,
                           std::uint64_t seed) {
  if (inc < 1) fail(ErrorKind::schedule, "inc must be >= 1");
  if (num_classes < inc)
    fail(ErrorKind::schedule, "num_classes (" + std::to_string(num_classes) +
                                  ") must be >= inc (" + std::to_string(inc) + ")");

  std::vector<std::pair<std::size_t, std::size_t>> boundaries;
  std::size_t start = 0;
  if (mode == ScheduleMode::bh) {
    const std::size_t base = (num_classes + 1) / 2;
    const std::size_t rest = num_classes - base;
    if (rest % inc != 0)
      fail(ErrorKind::schedule, "BH: " + std::to_string(rest) +
                                    " classes after the base task are not divisible by inc " +
                                    std::to_string(inc) + " (remainder " +
                                    std::to_string(rest % inc) + ")");
    boundaries.emplace_back(0, base);
    start = base;
  } else if (num_classes % inc != 0) {
    fail(ErrorKind::schedule, "B0: num_classes " + std::to_string(num_classes) +
                                  " is not divisible by inc " + std::to_string(inc) +
                                  " (remainder " + std::to_string(num_classes % inc) + ")");
  }
  for (; start < num_classes; start += inc) boundaries.emplace_back(start, start + inc);

  std::vector<std::uint32_t> order(num_classes);
  std::iota(order.begin(), order.end(), 0u);
  Xoshiro256 rng(seed);
  fisher_yates_shuffle(std::span<std::uint32_t>(order), rng);
  return TaskSchedule(std::move(order), std::move(boundaries), mode, inc, seed);
}

EmbeddingSet slice_task(const EmbeddingSet& set, const TaskSchedule& schedule, std::size_t t,
                        SliceScope scope) {
  if (t < 1 || t > schedule.num_tasks())
    fail(ErrorKind::schedule, "task index " + std::to_string(t) + " out of range");
  std::vector<std::size_t> rows;
  const auto labels = set.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::size_t owner = schedule.task_of(labels[i]);
    if (scope == SliceScope::current ? owner == t : owner <= t) rows.push_back(i);
  }
  return set.select_rows(rows);
}

std::vector<double> class_marginal(const TaskSchedule& schedule, std::size_t t,
                                   MarginalScope scope) {
  const auto support =
      scope == MarginalScope::train ? schedule.task_classes(t) : schedule.seen_classes(t);
  std::vector<double> p(schedule.num_classes(), 0.0);
  const double mass = 1.0 / static_cast<double>(support.size());
  for (auto c : support) p[c] = mass;
  return p;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    fail(ErrorKind::invalid_argument, "total_variation: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

}  // namespace tfcl
