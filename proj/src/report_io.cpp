#include <algorithm>
#include <cstdio>
#include <sstream>

#include "bytes.hpp"
#include "tfcl/error.hpp"
#include "tfcl/metrics.hpp"

namespace tfcl {

namespace {

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

}  // namespace

std::vector<double> RunReport::per_task_accuracy() const {
  std::vector<double> out;
  out.reserve(tasks.size());
  for (const auto& t : tasks) out.push_back(t.accuracy);
  return out;
}

void finalize(RunReport& report) {
  const auto acc = report.per_task_accuracy();
  report.average_accuracy = average_accuracy(acc);
  report.last_accuracy = acc.back();
}

std::string channels_csv(const ChannelFrequencyTable& table) {
  std::string out = "rank,channel_id,ref_count,cmp_count,cmp_moving_avg\n";
  for (std::size_t r = 0; r < table.permutation.size(); ++r) {
    const auto c = table.permutation[r];
    out += std::to_string(r) + "," + std::to_string(c) + "," +
           std::to_string(table.ref_counts[c]) + "," + std::to_string(table.cmp_counts[c]) +
           "," + fixed(table.cmp_moving_average[r], 6) + "\n";
  }
  return out;
}

std::string per_task_csv(const RunReport& report) {
  std::string out = "task,accuracy\n";
  for (const auto& t : report.tasks)
    out += std::to_string(t.task) + "," + fixed(t.accuracy, 10) + "\n";
  return out;
}

nlohmann::ordered_json to_json(const RunReport& report) {
  nlohmann::ordered_json j;
  j["average_accuracy"] = report.average_accuracy;
  j["last_accuracy"] = report.last_accuracy;
  auto& tasks = j["per_task"] = nlohmann::ordered_json::array();
  for (const auto& t : report.tasks) {
    nlohmann::ordered_json row;
    row["task"] = t.task;
    row["accuracy"] = t.accuracy;
    row["seen_classes"] = t.seen_classes;
    row["train_samples"] = t.train_samples;
    row["test_samples"] = t.test_samples;
    tasks.push_back(std::move(row));
  }
  j["schedule"] = report.schedule;
  j["config"] = report.config;
  if (report.channel_analysis) {
    const auto& c = *report.channel_analysis;
    nlohmann::ordered_json ca;
    ca["threshold_fraction"] = c.threshold_fraction;
    ca["window"] = c.window;
    ca["ref_samples"] = c.ref_samples;
    ca["cmp_samples"] = c.cmp_samples;
    ca["ref_activated_channels"] =
        std::count_if(c.ref_counts.begin(), c.ref_counts.end(), [](auto n) { return n > 0; });
    ca["cmp_activated_channels"] =
        std::count_if(c.cmp_counts.begin(), c.cmp_counts.end(), [](auto n) { return n > 0; });
    j["channel_analysis"] = std::move(ca);
  }
  j["warnings"] = report.warnings;
  return j;
}

std::string to_text(const RunReport& report) {
  std::ostringstream os;
  os << "task  seen_classes  test_samples  accuracy(%)\n";
  for (const auto& t : report.tasks) {
    char line[128];
    std::snprintf(line, sizeof line, "%4zu  %12zu  %12zu  %11.2f\n", t.task, t.seen_classes,
                  t.test_samples, t.accuracy);
    os << line;
  }
  os << "average accuracy: " << fixed(report.average_accuracy, 2) << "\n";
  os << "last accuracy:    " << fixed(report.last_accuracy, 2) << "\n";
  for (const auto& w : report.warnings) os << "warning: " << w << "\n";
  return os.str();
}

void export_report(const RunReport& report, const std::filesystem::path& dir) {
  io::ensure_directory(dir);
  io::write_text(dir / "report.json", to_json(report).dump(2) + "\n");
  io::write_text(dir / "report.txt", to_text(report));
  io::write_text(dir / "per_task.csv", per_task_csv(report));
  if (report.channel_analysis)
    io::write_text(dir / "channels.csv", channels_csv(*report.channel_analysis));
}

}  // namespace tfcl
