#include "tfcl/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

#include "bytes.hpp"
#include "tfcl/error.hpp"
#include "tfcl/prototype_bank.hpp"

namespace tfcl {

namespace {

std::uint64_t fingerprint(const EmbeddingSet& set) {
  // FNV-1a over the raw feature bytes
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto bytes = std::as_bytes(set.features());
  for (auto b : bytes) {
    h ^= static_cast<std::uint64_t>(b);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint32_t resolve_num_classes(std::span<const BackboneData> backbones,
                                  const std::optional<std::uint32_t>& requested) {
  if (requested) {
    for (const auto& b : backbones) {
      validate_labels(b.train, *requested);
      validate_labels(b.test, *requested);
    }
    return *requested;
  }
  std::uint32_t bound = 0;
  for (const auto& b : backbones)
    bound = std::max({bound, b.train.label_bound(), b.test.label_bound()});
  return bound;
}

void check_backbones(std::span<const BackboneData> backbones, bool ensemble) {
  if (backbones.empty() || backbones.size() > 2)
    fail(ErrorKind::invalid_argument, "pipeline needs 1 or 2 backbones");
  if (ensemble != (backbones.size() == 2))
    fail(ErrorKind::invalid_argument, "ensemble flag requires exactly 2 backbones");
  for (std::size_t b = 0; b < backbones.size(); ++b) {
    const auto& data = backbones[b];
    if (data.train.dim() != data.test.dim())
      fail(ErrorKind::validation, "backbone " + std::to_string(b) + ": train dim " +
                                      std::to_string(data.train.dim()) + " != test dim " +
                                      std::to_string(data.test.dim()));
    validate(data.transform);
  }
  if (ensemble && !std::ranges::equal(backbones[0].test.labels(), backbones[1].test.labels()))
    fail(ErrorKind::validation,
         "ensemble: test label sequences differ between backbones (samples must align)");
}

TaskSchedule build_schedule(std::span<const BackboneData> backbones,
                            const PipelineOptions& options) {
  const auto num_classes = resolve_num_classes(backbones, options.num_classes);
  if (num_classes == 0) fail(ErrorKind::validation, "no labeled samples");
  auto schedule = make_schedule(num_classes, options.schedule.mode, options.schedule.inc,
                                options.schedule.seed);

  for (std::size_t b = 0; b < backbones.size(); ++b) {
    std::vector<bool> has_train(num_classes, false);
    for (auto y : backbones[b].train.labels()) has_train[y] = true;
    for (std::uint32_t c = 0; c < num_classes; ++c)
      if (!has_train[c])
        fail(ErrorKind::schedule, "backbone " + std::to_string(b) + ": class " +
                                      std::to_string(c) + " has no training samples");
  }
  return schedule;
}

EmbeddingSet transformed_training_slice(const BackboneData& data, const TaskSchedule& schedule,
                                        std::size_t t) {
  auto slice = slice_task(data.train, schedule, t, SliceScope::current);
  for (auto y : slice.labels())
    if (schedule.task_of(y) != t)
      fail(ErrorKind::internal, "replay audit: task " + std::to_string(t) +
                                    " training slice contains class " + std::to_string(y));
  return apply_transform(slice, data.transform);
}

std::size_t resolve_task(std::size_t task, const TaskSchedule& schedule, const char* what) {
  if (task < 1 || task > schedule.num_tasks())
    fail(ErrorKind::config, std::string("channel analysis ") + what + " " +
                                std::to_string(task) + " outside [1, " +
                                std::to_string(schedule.num_tasks()) + "]");
  return task;
}

ChannelFrequencyTable channel_table(std::span<const BackboneData> backbones,
                                    const TaskSchedule& schedule,
                                    const ChannelAnalysisRequest& req) {
  const auto ref = resolve_task(req.ref_task, schedule, "ref_task");
  const auto cmp = resolve_task(req.cmp_task.value_or(schedule.num_tasks()), schedule, "cmp_task");
  return channel_activation_frequency(transformed_training_slice(backbones[0], schedule, ref),
                                      transformed_training_slice(backbones[0], schedule, cmp),
                                      req.threshold, req.window);
}

std::string task_dir_name(std::size_t t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "task_%03zu", t);
  return buf;
}

}  // namespace

std::vector<BackboneData> load_backbones(const RunConfig& config) {
  std::vector<BackboneData> out;
  for (const auto& b : config.backbones) {
    auto train = load_embedding_set(b.features.train, config.num_classes);
    auto test = load_embedding_set(b.features.test, config.num_classes);
    if (b.concat) {
      train = concat_features(train, load_embedding_set(b.concat->train, config.num_classes));
      test = concat_features(test, load_embedding_set(b.concat->test, config.num_classes));
    }
    out.push_back({std::move(train), std::move(test), b.transform});
  }
  return out;
}

RunReport run_pipeline(std::span<const BackboneData> backbones, const PipelineOptions& options) {
  check_backbones(backbones, options.ensemble);
  const auto schedule = build_schedule(backbones, options);

  std::vector<std::uint64_t> test_prints;
  std::vector<EmbeddingSet> test_features;
  for (const auto& b : backbones) {
    test_prints.push_back(fingerprint(b.test));
    test_features.push_back(apply_transform(b.test, b.transform));
  }

  RunReport report;
  for (std::size_t t = 1; t <= schedule.num_tasks(); ++t) {
    auto tc = schedule.task_classes(t);
    report.schedule.emplace_back(tc.begin(), tc.end());
  }

  std::vector<PrototypeBank> banks(backbones.size());
  std::vector<std::string> flagged;
  const auto truth_all = backbones[0].test.labels();

  for (std::size_t t = 1; t <= schedule.num_tasks(); ++t) {
    TaskResult result;
    result.task = t;
    result.seen_classes = schedule.seen_classes(t).size();

    for (std::size_t b = 0; b < backbones.size(); ++b) {
      const auto slice = transformed_training_slice(backbones[b], schedule, t);
      if (b == 0) result.train_samples = slice.num_samples();
      banks[b].add_classes(slice);
      for (auto c : banks[b].degenerate_classes()) {
        std::string msg = "backbone " + std::to_string(b) + ": class " + std::to_string(c) +
                          " has a zero-norm prototype; it scores 0";
        if (std::ranges::find(flagged, msg) == flagged.end()) {
          flagged.push_back(msg);
          report.warnings.push_back(msg);
        }
      }
    }

    std::vector<std::uint32_t> predictions;
    std::vector<std::uint32_t> truth;
    for (std::size_t i = 0; i < truth_all.size(); ++i) {
      if (schedule.task_of(truth_all[i]) > t) continue;
      const auto p = options.ensemble
                         ? predict_ensemble(banks[0], banks[1], test_features[0].row(i),
                                            test_features[1].row(i))
                         : predict(banks[0], test_features[0].row(i));
      predictions.push_back(p.label);
      truth.push_back(truth_all[i]);
    }
    if (truth.empty())
      fail(ErrorKind::schedule, "task " + std::to_string(t) + ": no test samples for seen classes");
    result.test_samples = truth.size();
    result.accuracy = task_accuracy(predictions, truth);
    report.tasks.push_back(result);

    if (options.bank_dir) {
      for (std::size_t b = 0; b < banks.size(); ++b)
        save_bank(banks[b],
                  *options.bank_dir / task_dir_name(t) / ("backbone_" + std::to_string(b)));
    }
  }

  for (std::size_t b = 0; b < backbones.size(); ++b)
    if (fingerprint(backbones[b].test) != test_prints[b])
      fail(ErrorKind::internal, "frozen-feature audit: test features were modified");

  if (options.channel_analysis)
    report.channel_analysis = channel_table(backbones, schedule, *options.channel_analysis);

  finalize(report);
  return report;
}

ChannelFrequencyTable analyze_channels(std::span<const BackboneData> backbones,
                                       const PipelineOptions& options) {
  check_backbones(backbones, options.ensemble);
  const auto schedule = build_schedule(backbones, options);
  return channel_table(backbones, schedule,
                       options.channel_analysis.value_or(ChannelAnalysisRequest{}));
}

namespace {

PipelineOptions options_from(const RunConfig& config) {
  PipelineOptions options;
  options.schedule = config.schedule;
  options.num_classes = config.num_classes;
  options.ensemble = config.ensemble;
  options.channel_analysis = config.channel_analysis;
  if (config.save_banks) options.bank_dir = config.output_dir / "banks";
  return options;
}

}  // namespace

RunReport run(const RunConfig& config) {
  validate(config);
  const auto backbones = load_backbones(config);
  auto report = run_pipeline(backbones, options_from(config));
  report.config = to_json(config);
  return report;
}

std::vector<SweepPoint> canonical_order(std::vector<SweepPoint> points) {
  auto key = [](const SweepPoint& p) {
    const double param = p.transform.family == TransformFamily::log     ? p.transform.eta
                         : p.transform.family == TransformFamily::power ? p.transform.kappa
                                                                        : 0.0;
    return std::pair(static_cast<int>(p.transform.family), param);
  };
  std::ranges::sort(points, [&](const auto& a, const auto& b) { return key(a) < key(b); });
  points.erase(std::unique(points.begin(), points.end(),
                           [&](const auto& a, const auto& b) { return key(a) == key(b); }),
               points.end());
  return points;
}

std::vector<SweepPoint> parse_sweep_grid(std::string_view grid) {
  std::vector<SweepPoint> points;
  auto split = [](std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (start <= s.size()) {
      const auto end = std::min(s.find(sep, start), s.size());
      auto part = s.substr(start, end - start);
      while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
      while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
      if (!part.empty()) parts.push_back(part);
      start = end + 1;
    }
    return parts;
  };
  auto number = [](std::string_view text) {
    std::string s(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size()) fail(ErrorKind::config, "sweep grid: bad number '" + s + "'");
    return v;
  };
  auto label = [](const char* prefix, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s=%g", prefix, v);
    return std::string(buf);
  };

  for (auto term : split(grid, ';')) {
    if (term == "bl" || term == "B/L" || term == "identity") {
      points.push_back({"B/L", TransformSpec::identity()});
      continue;
    }
    const auto eq = term.find('=');
    if (eq == std::string_view::npos)
      fail(ErrorKind::config, "sweep grid: term '" + std::string(term) + "' lacks '='");
    const auto name = term.substr(0, eq);
    const auto values = split(term.substr(eq + 1), ',');
    if (values.empty()) fail(ErrorKind::config, "sweep grid: '" + std::string(name) + "' has no values");
    for (auto v : values) {
      const double x = number(v);
      SweepPoint p;
      if (name == "eta") {
        p = {label("eta", x), TransformSpec::log(x)};
      } else if (name == "kappa") {
        p = {label("kappa", x), TransformSpec::power(x)};
      } else {
        fail(ErrorKind::config, "sweep grid: unknown parameter '" + std::string(name) + "'");
      }
      try {
        validate(p.transform);
      } catch (const Error& e) {
        fail(ErrorKind::config, std::string("sweep grid: ") + e.what());
      }
      points.push_back(std::move(p));
    }
  }
  if (points.empty()) fail(ErrorKind::config, "sweep grid is empty");
  return canonical_order(std::move(points));
}

std::vector<SweepResult> sweep_pipeline(std::span<const BackboneData> backbones,
                                        const PipelineOptions& options,
                                        std::span<const SweepPoint> points) {
  const auto ordered = canonical_order({points.begin(), points.end()});
  std::vector<SweepResult> results;
  for (const auto& point : ordered) {
    std::vector<BackboneData> variant(backbones.begin(), backbones.end());
    for (auto& b : variant) b.transform = point.transform;
    PipelineOptions opts = options;
    opts.bank_dir.reset();
    results.push_back({point, run_pipeline(variant, opts)});
  }
  return results;
}

std::vector<SweepResult> sweep(const RunConfig& config, std::span<const SweepPoint> points) {
  validate(config);
  const auto backbones = load_backbones(config);
  auto options = options_from(config);
  auto results = sweep_pipeline(backbones, options, points);
  for (auto& r : results) {
    RunConfig variant = config;
    for (auto& b : variant.backbones) b.transform = r.point.transform;
    r.report.config = to_json(variant);
  }
  return results;
}

std::string sweep_csv(std::span<const SweepResult> results) {
  std::string out = "label,family,eta,kappa,average_accuracy,last_accuracy\n";
  for (const auto& r : results) {
    const auto& t = r.point.transform;
    char eta[32] = "";
    char kappa[32] = "";
    if (t.family == TransformFamily::log) std::snprintf(eta, sizeof eta, "%g", t.eta);
    if (t.family == TransformFamily::power) std::snprintf(kappa, sizeof kappa, "%g", t.kappa);
    char line[256];
    std::snprintf(line, sizeof line, "%s,%s,%s,%s,%.10f,%.10f\n", r.point.label.c_str(),
                  std::string(to_string(t.family)).c_str(), eta, kappa,
                  r.report.average_accuracy, r.report.last_accuracy);
    out += line;
  }
  return out;
}

}  // namespace tfcl
