#include <initializer_list>
#include <set>
#include <string>

#include "bytes.hpp"
#include "tfcl/error.hpp"
#include "tfcl/runner.hpp"

namespace tfcl {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::string_view where,
                    std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(ErrorKind::config, std::string(where) + " must be an object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || item.key() == a;
    if (!ok)
      fail(ErrorKind::config, "unknown key '" + item.key() + "' in " + std::string(where));
  }
}

template <typename T>
T get(const json& obj, const char* key, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end())
    fail(ErrorKind::config, std::string(where) + ": missing required key '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::config, std::string(where) + "." + key + " has the wrong type");
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, std::string_view where) {
  return obj.contains(key) ? get<T>(obj, key, where) : fallback;
}

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

FebPair parse_pair(const json& obj, std::string_view where, const std::filesystem::path& base) {
  reject_unknown(obj, where, {"train", "test"});
  return {resolve(get<std::string>(obj, "train", where), base),
          resolve(get<std::string>(obj, "test", where), base)};
}

TransformSpec parse_transform(const json& obj, std::string_view where) {
  reject_unknown(obj, where, {"family", "eta", "kappa", "epsilon_clamp"});
  TransformSpec spec;
  try {
    spec.family = parse_transform_family(get<std::string>(obj, "family", where));
    spec.eta = get_or<double>(obj, "eta", kDefaultEta, where);
    spec.kappa = get_or<double>(obj, "kappa", kDefaultKappa, where);
    spec.epsilon_clamp = get_or<double>(obj, "epsilon_clamp", kDefaultEpsilonClamp, where);
    validate(spec);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    fail(ErrorKind::config, std::string(where) + ": " + e.what());
  }
  return spec;
}

}  // namespace

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
  reject_unknown(doc, "config",
                 {"backbones", "schedule", "num_classes", "ensemble", "channel_analysis",
                  "output_dir", "save_banks"});
  RunConfig config;

  const auto& backbones = doc.contains("backbones") ? doc.at("backbones") : json();
  if (!backbones.is_array() || backbones.empty() || backbones.size() > 2)
    fail(ErrorKind::config, "config.backbones must be an array of 1 or 2 entries");
  for (std::size_t i = 0; i < backbones.size(); ++i) {
    const std::string where = "backbones[" + std::to_string(i) + "]";
    const auto& b = backbones[i];
    reject_unknown(b, where, {"train", "test", "concat", "transform"});
    BackboneConfig bc;
    bc.features = {resolve(get<std::string>(b, "train", where), base_dir),
                   resolve(get<std::string>(b, "test", where), base_dir)};
    if (b.contains("concat")) bc.concat = parse_pair(b.at("concat"), where + ".concat", base_dir);
    bc.transform = b.contains("transform") ? parse_transform(b.at("transform"), where + ".transform")
                                           : TransformSpec::identity();
    config.backbones.push_back(std::move(bc));
  }

  if (!doc.contains("schedule")) fail(ErrorKind::config, "config: missing required key 'schedule'");
  const auto& s = doc.at("schedule");
  reject_unknown(s, "schedule", {"mode", "inc", "seed"});
  try {
    config.schedule.mode = parse_schedule_mode(get<std::string>(s, "mode", "schedule"));
  } catch (const Error& e) {
    fail(ErrorKind::config, e.what());
  }
  config.schedule.inc = get<std::uint32_t>(s, "inc", "schedule");
  config.schedule.seed = get_or<std::uint64_t>(s, "seed", config.schedule.seed, "schedule");

  if (doc.contains("num_classes"))
    config.num_classes = get<std::uint32_t>(doc, "num_classes", "config");
  config.ensemble = get_or<bool>(doc, "ensemble", false, "config");
  config.save_banks = get_or<bool>(doc, "save_banks", false, "config");
  config.output_dir = resolve(get_or<std::string>(doc, "output_dir", "out", "config"), base_dir);

  if (doc.contains("channel_analysis")) {
    const auto& c = doc.at("channel_analysis");
    reject_unknown(c, "channel_analysis", {"ref_task", "cmp_task", "threshold", "window"});
    ChannelAnalysisRequest req;
    req.ref_task = get_or<std::size_t>(c, "ref_task", 1, "channel_analysis");
    if (c.contains("cmp_task")) {
      const auto& cmp = c.at("cmp_task");
      if (cmp.is_string() && cmp.get<std::string>() == "last") {
        req.cmp_task.reset();
      } else if (cmp.is_number_unsigned()) {
        req.cmp_task = cmp.get<std::size_t>();
      } else {
        fail(ErrorKind::config, "channel_analysis.cmp_task must be a task index or \"last\"");
      }
    }
    req.threshold = get_or<double>(c, "threshold", kDefaultActivationThreshold, "channel_analysis");
    req.window = get_or<std::size_t>(c, "window", kDefaultMovingAverageWindow, "channel_analysis");
    if (!(req.threshold > 0.0 && req.threshold < 1.0))
      fail(ErrorKind::config, "channel_analysis.threshold must lie in (0, 1)");
    if (req.window < 1) fail(ErrorKind::config, "channel_analysis.window must be >= 1");
    if (req.ref_task < 1) fail(ErrorKind::config, "channel_analysis.ref_task must be >= 1");
    config.channel_analysis = req;
  }

  if (config.ensemble && config.backbones.size() != 2)
    fail(ErrorKind::config, "ensemble requires exactly 2 backbone entries");
  if (!config.ensemble && config.backbones.size() != 1)
    fail(ErrorKind::config, "2 backbone entries require \"ensemble\": true");
  return config;
}

SynthSpec parse_synth_spec(const json& doc) {
  reject_unknown(doc, "synth spec",
                 {"num_classes", "samples_per_class", "dim", "mean_scale", "noise_scale",
                  "channel_scale", "discriminative_channels", "seed"});
  SynthSpec spec;
  spec.num_classes = get<std::uint32_t>(doc, "num_classes", "synth spec");
  spec.samples_per_class = get<std::uint32_t>(doc, "samples_per_class", "synth spec");
  spec.dim = get<std::uint32_t>(doc, "dim", "synth spec");
  spec.mean_scale = get_or<double>(doc, "mean_scale", spec.mean_scale, "synth spec");
  spec.noise_scale = get_or<double>(doc, "noise_scale", spec.noise_scale, "synth spec");
  spec.seed = get_or<std::uint64_t>(doc, "seed", spec.seed, "synth spec");
  if (doc.contains("discriminative_channels"))
    spec.discriminative_channels =
        get<std::uint32_t>(doc, "discriminative_channels", "synth spec");
  if (doc.contains("channel_scale")) {
    const auto& cs = doc.at("channel_scale");
    if (cs.is_number())
      spec.channel_scale.assign(spec.dim, cs.get<double>());
    else
      spec.channel_scale = get<std::vector<double>>(doc, "channel_scale", "synth spec");
  }
  try {
    validate(spec);
  } catch (const Error& e) {
    fail(ErrorKind::config, e.what());
  }
  return spec;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    fail(ErrorKind::config, path.string() + ": " + e.what());
  }
  auto config = parse_run_config(doc, path.parent_path());
  validate(config);
  return config;
}

void validate(const RunConfig& config) {
  if (config.backbones.empty() || config.backbones.size() > 2)
    fail(ErrorKind::config, "config needs 1 or 2 backbone entries");
  if (config.ensemble != (config.backbones.size() == 2))
    fail(ErrorKind::config, "ensemble flag requires exactly 2 backbone entries");
  auto check = [](const std::filesystem::path& p) {
    if (!std::filesystem::is_directory(p))
      fail(ErrorKind::config, "FEB directory '" + p.string() + "' does not exist");
  };
  for (const auto& b : config.backbones) {
    check(b.features.train);
    check(b.features.test);
    if (b.concat) {
      check(b.concat->train);
      check(b.concat->test);
    }
  }
}

nlohmann::ordered_json to_json(const RunConfig& config) {
  nlohmann::ordered_json j;
  auto& backbones = j["backbones"] = nlohmann::ordered_json::array();
  for (const auto& b : config.backbones) {
    nlohmann::ordered_json e;
    e["train"] = b.features.train.generic_string();
    e["test"] = b.features.test.generic_string();
    if (b.concat)
      e["concat"] = {{"train", b.concat->train.generic_string()},
                     {"test", b.concat->test.generic_string()}};
    nlohmann::ordered_json t;
    t["family"] = std::string(to_string(b.transform.family));
    if (b.transform.family == TransformFamily::log) t["eta"] = b.transform.eta;
    if (b.transform.family == TransformFamily::power) t["kappa"] = b.transform.kappa;
    t["epsilon_clamp"] = b.transform.epsilon_clamp;
    e["transform"] = std::move(t);
    backbones.push_back(std::move(e));
  }
  j["schedule"] = {{"mode", std::string(to_string(config.schedule.mode))},
                   {"inc", config.schedule.inc},
                   {"seed", config.schedule.seed}};
  if (config.num_classes) j["num_classes"] = *config.num_classes;
  j["ensemble"] = config.ensemble;
  if (config.channel_analysis) {
    const auto& c = *config.channel_analysis;
    nlohmann::ordered_json ca;
    ca["ref_task"] = c.ref_task;
    if (c.cmp_task)
      ca["cmp_task"] = *c.cmp_task;
    else
      ca["cmp_task"] = "last";
    ca["threshold"] = c.threshold;
    ca["window"] = c.window;
    j["channel_analysis"] = std::move(ca);
  }
  j["output_dir"] = config.output_dir.generic_string();
  j["save_banks"] = config.save_banks;
  return j;
}

}  // namespace tfcl
