// tfcl: continual-learning engine over frozen backbone embeddings.
//
//   tfcl run --config run.json
//   tfcl sweep --config run.json [--grid "bl;eta=0.1,0.3;kappa=0.3"]
//   tfcl synth --spec synth.json --out data/
//   tfcl analyze-channels --config run.json
//   tfcl schedule --classes 100 --mode B0 --inc 10 --seed 1993

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <json.hpp>

#include "tfcl/embedding_set.hpp"
#include "tfcl/error.hpp"
#include "tfcl/kernels.hpp"
#include "tfcl/runner.hpp"
#include "tfcl/schedule.hpp"
#include "tfcl/file_io.hpp"

namespace {

int exit_code(tfcl::ErrorKind kind) {
  switch (kind) {
    case tfcl::ErrorKind::invalid_argument:
    case tfcl::ErrorKind::config: return 2;
    case tfcl::ErrorKind::io: return 3;
    case tfcl::ErrorKind::format: return 4;
    case tfcl::ErrorKind::validation: return 5;
    case tfcl::ErrorKind::schedule: return 6;
    case tfcl::ErrorKind::internal: return 70;
  }
  return 1;
}

int cmd_run(const std::string& config_path) {
  const auto config = tfcl::load_run_config(config_path);
  const auto report = tfcl::run(config);
  tfcl::export_report(report, config.output_dir);
  std::cout << tfcl::to_text(report);
  std::cout << "wrote " << config.output_dir.string() << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& grid) {
  const auto config = tfcl::load_run_config(config_path);
  const auto points = tfcl::parse_sweep_grid(grid);
  const auto results = tfcl::sweep(config, points);
  const auto csv = tfcl::sweep_csv(results);
  tfcl::io::ensure_directory(config.output_dir);
  tfcl::io::write_text(config.output_dir / "sweep.csv", csv);
  std::cout << csv;
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
  const auto bytes = tfcl::io::read_file(spec_path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    tfcl::fail(tfcl::ErrorKind::config, spec_path + ": " + e.what());
  }
  const auto spec = tfcl::parse_synth_spec(doc);
  for (auto split : {tfcl::Split::train, tfcl::Split::test}) {
    const auto set = tfcl::synth_gaussian_set(spec, split);
    const auto dir = std::filesystem::path(out_dir) / std::string(tfcl::to_string(split));
    tfcl::save_embedding_set(set, dir, spec.num_classes);
    std::cout << "wrote " << dir.string() << " (" << set.num_samples() << " x " << set.dim()
              << ")\n";
  }
  return 0;
}

int cmd_analyze(const std::string& config_path) {
  const auto config = tfcl::load_run_config(config_path);
  const auto backbones = tfcl::load_backbones(config);
  tfcl::PipelineOptions options;
  options.schedule = config.schedule;
  options.num_classes = config.num_classes;
  options.ensemble = config.ensemble;
  options.channel_analysis = config.channel_analysis;
  const auto table = tfcl::analyze_channels(backbones, options);
  tfcl::io::ensure_directory(config.output_dir);
  tfcl::io::write_text(config.output_dir / "channels.csv", tfcl::channels_csv(table));
  std::size_t ref_active = 0;
  std::size_t cmp_active = 0;
  for (auto n : table.ref_counts) ref_active += n > 0 ? 1 : 0;
  for (auto n : table.cmp_counts) cmp_active += n > 0 ? 1 : 0;
  std::cout << "channels: " << table.permutation.size() << ", ever active (ref/cmp): "
            << ref_active << "/" << cmp_active << "\n"
            << "wrote " << (config.output_dir / "channels.csv").string() << "\n";
  return 0;
}

int cmd_schedule(std::uint32_t classes, const std::string& mode, std::uint32_t inc,
                 std::uint64_t seed, bool as_json) {
  const auto schedule = tfcl::make_schedule(classes, tfcl::parse_schedule_mode(mode), inc, seed);
  if (as_json) {
    nlohmann::ordered_json j;
    j["num_classes"] = classes;
    j["mode"] = std::string(tfcl::to_string(schedule.mode()));
    j["inc"] = inc;
    j["seed"] = seed;
    auto& tasks = j["tasks"] = nlohmann::ordered_json::array();
    for (std::size_t t = 1; t <= schedule.num_tasks(); ++t) {
      auto cls = schedule.task_classes(t);
      tasks.push_back(std::vector<std::uint32_t>(cls.begin(), cls.end()));
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  for (std::size_t t = 1; t <= schedule.num_tasks(); ++t) {
    auto cls = schedule.task_classes(t);
    std::cout << "task " << t << " (" << cls.size() << "):";
    for (auto c : cls) std::cout << ' ' << c;
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature-transformation continual learning engine over frozen embeddings"};
  app.require_subcommand(1);

  std::string isa;
  app.add_option("--isa", isa, "Force a kernel variant (scalar|avx2|neon)");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the task loop and export a report");
  run->add_option("--config", config_path, "Run config JSON")->required();

  std::string grid{tfcl::kDefaultSweepGrid};
  auto* sweep = app.add_subcommand("sweep", "Run once per transform hyper-parameter");
  sweep->add_option("--config", config_path, "Run config JSON")->required();
  sweep->add_option("--grid", grid, "Grid, e.g. \"bl;eta=0.1,0.3;kappa=0.3\"")
      ->capture_default_str();

  std::string spec_path;
  std::string out_dir;
  auto* synth = app.add_subcommand("synth", "Write synthetic train/test FEB sets");
  synth->add_option("--spec", spec_path, "Synthetic spec JSON")->required();
  synth->add_option("--out", out_dir, "Output directory")->required();

  auto* analyze = app.add_subcommand("analyze-channels", "Channel activation frequency table");
  analyze->add_option("--config", config_path, "Run config JSON")->required();

  std::uint32_t classes = 0;
  std::string mode = "B0";
  std::uint32_t inc = 10;
  std::uint64_t seed = 1993;
  bool as_json = false;
  auto* schedule = app.add_subcommand("schedule", "Print a task split");
  schedule->add_option("--classes", classes, "Number of classes")->required();
  schedule->add_option("--mode", mode, "B0 or BH")->capture_default_str();
  schedule->add_option("--inc", inc, "Classes per incremental task")->capture_default_str();
  schedule->add_option("--seed", seed, "Shuffle seed")->capture_default_str();
  schedule->add_flag("--json", as_json, "Emit JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!isa.empty()) tfcl::simd::select_isa(tfcl::simd::parse_isa(isa));
    if (*run) return cmd_run(config_path);
    if (*sweep) return cmd_sweep(config_path, grid);
    if (*synth) return cmd_synth(spec_path, out_dir);
    if (*analyze) return cmd_analyze(config_path);
    if (*schedule) return cmd_schedule(classes, mode, inc, seed, as_json);
  } catch (const tfcl::Error& e) {
    std::cerr << "error [" << tfcl::to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << "\n";
    return 70;
  }
  return 1;
}
