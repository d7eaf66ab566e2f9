#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tfcl/embedding_set.hpp"
#include "tfcl/metrics.hpp"
#include "tfcl/schedule.hpp"
#include "tfcl/transform.hpp"

namespace tfcl {

struct FebPair {
  std::filesystem::path train;
  std::filesystem::path test;
};

struct BackboneConfig {
  FebPair features;
  // appended after `features` column-wise ([fine-tuned, original] order)
  std::optional<FebPair> concat;
  TransformSpec transform;
};

struct ScheduleConfig {
  ScheduleMode mode = ScheduleMode::b0;
  std::uint32_t inc = 10;
  std::uint64_t seed = 1993;
};

struct ChannelAnalysisRequest {
  std::size_t ref_task = 1;
  std::optional<std::size_t> cmp_task;  // nullopt: last task
  double threshold = kDefaultActivationThreshold;
  std::size_t window = kDefaultMovingAverageWindow;
};

struct RunConfig {
  std::vector<BackboneConfig> backbones;
  ScheduleConfig schedule;
  std::optional<std::uint32_t> num_classes;
  bool ensemble = false;
  std::optional<ChannelAnalysisRequest> channel_analysis;
  std::filesystem::path output_dir = "out";
  bool save_banks = false;
};

/// Parses a run config document. Unknown keys are rejected; relative paths
/// are resolved against `base_dir`. Throws ErrorKind::config.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);
/// Synthetic-data spec document: {num_classes, samples_per_class, dim,
/// mean_scale, noise_scale, channel_scale (number or per-channel array),
/// discriminative_channels?, seed}. Unknown keys are rejected.
SynthSpec parse_synth_spec(const nlohmann::json& doc);

/// Checks structural rules and that every referenced FEB directory exists.
void validate(const RunConfig& config);
nlohmann::ordered_json to_json(const RunConfig& config);

/// One backbone's embeddings after optional concatenation.
struct BackboneData {
  EmbeddingSet train;
  EmbeddingSet test;
  TransformSpec transform;
};

struct PipelineOptions {
  ScheduleConfig schedule;
  std::optional<std::uint32_t> num_classes;
  bool ensemble = false;
  std::optional<ChannelAnalysisRequest> channel_analysis;
  std::optional<std::filesystem::path> bank_dir;  // save banks after each task
};

std::vector<BackboneData> load_backbones(const RunConfig& config);

/// Task loop: per task, transform the current-task training slice of each
/// backbone, add its class prototypes, then score every test sample of the
/// classes seen so far.
RunReport run_pipeline(std::span<const BackboneData> backbones, const PipelineOptions& options);

RunReport run(const RunConfig& config);

/// Channel activation table on backbone 0's transformed training slices.
ChannelFrequencyTable analyze_channels(std::span<const BackboneData> backbones,
                                       const PipelineOptions& options);

struct SweepPoint {
  std::string label;  // "B/L" for the identity baseline
  TransformSpec transform;

  friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

/// Grid syntax: ';'-separated terms, each `bl`, `eta=v1,v2,...` or
/// `kappa=v1,v2,...`. Points come back in canonical order (baseline, then
/// log by eta, then power by kappa) with duplicates removed.
std::vector<SweepPoint> parse_sweep_grid(std::string_view grid);
std::vector<SweepPoint> canonical_order(std::vector<SweepPoint> points);

inline constexpr std::string_view kDefaultSweepGrid =
    "bl;eta=0.1,0.3,0.5,0.8;kappa=0.1,0.3,0.5,0.8";

struct SweepResult {
  SweepPoint point;
  RunReport report;
};

/// Runs the pipeline once per point with every backbone's transform replaced.
std::vector<SweepResult> sweep_pipeline(std::span<const BackboneData> backbones,
                                        const PipelineOptions& options,
                                        std::span<const SweepPoint> points);
std::vector<SweepResult> sweep(const RunConfig& config, std::span<const SweepPoint> points);

/// columns: label,family,eta,kappa,average_accuracy,last_accuracy
std::string sweep_csv(std::span<const SweepResult> results);

}  // namespace tfcl
