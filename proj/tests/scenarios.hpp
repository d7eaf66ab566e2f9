#pragma once

// Synthetic data shared by the runner tests and the acceptance binary.

#include <vector>

#include "tfcl/embedding_set.hpp"
#include "tfcl/runner.hpp"
#include "oracle.hpp"

namespace scenarios {

/// Class identity lives in the first `disc` channels only; those channels
/// are multiplied by `suppression` while the shared channels keep scale 1.
inline tfcl::SynthSpec suppressed_spec(double suppression, std::uint64_t seed = 2024) {
  tfcl::SynthSpec spec;
  spec.num_classes = 10;
  spec.samples_per_class = 30;
  spec.dim = 16;
  spec.mean_scale = 1.0;
  spec.noise_scale = 0.2;
  spec.discriminative_channels = 4;
  spec.channel_scale.assign(spec.dim, 1.0);
  for (std::uint32_t c = 0; c < *spec.discriminative_channels; ++c)
    spec.channel_scale[c] = suppression;
  spec.seed = seed;
  return spec;
}

inline tfcl::PipelineOptions suppressed_options() {
  tfcl::PipelineOptions options;
  options.schedule = {tfcl::ScheduleMode::b0, 2, 1993};
  return options;
}

inline tfcl::BackboneData backbone(const tfcl::SynthSpec& spec, tfcl::TransformSpec transform) {
  return {tfcl::synth_gaussian_set(spec, tfcl::Split::train),
          tfcl::synth_gaussian_set(spec, tfcl::Split::test), transform};
}

inline oracle::Matrix rows_of(const tfcl::EmbeddingSet& set) {
  oracle::Matrix out;
  for (std::size_t i = 0; i < set.num_samples(); ++i)
    out.emplace_back(set.row(i).begin(), set.row(i).end());
  return out;
}

inline oracle::Instance instance_of(const tfcl::BackboneData& data) {
  oracle::Instance inst;
  inst.dim = data.train.dim();
  inst.train = rows_of(data.train);
  inst.test = rows_of(data.test);
  inst.train_labels.assign(data.train.labels().begin(), data.train.labels().end());
  inst.test_labels.assign(data.test.labels().begin(), data.test.labels().end());
  return inst;
}

inline oracle::Family family_of(const tfcl::TransformSpec& spec) {
  switch (spec.family) {
    case tfcl::TransformFamily::identity: return oracle::Family::identity;
    case tfcl::TransformFamily::log: return oracle::Family::log;
    case tfcl::TransformFamily::power: return oracle::Family::power;
  }
  return oracle::Family::identity;
}

inline long double param_of(const tfcl::TransformSpec& spec) {
  return spec.family == tfcl::TransformFamily::power ? spec.kappa : spec.eta;
}

}  // namespace scenarios
