#include "tfcl/transform.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "tfcl/error.hpp"

namespace tfcl {

std::string_view to_string(TransformFamily family) noexcept {
  switch (family) {
    case TransformFamily::identity: return "identity";
    case TransformFamily::log: return "log";
    case TransformFamily::power: return "power";
  }
  return "unknown";
}

TransformFamily parse_transform_family(std::string_view name) {
  if (name == "identity") return TransformFamily::identity;
  if (name == "log") return TransformFamily::log;
  if (name == "power") return TransformFamily::power;
  fail(ErrorKind::invalid_argument,
       "transform family must be identity|log|power, got '" + std::string(name) + "'");
}

void validate(const TransformSpec& spec) {
  if (!(spec.epsilon_clamp > 0.0) || !std::isfinite(spec.epsilon_clamp))
    fail(ErrorKind::invalid_argument, "epsilon_clamp must be > 0");
  if (spec.family == TransformFamily::log && (!(spec.eta > 0.0) || !std::isfinite(spec.eta)))
    fail(ErrorKind::invalid_argument, "eta must be > 0 for the log transform");
  if (spec.family == TransformFamily::power && !(spec.kappa > 0.0 && spec.kappa <= 1.0))
    fail(ErrorKind::invalid_argument, "kappa must lie in (0, 1] for the power transform");
}

namespace {

double clamp_input(double x, double epsilon_clamp) {
  if (!std::isfinite(x)) fail(ErrorKind::validation, "non-finite transform input");
  return x < epsilon_clamp ? epsilon_clamp : x;
}

}  // namespace

double log_trans(double x, double eta, double epsilon_clamp) {
  if (!(eta > 0.0)) fail(ErrorKind::invalid_argument, "eta must be > 0");
  x = clamp_input(x, epsilon_clamp);
  // log1p keeps ln(1/x + 1) nonzero for large x
  return 1.0 / std::pow(std::log1p(1.0 / x), eta);
}

double pwr_trans(double x, double kappa, double epsilon_clamp) {
  x = clamp_input(x, epsilon_clamp);
  return std::pow(x, kappa);
}

double apply_scalar(const TransformSpec& spec, double x) {
  switch (spec.family) {
    case TransformFamily::identity: return x;
    case TransformFamily::log: return log_trans(x, spec.eta, spec.epsilon_clamp);
    case TransformFamily::power: return pwr_trans(x, spec.kappa, spec.epsilon_clamp);
  }
  return x;
}

EmbeddingSet apply_transform(const EmbeddingSet& set, const TransformSpec& spec) {
  validate(spec);
  if (spec.family == TransformFamily::identity) return set;

  const auto in = set.features();
  std::vector<float> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    try {
      out[i] = static_cast<float>(apply_scalar(spec, static_cast<double>(in[i])));
    } catch (const Error& e) {
      fail(e.kind(), std::string(e.what()) + " at (row " + std::to_string(i / set.dim()) +
                         ", column " + std::to_string(i % set.dim()) + ")");
    }
  }
  auto labels = set.labels();
  return EmbeddingSet(std::move(out), {labels.begin(), labels.end()}, set.dim(),
                      set.backbone_tag(), set.split());
}

}  // namespace tfcl
