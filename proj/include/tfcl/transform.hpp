#pragma once

// Training-free element-wise feature transforms.
//
//   log:   T(x) = 1 / ln(1/x + 1)^eta
//   power: T(x) = x^kappa
//
// Both are strictly increasing and concave on x > 0, so channel orderings
// survive while small responses are lifted relative to large ones. Inputs
// below epsilon_clamp (including negatives) are raised to epsilon_clamp
// first. Arithmetic is double precision; stored results are float.

#include <string_view>

#include "tfcl/embedding_set.hpp"

namespace tfcl {

enum class TransformFamily { identity, log, power };

std::string_view to_string(TransformFamily family) noexcept;
TransformFamily parse_transform_family(std::string_view name);

struct TransformSpec {
  TransformFamily family = TransformFamily::identity;
  double eta = 0.1;
  double kappa = 0.3;
  double epsilon_clamp = 1e-12;

  static TransformSpec identity() { return {}; }
  static TransformSpec log(double eta) { return {TransformFamily::log, eta, 0.3, 1e-12}; }
  static TransformSpec power(double kappa) {
    return {TransformFamily::power, 0.1, kappa, 1e-12};
  }

  friend bool operator==(const TransformSpec&, const TransformSpec&) = default;
};

inline constexpr double kDefaultEta = 0.1;
inline constexpr double kDefaultKappa = 0.3;
inline constexpr double kDefaultEpsilonClamp = 1e-12;

/// Throws ErrorKind::invalid_argument on an out-of-range hyper-parameter.
void validate(const TransformSpec& spec);

double log_trans(double x, double eta, double epsilon_clamp = kDefaultEpsilonClamp);
double pwr_trans(double x, double kappa, double epsilon_clamp = kDefaultEpsilonClamp);

/// Scalar evaluation of `spec` at x (spec is assumed valid).
double apply_scalar(const TransformSpec& spec, double x);

EmbeddingSet apply_transform(const EmbeddingSet& set, const TransformSpec& spec);

}  // namespace tfcl
