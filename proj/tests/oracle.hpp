#pragma once

// Brute-force reference implementations for tests. Nothing here calls into
// the library's numeric code: long double arithmetic, naive loops, no kernels.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<long double>>;

inline long double clamp_input(long double x, long double eps = 1e-12L) {
  return x < eps ? eps : x;
}

inline long double log_trans(long double x, long double eta) {
  x = clamp_input(x);
  return 1.0L / std::pow(std::log(1.0L / x + 1.0L), eta);
}

inline long double pwr_trans(long double x, long double kappa) {
  return std::pow(clamp_input(x), kappa);
}

enum class Family { identity, log, power };

// Transformed values are stored as float32, so the reference rounds too.
inline float transform_to_float(float x, Family family, long double param) {
  switch (family) {
    case Family::identity: return x;
    case Family::log: return static_cast<float>(log_trans(x, param));
    case Family::power: return static_cast<float>(pwr_trans(x, param));
  }
  return x;
}

inline long double dot(const std::vector<long double>& a, const std::vector<long double>& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline long double cosine(const std::vector<long double>& a, const std::vector<long double>& b) {
  const long double na = std::sqrt(dot(a, a));
  const long double nb = std::sqrt(dot(b, b));
  if (na == 0 || nb == 0) return 0;
  return dot(a, b) / (na * nb);
}

/// class id -> mean row
inline std::map<std::uint32_t, std::vector<long double>> group_means(
    const Matrix& rows, const std::vector<std::uint32_t>& labels) {
  std::map<std::uint32_t, std::vector<long double>> sums;
  std::map<std::uint32_t, long double> counts;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& s = sums[labels[i]];
    if (s.empty()) s.assign(rows[i].size(), 0);
    for (std::size_t d = 0; d < rows[i].size(); ++d) s[d] += rows[i][d];
    counts[labels[i]] += 1;
  }
  for (auto& [y, s] : sums)
    for (auto& v : s) v /= counts[y];
  return sums;
}

/// argmax over classes (ascending id, first max wins)
inline std::uint32_t nearest(const std::map<std::uint32_t, std::vector<long double>>& protos,
                             const std::vector<long double>& z) {
  std::uint32_t best = 0;
  long double best_score = -1e300L;
  bool first = true;
  for (const auto& [y, w] : protos) {
    const long double s = cosine(z, w);
    if (first || s > best_score) {
      best = y;
      best_score = s;
      first = false;
    }
  }
  return best;
}

/// Same Fisher-Yates / xoshiro256** / splitmix64 definitions as documented
/// for schedules, written out independently.
inline std::vector<std::uint32_t> class_order(std::uint32_t n, std::uint64_t seed) {
  auto splitmix = [](std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  std::uint64_t s[4];
  std::uint64_t sm = seed;
  for (auto& w : s) w = splitmix(sm);
  auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
  auto next = [&] {
    const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  };
  std::vector<std::uint32_t> order(n);
  for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
  for (std::uint64_t i = n; i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t threshold = (0 - bound) % bound;
    std::uint64_t r;
    do r = next();
    while (r < threshold);
    std::swap(order[i - 1], order[r % bound]);
  }
  return order;
}

struct Instance {
  std::size_t dim = 0;
  Matrix train, test;  // float-representable values
  std::vector<std::uint32_t> train_labels, test_labels;
};

/// Per-task predictions for every test sample of the seen classes, in test
/// order. tasks[t] lists the classes introduced at task t+1.
struct PipelineResult {
  std::vector<std::vector<std::uint32_t>> predictions;
  std::vector<std::vector<std::uint32_t>> truth;
  std::vector<double> accuracy;
};

inline PipelineResult run_pipeline(const Instance& inst,
                                   const std::vector<std::vector<std::uint32_t>>& tasks,
                                   Family family, long double param) {
  auto tf = [&](const Matrix& m) {
    Matrix out = m;
    for (auto& row : out)
      for (auto& v : row) v = transform_to_float(static_cast<float>(v), family, param);
    return out;
  };
  const Matrix train = tf(inst.train);
  const Matrix test = tf(inst.test);

  std::map<std::uint32_t, std::size_t> task_of;
  for (std::size_t t = 0; t < tasks.size(); ++t)
    for (auto c : tasks[t]) task_of[c] = t;

  PipelineResult result;
  std::map<std::uint32_t, std::vector<long double>> protos;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    Matrix rows;
    std::vector<std::uint32_t> labels;
    for (std::size_t i = 0; i < train.size(); ++i)
      if (task_of.at(inst.train_labels[i]) == t) {
        rows.push_back(train[i]);
        labels.push_back(inst.train_labels[i]);
      }
    for (auto& [y, w] : group_means(rows, labels)) protos[y] = w;

    std::vector<std::uint32_t> pred, truth;
    for (std::size_t i = 0; i < test.size(); ++i) {
      if (task_of.at(inst.test_labels[i]) > t) continue;
      pred.push_back(nearest(protos, test[i]));
      truth.push_back(inst.test_labels[i]);
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i];
    result.accuracy.push_back(100.0 * static_cast<double>(hits) / static_cast<double>(pred.size()));
    result.predictions.push_back(std::move(pred));
    result.truth.push_back(std::move(truth));
  }
  return result;
}

}  // namespace oracle
