#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tfcl/embedding_set.hpp"

namespace tfcl {

/// Class-mean prototypes over (transformed) features, stored in ascending
/// class-ID order as a dense row-major double matrix. A class is added once,
/// from the task that introduces it, and never changes afterwards.
class PrototypeBank {
 public:
  PrototypeBank() = default;
  explicit PrototypeBank(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_classes() const noexcept { return class_ids_.size(); }
  bool empty() const noexcept { return class_ids_.empty(); }
  bool contains(std::uint32_t class_id) const noexcept;

  std::span<const std::uint32_t> class_ids() const noexcept { return class_ids_; }
  std::span<const double> prototype(std::uint32_t class_id) const;
  std::span<const double> prototype_at(std::size_t index) const noexcept {
    return {matrix_.data() + index * dim_, dim_};
  }
  std::uint64_t count(std::uint32_t class_id) const;
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  double norm_at(std::size_t index) const noexcept { return norms_[index]; }

  /// Classes whose prototype has zero norm; they always score 0.
  std::vector<std::uint32_t> degenerate_classes() const;

  /// Adds the mean of every class present in `transformed`. Throws if any of
  /// those classes already has a prototype. Strong exception guarantee.
  void add_classes(const EmbeddingSet& transformed);

  /// Rebuilds a bank from stored rows (ascending class IDs, counts >= 1).
  static PrototypeBank from_parts(std::size_t dim, std::vector<std::uint32_t> class_ids,
                                  std::vector<double> matrix, std::vector<std::uint64_t> counts);

  friend bool operator==(const PrototypeBank&, const PrototypeBank&) = default;

 private:
  std::size_t index_of(std::uint32_t class_id) const;

  std::size_t dim_ = 0;
  std::vector<std::uint32_t> class_ids_;
  std::vector<double> matrix_;
  std::vector<std::uint64_t> counts_;
  std::vector<double> norms_;
};

PrototypeBank update_prototypes(PrototypeBank bank, const EmbeddingSet& transformed);

/// Cosine scores aligned with bank.class_ids().
struct Scores {
  std::vector<std::uint32_t> classes;
  std::vector<double> values;
};

struct Prediction {
  std::uint32_t label = 0;
  std::vector<std::uint32_t> classes;
  std::vector<double> probabilities;
};

Scores cosine_scores(const PrototypeBank& bank, std::span<const float> z);

/// Softmax over cosine scores; argmax with ties to the smallest class ID.
Prediction predict(const PrototypeBank& bank, std::span<const float> z);

/// Softmax over cos(z0, w0_y) + cos(z1, w1_y). Both banks must hold the same classes.
Prediction predict_ensemble(const PrototypeBank& bank0, const PrototypeBank& bank1,
                            std::span<const float> z0, std::span<const float> z1);

/// Softmax + argmax shared by predict and predict_ensemble.
Prediction decide(std::vector<std::uint32_t> classes, std::span<const double> logits);

// Sidecar layout, little-endian like FEB:
//   bank.json      {format_version: 1, dim, num_classes, dtype: "f64le",
//                   label_dtype: "u32le", count_dtype: "u64le"}
//   prototypes.bin num_classes*dim float64, rows in ascending class ID
//   classes.bin    num_classes uint32
//   counts.bin     num_classes uint64
void save_bank(const PrototypeBank& bank, const std::filesystem::path& dir);
PrototypeBank load_bank(const std::filesystem::path& dir);

}  // namespace tfcl
