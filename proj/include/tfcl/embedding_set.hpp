#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tfcl {

enum class Split { train, test };

std::string_view to_string(Split split) noexcept;
Split parse_split(std::string_view name);

/// A labeled num_samples x dim matrix of backbone activations, row-major.
/// Immutable once constructed; the constructor enforces shape, finiteness
/// and a nonzero dim.
class EmbeddingSet {
 public:
  EmbeddingSet(std::vector<float> features, std::vector<std::uint32_t> labels,
               std::size_t dim, std::string backbone_tag, Split split);

  std::size_t num_samples() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const float> row(std::size_t i) const noexcept {
    return {features_.data() + i * dim_, dim_};
  }
  float at(std::size_t row, std::size_t col) const noexcept {
    return features_[row * dim_ + col];
  }

  std::span<const float> features() const noexcept { return features_; }
  std::span<const std::uint32_t> labels() const noexcept { return labels_; }
  const std::string& backbone_tag() const noexcept { return backbone_tag_; }
  Split split() const noexcept { return split_; }

  /// Largest label + 1, or 0 for an empty set.
  std::uint32_t label_bound() const noexcept;

  /// Keeps the rows whose index is listed, in the given order.
  EmbeddingSet select_rows(std::span<const std::size_t> rows) const;

  friend bool operator==(const EmbeddingSet&, const EmbeddingSet&) = default;

 private:
  std::vector<float> features_;
  std::vector<std::uint32_t> labels_;
  std::size_t dim_;
  std::string backbone_tag_;
  Split split_;
};

/// Throws ErrorKind::validation naming the first record with label >= num_classes.
void validate_labels(const EmbeddingSet& set, std::uint32_t num_classes);

// FEB directory layout:
//   manifest.json  {format_version: 1, num_samples, dim, dtype: "f32le",
//                   label_dtype: "u32le", backbone_tag, split_tag[, num_classes]}
//   features.bin   num_samples*dim float32, little-endian, row-major
//   labels.bin     num_samples uint32, little-endian
inline constexpr int kFebFormatVersion = 1;

/// Loads and validates an FEB directory. Labels are range-checked against
/// `num_classes` when given, else against the manifest's optional
/// num_classes field.
EmbeddingSet load_embedding_set(const std::filesystem::path& dir,
                                std::optional<std::uint32_t> num_classes = std::nullopt);

/// Writes an FEB directory, creating it if needed.
void save_embedding_set(const EmbeddingSet& set, const std::filesystem::path& dir,
                        std::optional<std::uint32_t> num_classes = std::nullopt);

/// Row-wise [a, b]: a's columns first. Requires identical label sequences.
EmbeddingSet concat_features(const EmbeddingSet& a, const EmbeddingSet& b);

struct SynthSpec {
  std::uint32_t num_classes = 4;
  std::uint32_t samples_per_class = 10;
  std::uint32_t dim = 8;
  double mean_scale = 1.0;
  double noise_scale = 0.1;
  // per-channel multiplier; empty means all ones
  std::vector<double> channel_scale;
  // channels [0, discriminative_channels) get per-class means; the rest
  // share one mean across all classes. nullopt means every channel.
  std::optional<std::uint32_t> discriminative_channels;
  std::uint64_t seed = 0;
};

void validate(const SynthSpec& spec);

/// Gaussian class clusters: sample = |(mean_c + noise_scale * N(0,1)) * scale|,
/// rows ordered class by class. Class means are |mean_scale * N(0,1)| and
/// depend only on the seed; the noise stream also depends on the split, so
/// train and test share means but not noise.
EmbeddingSet synth_gaussian_set(const SynthSpec& spec, Split split);

}  // namespace tfcl
