#include <cmath>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <set>

#include "bytes.hpp"
#include "tfcl/embedding_set.hpp"
#include "tfcl/error.hpp"
#include "tfcl/rng.hpp"

namespace tfcl {

namespace io {

std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const char> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::io, "short write to '" + path.string() + "'");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::span<const char>(text.data(), text.size()));
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    fail(ErrorKind::io, "cannot create directory '" + dir.string() + "'");
}

}  // namespace io

std::string_view to_string(Split split) noexcept {
  return split == Split::train ? "train" : "test";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "test") return Split::test;
  fail(ErrorKind::invalid_argument, "split_tag must be 'train' or 'test', got '" +
                                        std::string(name) + "'");
}

EmbeddingSet::EmbeddingSet(std::vector<float> features, std::vector<std::uint32_t> labels,
                           std::size_t dim, std::string backbone_tag, Split split)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      dim_(dim),
      backbone_tag_(std::move(backbone_tag)),
      split_(split) {
  if (dim_ == 0) fail(ErrorKind::validation, "degenerate dimension: dim must be >= 1");
  if (features_.size() != labels_.size() * dim_)
    fail(ErrorKind::validation,
         "feature matrix has " + std::to_string(features_.size()) + " values, expected " +
             std::to_string(labels_.size()) + " x " + std::to_string(dim_));
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (!std::isfinite(features_[i]))
      fail(ErrorKind::validation, "non-finite value at record " + std::to_string(i / dim_) +
                                      ", column " + std::to_string(i % dim_));
  }
}

std::uint32_t EmbeddingSet::label_bound() const noexcept {
  std::uint32_t bound = 0;
  for (auto y : labels_) bound = std::max(bound, y + 1);
  return bound;
}

EmbeddingSet EmbeddingSet::select_rows(std::span<const std::size_t> rows) const {
  std::vector<float> features;
  std::vector<std::uint32_t> labels;
  features.reserve(rows.size() * dim_);
  labels.reserve(rows.size());
  for (auto r : rows) {
    if (r >= num_samples())
      fail(ErrorKind::invalid_argument, "row " + std::to_string(r) + " out of range");
    auto src = row(r);
    features.insert(features.end(), src.begin(), src.end());
    labels.push_back(labels_[r]);
  }
  return EmbeddingSet(std::move(features), std::move(labels), dim_, backbone_tag_, split_);
}

void validate_labels(const EmbeddingSet& set, std::uint32_t num_classes) {
  auto labels = set.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= num_classes)
      fail(ErrorKind::validation, "label out of range: record " + std::to_string(i) +
                                      " has label " + std::to_string(labels[i]) +
                                      " >= num_classes " + std::to_string(num_classes));
  }
}

namespace {

using nlohmann::json;

template <typename T>
T manifest_field(const json& manifest, const char* key) {
  auto it = manifest.find(key);
  if (it == manifest.end()) fail(ErrorKind::format, std::string("manifest missing '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::format, std::string("manifest field '") + key + "' has the wrong type");
  }
}

void expect_string(const json& manifest, const char* key, std::string_view expected) {
  const auto value = manifest_field<std::string>(manifest, key);
  if (value != expected)
    fail(ErrorKind::format, std::string("manifest ") + key + " must be \"" +
                                std::string(expected) + "\", got \"" + value + "\"");
}

}  // namespace

EmbeddingSet load_embedding_set(const std::filesystem::path& dir,
                                std::optional<std::uint32_t> num_classes) {
  const auto manifest_path = dir / "manifest.json";
  if (!std::filesystem::exists(manifest_path))
    fail(ErrorKind::io, "missing file '" + manifest_path.string() + "'");

  const auto manifest_bytes = io::read_file(manifest_path);
  json manifest;
  try {
    manifest = json::parse(manifest_bytes.begin(), manifest_bytes.end());
  } catch (const json::parse_error& e) {
    fail(ErrorKind::format, manifest_path.string() + ": " + e.what());
  }
  if (!manifest.is_object()) fail(ErrorKind::format, "manifest must be a JSON object");

  static const std::set<std::string> known{"format_version", "num_samples", "dim",
                                           "dtype",          "label_dtype", "backbone_tag",
                                           "split_tag",      "num_classes"};
  for (const auto& item : manifest.items())
    if (!known.contains(item.key()))
      fail(ErrorKind::format, "manifest has unknown field '" + item.key() + "'");

  if (manifest_field<int>(manifest, "format_version") != kFebFormatVersion)
    fail(ErrorKind::format, "unsupported format_version");
  expect_string(manifest, "dtype", "f32le");
  expect_string(manifest, "label_dtype", "u32le");
  const auto num_samples = manifest_field<std::uint64_t>(manifest, "num_samples");
  const auto dim = manifest_field<std::uint64_t>(manifest, "dim");
  const auto backbone_tag = manifest_field<std::string>(manifest, "backbone_tag");
  const Split split = parse_split(manifest_field<std::string>(manifest, "split_tag"));
  if (dim == 0) fail(ErrorKind::format, "degenerate dimension: manifest dim is 0");
  if (!num_classes && manifest.contains("num_classes"))
    num_classes = manifest_field<std::uint32_t>(manifest, "num_classes");

  const auto feature_path = dir / "features.bin";
  const auto label_path = dir / "labels.bin";
  for (const auto& p : {feature_path, label_path})
    if (!std::filesystem::exists(p)) fail(ErrorKind::io, "missing file '" + p.string() + "'");

  const auto feature_bytes = io::read_file(feature_path);
  const auto label_bytes = io::read_file(label_path);
  const std::uint64_t expected_features = num_samples * dim * 4;
  if (feature_bytes.size() != expected_features)
    fail(ErrorKind::format, "features.bin: data length mismatch: expected " +
                                std::to_string(expected_features) + " bytes, found " +
                                std::to_string(feature_bytes.size()));
  if (label_bytes.size() != num_samples * 4)
    fail(ErrorKind::format, "labels.bin: data length mismatch: expected " +
                                std::to_string(num_samples * 4) + " bytes, found " +
                                std::to_string(label_bytes.size()));

  auto features = detail::decode_le<float>(feature_bytes);
  auto labels = detail::decode_le<std::uint32_t>(label_bytes);

  for (std::size_t i = 0; i < features.size(); ++i) {
    if (!std::isfinite(features[i]))
      fail(ErrorKind::format, "features.bin: non-finite value at record " +
                                  std::to_string(i / dim) + ", column " +
                                  std::to_string(i % dim) + " (byte offset " +
                                  std::to_string(i * 4) + ")");
  }
  if (num_classes) {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] >= *num_classes)
        fail(ErrorKind::validation, "labels.bin: label out of range at record " +
                                        std::to_string(i) + " (byte offset " +
                                        std::to_string(i * 4) + "): " +
                                        std::to_string(labels[i]) + " >= num_classes " +
                                        std::to_string(*num_classes));
  }
  return EmbeddingSet(std::move(features), std::move(labels), dim, backbone_tag, split);
}

void save_embedding_set(const EmbeddingSet& set, const std::filesystem::path& dir,
                        std::optional<std::uint32_t> num_classes) {
  if (set.dim() == 0) fail(ErrorKind::validation, "degenerate dimension");
  if (num_classes) validate_labels(set, *num_classes);

  nlohmann::ordered_json manifest;
  manifest["format_version"] = kFebFormatVersion;
  manifest["num_samples"] = set.num_samples();
  manifest["dim"] = set.dim();
  manifest["dtype"] = "f32le";
  manifest["label_dtype"] = "u32le";
  manifest["backbone_tag"] = set.backbone_tag();
  manifest["split_tag"] = std::string(to_string(set.split()));
  if (num_classes) manifest["num_classes"] = *num_classes;

  io::ensure_directory(dir);
  io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  io::write_file(dir / "features.bin", detail::encode_le<float>(set.features()));
  io::write_file(dir / "labels.bin", detail::encode_le<std::uint32_t>(set.labels()));
}

EmbeddingSet concat_features(const EmbeddingSet& a, const EmbeddingSet& b) {
  if (a.num_samples() != b.num_samples())
    fail(ErrorKind::validation, "concat: sample count mismatch (" +
                                    std::to_string(a.num_samples()) + " vs " +
                                    std::to_string(b.num_samples()) + ")");
  const auto la = a.labels();
  const auto lb = b.labels();
  for (std::size_t i = 0; i < la.size(); ++i)
    if (la[i] != lb[i])
      fail(ErrorKind::validation, "concat: label mismatch at record " + std::to_string(i));

  const std::size_t dim = a.dim() + b.dim();
  std::vector<float> features;
  features.reserve(a.num_samples() * dim);
  for (std::size_t i = 0; i < a.num_samples(); ++i) {
    auto ra = a.row(i);
    auto rb = b.row(i);
    features.insert(features.end(), ra.begin(), ra.end());
    features.insert(features.end(), rb.begin(), rb.end());
  }
  std::string tag = a.backbone_tag() + "+" + b.backbone_tag();
  return EmbeddingSet(std::move(features), {la.begin(), la.end()}, dim, std::move(tag),
                      a.split());
}

void validate(const SynthSpec& spec) {
  if (spec.num_classes < 1 || spec.samples_per_class < 1 || spec.dim < 1)
    fail(ErrorKind::invalid_argument, "synth: counts must be >= 1");
  if (!(spec.noise_scale > 0.0) || !std::isfinite(spec.noise_scale))
    fail(ErrorKind::invalid_argument, "synth: noise_scale must be > 0");
  if (!std::isfinite(spec.mean_scale) || spec.mean_scale < 0.0)
    fail(ErrorKind::invalid_argument, "synth: mean_scale must be finite and >= 0");
  if (!spec.channel_scale.empty() && spec.channel_scale.size() != spec.dim)
    fail(ErrorKind::invalid_argument, "synth: channel_scale length must equal dim");
  for (double s : spec.channel_scale)
    if (!std::isfinite(s)) fail(ErrorKind::invalid_argument, "synth: non-finite channel_scale");
  if (spec.discriminative_channels && *spec.discriminative_channels > spec.dim)
    fail(ErrorKind::invalid_argument, "synth: discriminative_channels exceeds dim");
}

EmbeddingSet synth_gaussian_set(const SynthSpec& spec, Split split) {
  validate(spec);
  const std::size_t dim = spec.dim;
  const std::size_t discriminative = spec.discriminative_channels.value_or(spec.dim);

  // Means: shared channels first, then class-specific channels class by class.
  GaussianSource mean_source(spec.seed);
  std::vector<double> shared(dim, 0.0);
  for (std::size_t d = discriminative; d < dim; ++d)
    shared[d] = std::abs(spec.mean_scale * mean_source.next());
  std::vector<double> means(spec.num_classes * dim);
  for (std::size_t c = 0; c < spec.num_classes; ++c)
    for (std::size_t d = 0; d < dim; ++d)
      means[c * dim + d] =
          d < discriminative ? std::abs(spec.mean_scale * mean_source.next()) : shared[d];

  // "train" / "test" in ASCII, xor-ed into the seed for the noise stream
  const std::uint64_t salt =
      split == Split::train ? 0x747261696E000000ULL : 0x7465737400000000ULL;
  GaussianSource noise(spec.seed ^ salt);

  const std::size_t n = static_cast<std::size_t>(spec.num_classes) * spec.samples_per_class;
  std::vector<float> features(n * dim);
  std::vector<std::uint32_t> labels(n);
  std::size_t r = 0;
  for (std::uint32_t c = 0; c < spec.num_classes; ++c) {
    for (std::uint32_t k = 0; k < spec.samples_per_class; ++k, ++r) {
      labels[r] = c;
      for (std::size_t d = 0; d < dim; ++d) {
        const double scale = spec.channel_scale.empty() ? 1.0 : spec.channel_scale[d];
        const double v = (means[c * dim + d] + spec.noise_scale * noise.next()) * scale;
        features[r * dim + d] = static_cast<float>(std::abs(v));
      }
    }
  }
  return EmbeddingSet(std::move(features), std::move(labels), dim, "synthetic", split);
}

}  // namespace tfcl
