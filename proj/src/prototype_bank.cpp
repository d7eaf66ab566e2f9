#include "tfcl/prototype_bank.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>
#include <string>

#include "bytes.hpp"
#include "tfcl/error.hpp"
#include "tfcl/kernels.hpp"

namespace tfcl {

bool PrototypeBank::contains(std::uint32_t class_id) const noexcept {
  return std::binary_search(class_ids_.begin(), class_ids_.end(), class_id);
}

std::size_t PrototypeBank::index_of(std::uint32_t class_id) const {
  auto it = std::lower_bound(class_ids_.begin(), class_ids_.end(), class_id);
  if (it == class_ids_.end() || *it != class_id)
    fail(ErrorKind::invalid_argument, "class " + std::to_string(class_id) + " has no prototype");
  return static_cast<std::size_t>(it - class_ids_.begin());
}

std::span<const double> PrototypeBank::prototype(std::uint32_t class_id) const {
  return prototype_at(index_of(class_id));
}

std::uint64_t PrototypeBank::count(std::uint32_t class_id) const {
  return counts_[index_of(class_id)];
}

std::vector<std::uint32_t> PrototypeBank::degenerate_classes() const {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < class_ids_.size(); ++i)
    if (norms_[i] == 0.0) out.push_back(class_ids_[i]);
  return out;
}

void PrototypeBank::add_classes(const EmbeddingSet& transformed) {
  if (dim_ == 0) dim_ = transformed.dim();
  if (transformed.dim() != dim_)
    fail(ErrorKind::validation, "prototype update: feature dim " +
                                    std::to_string(transformed.dim()) + " != bank dim " +
                                    std::to_string(dim_));

  const auto& k = simd::active_kernels();
  std::map<std::uint32_t, std::pair<std::vector<double>, std::uint64_t>> sums;
  const auto labels = transformed.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto y = labels[i];
    if (contains(y))
      fail(ErrorKind::validation, "prototype update: class " + std::to_string(y) +
                                      " already has a prototype (class spaces are disjoint)");
    auto& [sum, n] = sums[y];
    if (sum.empty()) sum.assign(dim_, 0.0);
    k.accumulate_f32(sum.data(), transformed.row(i).data(), dim_);
    ++n;
  }
  if (sums.empty()) return;

  // merge new rows into ascending class order
  std::vector<std::uint32_t> ids;
  std::vector<double> matrix;
  std::vector<std::uint64_t> counts;
  std::vector<double> norms;
  const std::size_t total = class_ids_.size() + sums.size();
  ids.reserve(total);
  matrix.reserve(total * dim_);
  counts.reserve(total);
  norms.reserve(total);

  auto old = std::size_t{0};
  auto push_old = [&] {
    ids.push_back(class_ids_[old]);
    auto row = prototype_at(old);
    matrix.insert(matrix.end(), row.begin(), row.end());
    counts.push_back(counts_[old]);
    norms.push_back(norms_[old]);
    ++old;
  };
  for (auto& [y, entry] : sums) {
    while (old < class_ids_.size() && class_ids_[old] < y) push_old();
    auto& [sum, n] = entry;
    const double inv = static_cast<double>(n);
    for (auto& v : sum) v /= inv;
    ids.push_back(y);
    matrix.insert(matrix.end(), sum.begin(), sum.end());
    counts.push_back(n);
    norms.push_back(std::sqrt(k.sum_squares_f64(sum.data(), dim_)));
  }
  while (old < class_ids_.size()) push_old();

  class_ids_ = std::move(ids);
  matrix_ = std::move(matrix);
  counts_ = std::move(counts);
  norms_ = std::move(norms);
}

PrototypeBank PrototypeBank::from_parts(std::size_t dim, std::vector<std::uint32_t> class_ids,
                                        std::vector<double> matrix,
                                        std::vector<std::uint64_t> counts) {
  if (dim == 0) fail(ErrorKind::format, "bank: degenerate dimension");
  if (matrix.size() != class_ids.size() * dim || counts.size() != class_ids.size())
    fail(ErrorKind::format, "bank: part sizes disagree");
  for (std::size_t i = 1; i < class_ids.size(); ++i)
    if (class_ids[i - 1] >= class_ids[i])
      fail(ErrorKind::format, "bank: class IDs must be strictly ascending");
  for (double v : matrix)
    if (!std::isfinite(v)) fail(ErrorKind::format, "bank: non-finite prototype entry");
  for (auto n : counts)
    if (n == 0) fail(ErrorKind::format, "bank: zero sample count");

  PrototypeBank bank(dim);
  bank.class_ids_ = std::move(class_ids);
  bank.matrix_ = std::move(matrix);
  bank.counts_ = std::move(counts);
  const auto& k = simd::active_kernels();
  bank.norms_.resize(bank.class_ids_.size());
  for (std::size_t i = 0; i < bank.class_ids_.size(); ++i)
    bank.norms_[i] = std::sqrt(k.sum_squares_f64(bank.matrix_.data() + i * dim, dim));
  return bank;
}

PrototypeBank update_prototypes(PrototypeBank bank, const EmbeddingSet& transformed) {
  bank.add_classes(transformed);
  return bank;
}

Scores cosine_scores(const PrototypeBank& bank, std::span<const float> z) {
  if (z.size() != bank.dim())
    fail(ErrorKind::invalid_argument, "query width " + std::to_string(z.size()) +
                                          " != bank dim " + std::to_string(bank.dim()));
  const auto& k = simd::active_kernels();
  const double qnorm = std::sqrt(k.sum_squares_f32(z.data(), z.size()));
  if (qnorm == 0.0) fail(ErrorKind::invalid_argument, "all-zero query vector");

  Scores out;
  out.classes.assign(bank.class_ids().begin(), bank.class_ids().end());
  out.values.resize(out.classes.size());
  for (std::size_t i = 0; i < out.classes.size(); ++i) {
    const double wnorm = bank.norm_at(i);
    if (wnorm == 0.0) {
      out.values[i] = 0.0;
      continue;
    }
    const double c = k.dot_f32_f64(z.data(), bank.prototype_at(i).data(), z.size()) /
                     (qnorm * wnorm);
    out.values[i] = std::clamp(c, -1.0, 1.0);
  }
  return out;
}

Prediction decide(std::vector<std::uint32_t> classes, std::span<const double> logits) {
  if (classes.empty()) fail(ErrorKind::invalid_argument, "prediction over an empty bank");
  std::size_t best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i) {
    // strict > keeps the earliest index; classes are ascending
    if (logits[i] > logits[best]) best = i;
  }
  Prediction p;
  p.label = classes[best];
  p.probabilities.resize(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p.probabilities[i] = std::exp(logits[i] - logits[best]);
    total += p.probabilities[i];
  }
  for (auto& v : p.probabilities) v /= total;
  p.classes = std::move(classes);
  return p;
}

Prediction predict(const PrototypeBank& bank, std::span<const float> z) {
  if (bank.empty()) fail(ErrorKind::invalid_argument, "prediction over an empty bank");
  auto scores = cosine_scores(bank, z);
  return decide(std::move(scores.classes), scores.values);
}

Prediction predict_ensemble(const PrototypeBank& bank0, const PrototypeBank& bank1,
                            std::span<const float> z0, std::span<const float> z1) {
  if (!std::ranges::equal(bank0.class_ids(), bank1.class_ids()))
    fail(ErrorKind::invalid_argument, "ensemble: banks cover different class sets");
  if (bank0.empty()) fail(ErrorKind::invalid_argument, "prediction over an empty bank");
  auto s0 = cosine_scores(bank0, z0);
  const auto s1 = cosine_scores(bank1, z1);
  for (std::size_t i = 0; i < s0.values.size(); ++i) s0.values[i] += s1.values[i];
  return decide(std::move(s0.classes), s0.values);
}

void save_bank(const PrototypeBank& bank, const std::filesystem::path& dir) {
  if (bank.dim() == 0) fail(ErrorKind::validation, "bank: degenerate dimension");
  nlohmann::ordered_json meta;
  meta["format_version"] = 1;
  meta["dim"] = bank.dim();
  meta["num_classes"] = bank.num_classes();
  meta["dtype"] = "f64le";
  meta["label_dtype"] = "u32le";
  meta["count_dtype"] = "u64le";

  std::vector<double> matrix;
  matrix.reserve(bank.num_classes() * bank.dim());
  for (std::size_t i = 0; i < bank.num_classes(); ++i) {
    auto row = bank.prototype_at(i);
    matrix.insert(matrix.end(), row.begin(), row.end());
  }
  io::ensure_directory(dir);
  io::write_text(dir / "bank.json", meta.dump(2) + "\n");
  io::write_file(dir / "prototypes.bin", detail::encode_le<double>(matrix));
  io::write_file(dir / "classes.bin", detail::encode_le<std::uint32_t>(bank.class_ids()));
  io::write_file(dir / "counts.bin", detail::encode_le<std::uint64_t>(bank.counts()));
}

PrototypeBank load_bank(const std::filesystem::path& dir) {
  using nlohmann::json;
  const auto meta_path = dir / "bank.json";
  if (!std::filesystem::exists(meta_path))
    fail(ErrorKind::io, "missing file '" + meta_path.string() + "'");
  const auto text = io::read_file(meta_path);
  std::size_t dim = 0;
  std::size_t n = 0;
  try {
    const auto meta = json::parse(text.begin(), text.end());
    if (meta.at("format_version").get<int>() != 1 || meta.at("dtype") != "f64le" ||
        meta.at("label_dtype") != "u32le" || meta.at("count_dtype") != "u64le")
      fail(ErrorKind::format, "bank.json: unsupported format");
    dim = meta.at("dim").get<std::size_t>();
    n = meta.at("num_classes").get<std::size_t>();
  } catch (const json::exception& e) {
    fail(ErrorKind::format, "bank.json: " + std::string(e.what()));
  }
  const auto matrix = io::read_file(dir / "prototypes.bin");
  const auto classes = io::read_file(dir / "classes.bin");
  const auto counts = io::read_file(dir / "counts.bin");
  if (matrix.size() != n * dim * 8 || classes.size() != n * 4 || counts.size() != n * 8)
    fail(ErrorKind::format, "bank: data length mismatch");
  return PrototypeBank::from_parts(dim, detail::decode_le<std::uint32_t>(classes),
                                   detail::decode_le<double>(matrix),
                                   detail::decode_le<std::uint64_t>(counts));
}

}  // namespace tfcl
