#include "votelab/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "votelab/error.hpp"
#include "votelab/random.hpp"
#include "votelab/summation.hpp"

namespace votelab {

PredictionDataset::PredictionDataset(std::vector<Label> true_labels,
                                     std::vector<Label> predictions,
                                     std::size_t num_classifiers,
                                     std::optional<int> declared_classes)
    : true_labels_(std::move(true_labels)),
      predictions_(std::move(predictions)),
      num_classifiers_(num_classifiers) {
  if (true_labels_.empty()) throw ValidationError("dataset has no examples");
  if (num_classifiers_ == 0) throw ValidationError("dataset has no classifiers");
  if (predictions_.size() != true_labels_.size() * num_classifiers_) {
    throw ValidationError("prediction matrix has " + std::to_string(predictions_.size()) +
                          " entries, expected " +
                          std::to_string(true_labels_.size() * num_classifiers_));
  }
  Label max_label = 0;
  for (Label y : true_labels_) {
    if (y < 0) throw ValidationError("negative true label");
    max_label = std::max(max_label, y);
  }
  for (Label h : predictions_) {
    if (h < 0) throw ValidationError("negative predicted label");
    max_label = std::max(max_label, h);
  }
  const int observed = std::max(2, static_cast<int>(max_label) + 1);
  if (declared_classes) {
    if (*declared_classes < observed) {
      throw ValidationError("declared K=" + std::to_string(*declared_classes) +
                            " is smaller than 1 + max observed label (" +
                            std::to_string(max_label + 1) + ")");
    }
    num_classes_ = *declared_classes;
  } else {
    num_classes_ = observed;
  }
}

std::vector<Label> PredictionDataset::column(std::size_t classifier) const {
  std::vector<Label> out(num_examples());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = prediction(j, classifier);
  return out;
}

PredictionDataset PredictionDataset::select_classifiers(
    std::span<const std::size_t> columns) const {
  for (std::size_t c : columns) {
    if (c >= num_classifiers_) throw ValidationError("classifier index out of range");
  }
  std::vector<Label> preds;
  preds.reserve(num_examples() * columns.size());
  for (std::size_t j = 0; j < num_examples(); ++j) {
    for (std::size_t c : columns) preds.push_back(prediction(j, c));
  }
  return PredictionDataset(true_labels_, std::move(preds), columns.size(), num_classes_);
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

PredictionDataset parse_predictions(std::istream& in, std::optional<int> declared_classes) {
  if (declared_classes && *declared_classes < 2) {
    throw ValidationError("declared K must be at least 2");
  }
  std::string line;
  std::vector<std::string> column_names;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw ValidationError("prediction file is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  for (auto f : split_fields(line)) column_names.emplace_back(trim(f));
  if (column_names.size() < 2 || column_names.front() != "y") {
    throw ParseError(0, "header must be 'y,h1,...,hN'");
  }
  const std::size_t num_classifiers = column_names.size() - 1;

  std::vector<Label> labels;
  std::vector<Label> predictions;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split_fields(line);
    if (fields.size() != column_names.size()) {
      throw ParseError(row, "expected " + std::to_string(column_names.size()) + " columns, got " +
                                std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto field = trim(fields[c]);
      long value = -1;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || value < 0 ||
          value > INT32_MAX) {
        throw ParseError(row, "column " + column_names[c] + ": '" + std::string(field) +
                                  "' is not a nonnegative integer label");
      }
      if (declared_classes && value >= *declared_classes) {
        throw ValidationError("row " + std::to_string(row) + ", column " + column_names[c] +
                              ": label " + std::to_string(value) + " outside [0, " +
                              std::to_string(*declared_classes) + ")");
      }
      (c == 0 ? labels : predictions).push_back(static_cast<Label>(value));
    }
  }
  if (labels.empty()) throw ValidationError("prediction file has a header but no rows");
  return PredictionDataset(std::move(labels), std::move(predictions), num_classifiers,
                           declared_classes);
}

PredictionDataset load_predictions(const std::filesystem::path& path,
                                   std::optional<int> declared_classes) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open prediction file " + path.string());
  return parse_predictions(in, declared_classes);
}

void write_predictions(const PredictionDataset& data, std::ostream& out) {
  out << 'y';
  for (std::size_t i = 0; i < data.num_classifiers(); ++i) out << ",h" << (i + 1);
  out << '\n';
  for (std::size_t j = 0; j < data.num_examples(); ++j) {
    out << data.true_label(j);
    for (Label h : data.row(j)) out << ',' << h;
    out << '\n';
  }
}

std::string predictions_to_csv(const PredictionDataset& data) {
  std::ostringstream out;
  write_predictions(data, out);
  return out.str();
}

EnsembleWeights EnsembleWeights::uniform(std::size_t num_classifiers) {
  if (num_classifiers == 0) throw ValidationError("ensemble needs at least one classifier");
  EnsembleWeights w;
  w.weights_.assign(num_classifiers, 1.0 / static_cast<double>(num_classifiers));
  return w;
}

EnsembleWeights EnsembleWeights::from_values(std::vector<double> raw) {
  if (raw.empty()) throw ValidationError("ensemble needs at least one classifier");
  CompensatedSum total;
  for (double v : raw) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError("weights must be finite and nonnegative");
    }
    total.add(v);
  }
  const double sum = total.value();
  if (!(sum > 0.0)) throw ValidationError("weights sum to zero");
  const bool all_equal =
      std::all_of(raw.begin(), raw.end(), [&](double v) { return v == raw.front(); });
  EnsembleWeights w;
  if (all_equal) return uniform(raw.size());
  w.weights_ = std::move(raw);
  // Already-normalized input is kept bit-for-bit so that files round-trip.
  const double slack = 4.0 * static_cast<double>(w.weights_.size()) *
                       std::numeric_limits<double>::epsilon();
  if (std::abs(sum - 1.0) <= slack) return w;
  for (double& v : w.weights_) v /= sum;
  return w;
}

bool EnsembleWeights::is_uniform() const noexcept {
  return std::all_of(weights_.begin(), weights_.end(),
                     [&](double v) { return v == weights_.front(); });
}

EnsembleWeights tie_free_perturb(const EnsembleWeights& weights, std::uint64_t seed,
                                 double magnitude) {
  if (!(magnitude >= 0.0)) throw ValidationError("perturbation magnitude must be nonnegative");
  Rng rng(seed);
  std::uniform_real_distribution<double> noise(0.0, magnitude);
  std::vector<double> raw(weights.values().begin(), weights.values().end());
  CompensatedSum total;
  for (double& v : raw) {
    v += noise(rng);
    total.add(v);
  }
  const double sum = total.value();
  EnsembleWeights out;
  out.weights_ = std::move(raw);
  for (double& v : out.weights_) v /= sum;
  out.perturbation_seed_ = seed;
  return out;
}

EnsembleWeights parse_weights(std::string_view json, std::optional<std::size_t> expected) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("weights file is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ValidationError("weights file must be a JSON array of reals");
  std::vector<double> raw;
  for (const auto& v : doc) {
    if (!v.is_number()) throw ValidationError("weights file must contain only numbers");
    raw.push_back(v.get<double>());
  }
  if (expected && raw.size() != *expected) {
    throw ValidationError("weights file has " + std::to_string(raw.size()) +
                          " entries but the ensemble has " + std::to_string(*expected) +
                          " classifiers");
  }
  return EnsembleWeights::from_values(std::move(raw));
}

EnsembleWeights load_weights(const std::filesystem::path& path,
                             std::optional<std::size_t> expected) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open weights file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_weights(buffer.str(), expected);
}

std::string weights_to_json(const EnsembleWeights& weights) {
  nlohmann::json doc = nlohmann::json::array();
  for (double v : weights.values()) doc.push_back(v);
  return doc.dump();
}

}  // namespace votelab
