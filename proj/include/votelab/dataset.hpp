#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace votelab {

using Label = std::int32_t;

/// Empirical test distribution: m examples with true labels and the
/// predictions of N classifiers, every label in [0, K). Each example carries
/// mass 1/m. Predictions are stored example-major (row j holds the N votes
/// cast on example j). Immutable once constructed.
class PredictionDataset {
 public:
  /// `predictions` holds m*N labels, row-major. K is 1 + max observed label
  /// (at least 2) unless `declared_classes` is given, in which case it must be
  /// at least that value and wins.
  PredictionDataset(std::vector<Label> true_labels, std::vector<Label> predictions,
                    std::size_t num_classifiers, std::optional<int> declared_classes = {});

  std::size_t num_examples() const noexcept { return true_labels_.size(); }
  std::size_t num_classifiers() const noexcept { return num_classifiers_; }
  int num_classes() const noexcept { return num_classes_; }

  std::span<const Label> true_labels() const noexcept { return true_labels_; }
  Label true_label(std::size_t example) const { return true_labels_[example]; }

  Label prediction(std::size_t example, std::size_t classifier) const {
    return predictions_[example * num_classifiers_ + classifier];
  }

  /// Votes of all classifiers on one example.
  std::span<const Label> row(std::size_t example) const {
    return std::span<const Label>(predictions_).subspan(example * num_classifiers_,
                                                        num_classifiers_);
  }

  std::vector<Label> column(std::size_t classifier) const;

  /// Sub-ensemble restricted to the given classifier columns, in that order.
  /// K is carried over.
  PredictionDataset select_classifiers(std::span<const std::size_t> columns) const;

  friend bool operator==(const PredictionDataset&, const PredictionDataset&) = default;

 private:
  std::vector<Label> true_labels_;
  std::vector<Label> predictions_;
  std::size_t num_classifiers_ = 0;
  int num_classes_ = 0;
};

/// Reads the `y,h1,...,hN` CSV format.
PredictionDataset load_predictions(const std::filesystem::path& path,
                                   std::optional<int> declared_classes = {});
PredictionDataset parse_predictions(std::istream& in, std::optional<int> declared_classes = {});
void write_predictions(const PredictionDataset& data, std::ostream& out);
std::string predictions_to_csv(const PredictionDataset& data);

/// Discrete distribution rho over the N classifiers: nonnegative weights
/// summing to 1.
class EnsembleWeights {
 public:
  static EnsembleWeights uniform(std::size_t num_classifiers);

  /// Normalizes nonnegative raw weights by their sum.
  static EnsembleWeights from_values(std::vector<double> raw);

  std::span<const double> values() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }

  /// All weights bitwise equal.
  bool is_uniform() const noexcept;
  bool perturbed() const noexcept { return perturbation_seed_.has_value(); }
  std::optional<std::uint64_t> perturbation_seed() const noexcept { return perturbation_seed_; }

  friend bool operator==(const EnsembleWeights&, const EnsembleWeights&) = default;

 private:
  friend EnsembleWeights tie_free_perturb(const EnsembleWeights&, std::uint64_t, double);

  std::vector<double> weights_;
  std::optional<std::uint64_t> perturbation_seed_;
};

inline constexpr double kDefaultPerturbation = 1e-4;

/// Adds i.i.d. uniform [0, magnitude] noise to every weight and renormalizes.
/// Deterministic in `seed`; makes exact vote ties a probability-zero event.
EnsembleWeights tie_free_perturb(const EnsembleWeights& weights, std::uint64_t seed,
                                 double magnitude = kDefaultPerturbation);

/// JSON array of N reals.
EnsembleWeights parse_weights(std::string_view json, std::optional<std::size_t> expected = {});
EnsembleWeights load_weights(const std::filesystem::path& path,
                             std::optional<std::size_t> expected = {});
std::string weights_to_json(const EnsembleWeights& weights);

}  // namespace votelab
