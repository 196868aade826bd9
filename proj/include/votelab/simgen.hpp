#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "votelab/dataset.hpp"
#include "votelab/random.hpp"

namespace votelab {

/// Worked-example data layouts for a two-label split-vote ensemble. Label 0
/// is the label voted by the p-fraction of the ensemble.
enum class SplitCase {
  all_first,   // every example has true label 0
  half_half,   // first half label 0, second half label 1
  all_second,  // every example has true label 1
};

struct SyntheticEnsemble {
  PredictionDataset data;
  EnsembleWeights weights;
};

/// A p-fraction of the ensemble always votes label 0, the rest always vote
/// label 1. With N = 2 this is the weighted pair (p, 1 - p); for larger N,
/// N*p must be an integer and the weights are uniform.
SyntheticEnsemble make_split_vote(double p, SplitCase layout, std::size_t num_examples,
                                  std::size_t num_classifiers = 2);

/// On every example a (1 - eps) fraction of the ensemble votes the true
/// label and the remaining eps fraction votes one wrong label, rotated across
/// examples. Yields mv_error = 0, avg_error = eps, disagreement = 2 eps (1 - eps).
SyntheticEnsemble make_pathological(int num_classes, double epsilon, std::size_t num_examples,
                                    std::size_t num_classifiers = 2);

struct DirichletEnsemble {
  PredictionDataset data;
  /// Generating label-mass vectors, m x K row-major.
  std::vector<double> label_mass;
};

/// Per example: uniform true label, a label-mass vector drawn from
/// Dirichlet(concentration + correct_bias * 1{c = y}), then N i.i.d. votes.
DirichletEnsemble make_dirichlet_confusion(int num_classes, std::size_t num_examples,
                                           std::size_t num_classifiers, double concentration,
                                           double correct_bias, std::uint64_t seed);

struct FinitePoolEnsemble {
  PredictionDataset data;
  double d_infinity = 0.0;
  double sigma1_sq = 0.0;
};

enum class SamplerKind { split_vote, pathological, dirichlet_confusion, finite_pool };

/// A distribution rho over classifiers from which ensembles are drawn i.i.d.
/// Two representations cover every kind: an explicit finite pool of
/// prediction vectors with probabilities, or independent per-example
/// categorical votes.
class ClassifierSampler {
 public:
  static ClassifierSampler finite_pool(std::vector<std::vector<Label>> pool,
                                       std::vector<double> probs, std::vector<Label> true_labels,
                                       int num_classes);
  static ClassifierSampler split_vote(double p, SplitCase layout, std::size_t num_examples);
  static ClassifierSampler pathological(int num_classes, double epsilon,
                                        std::size_t num_examples);
  static ClassifierSampler dirichlet_confusion(int num_classes, std::size_t num_examples,
                                               double concentration, double correct_bias,
                                               std::uint64_t seed);

  SamplerKind kind() const noexcept { return kind_; }
  std::size_t num_examples() const noexcept { return true_labels_.size(); }
  int num_classes() const noexcept { return num_classes_; }
  std::span<const Label> true_labels() const noexcept { return true_labels_; }

  /// Per-example vote distribution (m x K) for the categorical kinds; empty
  /// for pool-backed samplers.
  std::span<const double> vote_mass() const noexcept { return vote_mass_; }

  /// One classifier's predictions on every example.
  void draw_classifier(Rng& rng, std::span<Label> out) const;

  /// N i.i.d. classifiers.
  PredictionDataset sample_ensemble(std::size_t num_classifiers, Rng& rng) const;

  /// E_{rho^2} Phi(h, h'), the limiting disagreement.
  double d_infinity() const;
  /// Var_h E_{h'} Phi(h, h').
  double sigma1_sq() const;

 private:
  ClassifierSampler() = default;

  SamplerKind kind_ = SamplerKind::finite_pool;
  int num_classes_ = 0;
  std::vector<Label> true_labels_;
  // finite pool
  std::vector<std::vector<Label>> pool_;
  std::vector<double> probs_;
  // per-example categorical votes (m x K)
  std::vector<double> vote_mass_;
};

/// N i.i.d. draws from a finite pool, plus the exact D_inf and sigma1^2 of
/// the pool distribution.
FinitePoolEnsemble make_finite_pool(std::vector<std::vector<Label>> pool,
                                    std::vector<double> probs, std::vector<Label> true_labels,
                                    int num_classes, std::size_t num_classifiers,
                                    std::uint64_t seed);

}  // namespace votelab
