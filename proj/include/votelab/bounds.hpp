#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "votelab/dataset.hpp"
#include "votelab/stats.hpp"

namespace votelab {

/// One evaluated bound. `value` is `raw` clamped at 0; `applicable` says
/// whether the bound's preconditions hold for the inputs it was fed.
struct BoundValue {
  double value = 0.0;
  double raw = 0.0;
  bool applicable = true;
  std::string note;
};

/// Structural facts about the ensemble that decide which bounds apply.
struct EnsembleConditions {
  bool competent = false;
  bool semi_competent = false;
  bool tie_free = false;
};

/// L(MV) <= 2 E[L].
BoundValue first_order(const EnsembleStats& stats);

/// Chebyshev-Cantelli C-bound; requires E[L] < 1/2.
BoundValue c_bound(const EnsembleStats& stats);

/// 4 E[L] - 2 E[D]; binary problems only.
BoundValue binary_second_order(const EnsembleStats& stats, int num_classes);

/// L(MV) <= E[L] for competent, or tie-free and semi-competent, ensembles.
BoundValue competence_first_order(const EnsembleStats& stats, const EnsembleConditions& cond);

/// (4(K-1)/K)(E[L] - E[D]/2) under the same conditions.
BoundValue competence_second_order(const EnsembleStats& stats, int num_classes,
                                   const EnsembleConditions& cond);

/// (2 eta (K-1)/K)(E[L] - E[D]/2). `eta` defaults to the measured
/// polarization; a smaller eta is reported but marked inapplicable.
BoundValue polarized_bound(const EnsembleStats& stats, int num_classes,
                           std::optional<double> eta = {});

/// (2 eta (M-1)/M)[(1 + Delta/(M-1)) E[L] - E[D]/2] for ensembles whose
/// votes fall outside a size-M label set containing y with mass <= Delta.
BoundValue entropy_bound(const EnsembleStats& stats, int max_set_size, double delta, double eta);

/// The entropy bound at (M, Delta) = (N + 1, 0).
BoundValue finite_ensemble_bound(const EnsembleStats& stats, std::size_t num_classifiers,
                                 double eta);

/// eta [(1 + eps) E[L] - E[D]/2]. `epsilon` defaults to the measured
/// epsilon_rho, the smallest value satisfying the entropy condition.
BoundValue epsilon_bound(const EnsembleStats& stats, double eta,
                         std::optional<double> epsilon = {});

/// The K-dependent epsilon (K-2)/(2(K-1)) that every ensemble satisfies.
double worst_case_epsilon(int num_classes);

/// High-probability upper bound on the polarization from m samples, with
/// S = mean W^2 and P = mean 1(W > 1/2):
///   max{4/3, ((sqrt(a) + sqrt(a + 4SP)) / (2S))^2},  a = 3 log(1/delta) / (8m).
double polarization_upper_bound(double second_moment, double prob_above_half,
                                std::size_t num_examples, double delta_conf);

struct BoundOptions {
  TieRule tie_rule = TieRule::perturbed_weights;
  std::optional<double> eta;
  std::optional<double> epsilon;
  /// Label-set size for the entropy-restricted bound; defaults to 2.
  std::optional<int> entropy_set_size;
  /// User-supplied Delta; defaults to entropy_profile(M).
  std::optional<double> entropy_delta;
  double delta_conf = 0.05;
};

struct BoundEntry {
  std::string name;
  /// "mv_error" for bounds on the majority-vote error, "polarization" for
  /// the bound on eta_rho.
  std::string target;
  BoundValue bound;
};

struct BoundParams {
  int num_classes = 0;
  std::size_t num_classifiers = 0;
  std::size_t num_examples = 0;
  int entropy_set_size = 2;
  double entropy_delta = 0.0;
  double epsilon = 0.0;
  double eta = 0.0;
  double delta_conf = 0.05;
};

struct BoundReport {
  std::vector<BoundEntry> entries;
  EnsembleStats inputs;
  EnsembleConditions conditions;
  BoundParams params;

  const BoundEntry* find(const std::string& name) const;
};

/// Evaluates every bound in the catalog with precondition checks.
BoundReport all_bounds(const PredictionDataset& data, const EnsembleWeights& weights,
                       const BoundOptions& options = {});

}  // namespace votelab
