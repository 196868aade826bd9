#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "votelab/dataset.hpp"

namespace votelab {

/// Vote masses within this distance are treated as equal, and a point-wise
/// error within this distance of 1/2 is treated as exactly 1/2.
inline constexpr double kTieTolerance = 1e-12;

enum class TieRule {
  /// Weights were perturbed upstream so exact ties do not occur; a residual
  /// tie falls back to the lowest label.
  perturbed_weights,
  /// Smallest class id among the tied maxima.
  lowest_label,
};

/// Per-example view of the ensemble: W_rho(x, y), the label-mass vector
/// p_c(x) = P_rho(h(x) = c), and membership in the TIE set.
struct PointwiseProfile {
  std::size_t num_examples = 0;
  int num_classes = 0;
  std::vector<double> w_rho;
  std::vector<double> label_mass;  // m x K, row-major
  std::vector<std::uint8_t> tie_flags;
  std::vector<Label> true_labels;

  std::span<const double> masses(std::size_t example) const {
    return std::span<const double>(label_mass)
        .subspan(example * static_cast<std::size_t>(num_classes),
                 static_cast<std::size_t>(num_classes));
  }
};

PointwiseProfile pointwise_profile(const PredictionDataset& data, const EnsembleWeights& weights);

std::vector<Label> majority_vote(const PointwiseProfile& profile, TieRule rule);

/// Ensemble-level summary. Fields that are undefined for the given ensemble
/// (disagreement_u and sigma1_sq for non-uniform weights or N = 1) are NaN.
struct EnsembleStats {
  double avg_error = 0.0;
  double disagreement_v = 0.0;
  double disagreement_u = std::numeric_limits<double>::quiet_NaN();
  double tandem = 0.0;
  double mv_error = 0.0;
  double polarization = 0.0;
  double epsilon_rho = 0.0;
  double prob_w_gt_half = 0.0;
  double second_moment_w = 0.0;
  double sigma1_sq = std::numeric_limits<double>::quiet_NaN();
};

EnsembleStats ensemble_stats(const PredictionDataset& data, const EnsembleWeights& weights,
                             TieRule rule);

/// P(W > 1/2) / E[W^2], with 0/0 defined as 0.
double polarization_ratio(double prob_w_gt_half, double second_moment_w);

/// Both sides of E_D[W^2] = E_{rho^2}[L(h, h')], computed independently:
/// the left from the profile, the right from classifier pairs.
struct TandemCheck {
  double pointwise_second_moment = 0.0;
  double pairwise_tandem = 0.0;
};

TandemCheck tandem_identity_check(const PointwiseProfile& profile, const PredictionDataset& data,
                                  const EnsembleWeights& weights);

/// sum_{i,j} w_i w_j L(h_i, h_j), from per-classifier error bitsets.
double pairwise_tandem(const PredictionDataset& data, const EnsembleWeights& weights);

struct CompetenceReport {
  bool competent = false;
  bool semi_competent = false;
  /// min_t of P(W in [t,1/2)) - P(W in [1/2,1-t]) over t in [0, 1/2].
  double worst_margin = 0.0;
  double worst_t = 0.0;
  /// min_t of P(W in [t,1/2]) - P(W in (1/2,1-t]) over t in [0, 1/2).
  double semi_worst_margin = 0.0;
  double semi_worst_t = 0.0;
};

/// Evaluates both dominance conditions exactly. Both sides are step
/// functions of t that only change at the points {W_j, 1 - W_j, 0, 1/2}, so
/// it suffices to look at those points and one interior point per gap.
CompetenceReport competence_check(const PointwiseProfile& profile);

struct TieSet {
  double fraction = 0.0;
  std::vector<std::size_t> indices;

  bool tie_free() const noexcept { return indices.empty(); }
};

TieSet tie_set(const PointwiseProfile& profile);

/// N x N matrix of pairwise disagreement rates Phi(h_i, h_j), row-major.
std::vector<double> pairwise_disagreement(const PredictionDataset& data);

/// Sample variance (1/(N-1)) of g1(i) = mean_{j != i} Phi(h_i, h_j).
/// Requires uniform weights and N >= 2.
double sigma1_estimate(const PredictionDataset& data, const EnsembleWeights& weights);

/// Smallest Delta with P_rho(h(x) not in A(x)) <= Delta on every example,
/// where A(x) is the true label plus the M-1 heaviest wrong labels (ties to
/// the lowest id). Requires 2 <= M <= K.
double entropy_profile(const PointwiseProfile& profile, int max_set_size);

}  // namespace votelab
