#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "votelab/dataset.hpp"
#include "votelab/simgen.hpp"
#include "votelab/stats.hpp"

namespace votelab {

/// Statistics of uniform-weight M-classifier sub-ensembles, each averaged
/// arithmetically over the subsets evaluated (ratios eta and epsilon are
/// averaged per subset).
struct SubsampleStats {
  std::size_t subset_size = 0;
  double avg_error = 0.0;
  double disagreement = 0.0;  // V-statistic within the subset
  double epsilon = 0.0;
  double eta = 0.0;
  double mv_error = 0.0;
  std::size_t num_subsets = 0;
};

/// Column subsets of size `subset_size` out of `num_classifiers`: every
/// subset in lexicographic order when C(N, M) <= max_subsets, otherwise
/// `max_subsets` distinct subsets drawn with a generator seeded by `seed`.
std::vector<std::vector<std::size_t>> choose_subsets(std::size_t num_classifiers,
                                                     std::size_t subset_size,
                                                     std::size_t max_subsets, std::uint64_t seed);

SubsampleStats subsample_stats(const PredictionDataset& data, std::size_t subset_size,
                               std::size_t num_subsets, std::uint64_t seed,
                               TieRule rule = TieRule::lowest_label);

/// A target ensemble size; std::nullopt means N -> infinity.
using TargetSize = std::optional<std::size_t>;

/// ((N-1)/N) (M/(M-1)) D_M.
double predict_disagreement(const SubsampleStats& sub, TargetSize target);

enum class EtaMode {
  conjecture,  // eta = 4/3
  measured,    // eta = eta_M from the subsample
};

struct ExtrapolationOptions {
  /// Replace the triple-specific 3/2 growth factor by M/(M-1) so that
  /// subsets of any size M >= 2 are accepted. Experimental.
  bool allow_any_subset_size = false;
};

/// eta [E_M[L] + ((N-1)/N)(M/(M-1)) (eps_M E_M[L] - E_M[D]/2)], clamped at 0.
/// Without the experimental option only M = 3 is accepted.
double predict_mv_error(const SubsampleStats& sub, TargetSize target, EtaMode mode,
                        const ExtrapolationOptions& options = {});

struct GrowthCurve {
  std::vector<std::size_t> target_sizes;
  std::vector<double> predicted_mv_conjecture;
  std::vector<double> predicted_mv_measured;
  std::vector<double> predicted_disagreement;
  /// Averaged over sub-ensembles of the target size; nullopt when target > N.
  std::vector<std::optional<double>> actual_mv;
  std::vector<std::optional<double>> actual_disagreement;
  double d_infinity_hat = 0.0;
  SubsampleStats subsample;
};

GrowthCurve growth_curve(const PredictionDataset& data, std::size_t subset_size,
                         std::size_t num_subsets, const std::vector<std::size_t>& targets,
                         std::uint64_t seed, TieRule rule = TieRule::lowest_label,
                         const ExtrapolationOptions& options = {});

struct CltCheck {
  double mean_u = 0.0;
  /// (N/4) times the sample variance of U_N across trials.
  double var_scaled = 0.0;
  double sigma1_sq_true = 0.0;
  double d_infinity_true = 0.0;
};

/// Draws `trials` independent N-classifier ensembles from the sampler and
/// measures the mean and scaled variance of the disagreement U-statistic.
CltCheck ustat_clt_check(const ClassifierSampler& sampler, std::size_t num_classifiers,
                         std::size_t trials, std::uint64_t seed);

/// U_N = (N/(N-1)) * V-disagreement of a uniform ensemble.
double disagreement_ustat(const PredictionDataset& data);

}  // namespace votelab
