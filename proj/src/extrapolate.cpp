#include "votelab/extrapolate.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "votelab/error.hpp"
#include "votelab/parallel.hpp"
#include "votelab/random.hpp"
#include "votelab/summation.hpp"

namespace votelab {

namespace {

// C(n, k), saturating at `cap` + 1.
std::size_t binomial_capped(std::size_t n, std::size_t k, std::size_t cap) {
  k = std::min(k, n - k);
  long double value = 1.0L;
  for (std::size_t i = 1; i <= k; ++i) {
    value = value * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (value > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::size_t>(value + 0.5L);
}

// (target - 1) M / (target (M - 1)); M / (M - 1) for an infinite target.
double growth_factor(std::size_t subset_size, TargetSize target) {
  const auto m = static_cast<double>(subset_size);
  if (!target) return m / (m - 1.0);
  const auto n = static_cast<double>(*target);
  return ((n - 1.0) * m) / (n * (m - 1.0));
}

EnsembleWeights subset_weights(std::size_t size, TieRule rule, std::uint64_t seed,
                               std::size_t index) {
  auto w = EnsembleWeights::uniform(size);
  if (rule == TieRule::perturbed_weights) w = tie_free_perturb(w, derive_seed(seed, index));
  return w;
}

}  // namespace

std::vector<std::vector<std::size_t>> choose_subsets(std::size_t num_classifiers,
                                                     std::size_t subset_size,
                                                     std::size_t max_subsets, std::uint64_t seed) {
  if (subset_size < 1 || subset_size > num_classifiers) {
    throw ValidationError("subset size " + std::to_string(subset_size) +
                          " must lie in [1, N=" + std::to_string(num_classifiers) + "]");
  }
  if (max_subsets < 1) throw ValidationError("need at least one subset");
  std::vector<std::vector<std::size_t>> subsets;
  if (binomial_capped(num_classifiers, subset_size, max_subsets) <= max_subsets) {
    std::vector<std::size_t> current(subset_size);
    std::iota(current.begin(), current.end(), std::size_t{0});
    while (true) {
      subsets.push_back(current);
      std::size_t pos = subset_size;
      while (pos > 0 && current[pos - 1] == num_classifiers - subset_size + pos - 1) --pos;
      if (pos == 0) break;
      ++current[pos - 1];
      for (std::size_t q = pos; q < subset_size; ++q) current[q] = current[q - 1] + 1;
    }
    return subsets;
  }
  Rng rng(seed);
  std::set<std::vector<std::size_t>> seen;
  std::vector<std::size_t> indices(num_classifiers);
  while (subsets.size() < max_subsets) {
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    for (std::size_t q = 0; q < subset_size; ++q) {
      std::uniform_int_distribution<std::size_t> pick(q, num_classifiers - 1);
      std::swap(indices[q], indices[pick(rng)]);
    }
    std::vector<std::size_t> subset(indices.begin(),
                                    indices.begin() + static_cast<std::ptrdiff_t>(subset_size));
    std::sort(subset.begin(), subset.end());
    if (seen.insert(subset).second) subsets.push_back(std::move(subset));
  }
  return subsets;
}

SubsampleStats subsample_stats(const PredictionDataset& data, std::size_t subset_size,
                               std::size_t num_subsets, std::uint64_t seed, TieRule rule) {
  if (subset_size < 2) throw ValidationError("subset size M must be at least 2");
  if (subset_size > data.num_classifiers()) {
    throw ValidationError("subset size M=" + std::to_string(subset_size) +
                          " exceeds the ensemble size N=" +
                          std::to_string(data.num_classifiers()));
  }
  const auto subsets = choose_subsets(data.num_classifiers(), subset_size, num_subsets, seed);
  std::vector<EnsembleStats> per_subset(subsets.size());
  parallel_for(subsets.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const auto sub = data.select_classifiers(subsets[s]);
      per_subset[s] = ensemble_stats(sub, subset_weights(subset_size, rule, seed, s), rule);
    }
  });
  CompensatedSum avg, disagreement, epsilon, eta, mv;
  for (const auto& s : per_subset) {
    avg.add(s.avg_error);
    disagreement.add(s.disagreement_v);
    epsilon.add(s.epsilon_rho);
    eta.add(s.polarization);
    mv.add(s.mv_error);
  }
  const auto count = static_cast<double>(per_subset.size());
  SubsampleStats out;
  out.subset_size = subset_size;
  out.num_subsets = per_subset.size();
  out.avg_error = avg.value() / count;
  out.disagreement = disagreement.value() / count;
  out.epsilon = epsilon.value() / count;
  out.eta = eta.value() / count;
  out.mv_error = mv.value() / count;
  return out;
}

double predict_disagreement(const SubsampleStats& sub, TargetSize target) {
  if (sub.subset_size < 2) throw ValidationError("subset size M must be at least 2");
  if (target && *target < 2) throw ValidationError("target ensemble size must be at least 2");
  return growth_factor(sub.subset_size, target) * sub.disagreement;
}

double predict_mv_error(const SubsampleStats& sub, TargetSize target, EtaMode mode,
                        const ExtrapolationOptions& options) {
  if (sub.subset_size != 3 && !options.allow_any_subset_size) {
    throw ValidationError("the majority-vote extrapolation is defined for triples (M=3); got M=" +
                          std::to_string(sub.subset_size));
  }
  if (sub.subset_size < 2) throw ValidationError("subset size M must be at least 2");
  if (target && *target < 1) throw ValidationError("target ensemble size must be at least 1");
  const double eta = mode == EtaMode::conjecture ? 4.0 / 3.0 : sub.eta;
  const double growth = growth_factor(sub.subset_size, target);
  const double raw =
      eta * (sub.avg_error +
             growth * (sub.epsilon * sub.avg_error - 0.5 * sub.disagreement));
  return std::max(0.0, raw);
}

double disagreement_ustat(const PredictionDataset& data) {
  const std::size_t n = data.num_classifiers();
  if (n < 2) throw ValidationError("U-statistic needs at least two classifiers");
  const auto k = static_cast<std::size_t>(data.num_classes());
  std::vector<std::size_t> counts(k);
  CompensatedSum total;
  for (std::size_t j = 0; j < data.num_examples(); ++j) {
    std::fill(counts.begin(), counts.end(), 0);
    for (Label h : data.row(j)) ++counts[static_cast<std::size_t>(h)];
    std::size_t same = 0;
    for (std::size_t c : counts) same += c * c;
    // ordered pairs (a != b) that disagree
    total.add(static_cast<double>(n * n - same));
  }
  const auto nd = static_cast<double>(n);
  return total.value() / (static_cast<double>(data.num_examples()) * nd * (nd - 1.0));
}

GrowthCurve growth_curve(const PredictionDataset& data, std::size_t subset_size,
                         std::size_t num_subsets, const std::vector<std::size_t>& targets,
                         std::uint64_t seed, TieRule rule, const ExtrapolationOptions& options) {
  if (targets.empty()) throw ValidationError("need at least one target ensemble size");
  GrowthCurve curve;
  curve.subsample = subsample_stats(data, subset_size, num_subsets, seed, rule);
  curve.d_infinity_hat = predict_disagreement(curve.subsample, std::nullopt);
  curve.target_sizes = targets;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const std::size_t target = targets[t];
    if (target < 2) throw ValidationError("target ensemble sizes must be at least 2");
    curve.predicted_mv_conjecture.push_back(
        predict_mv_error(curve.subsample, target, EtaMode::conjecture, options));
    curve.predicted_mv_measured.push_back(
        predict_mv_error(curve.subsample, target, EtaMode::measured, options));
    curve.predicted_disagreement.push_back(predict_disagreement(curve.subsample, target));

    if (target > data.num_classifiers()) {
      curve.actual_mv.emplace_back();
      curve.actual_disagreement.emplace_back();
      continue;
    }
    const std::uint64_t target_seed = derive_seed(seed, 0x7a11ULL + t);
    const auto subsets = choose_subsets(data.num_classifiers(), target, num_subsets, target_seed);
    std::vector<double> mv(subsets.size());
    std::vector<double> disagreement(subsets.size());
    parallel_for(subsets.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t s = begin; s < end; ++s) {
        const auto sub = data.select_classifiers(subsets[s]);
        const auto profile = pointwise_profile(sub, subset_weights(target, rule, target_seed, s));
        const auto votes = majority_vote(profile, rule);
        std::size_t wrong = 0;
        for (std::size_t j = 0; j < votes.size(); ++j) {
          if (votes[j] != profile.true_labels[j]) ++wrong;
        }
        mv[s] = static_cast<double>(wrong) / static_cast<double>(votes.size());
        const auto nd = static_cast<double>(target);
        disagreement[s] = disagreement_ustat(sub) * (nd - 1.0) / nd;
      }
    });
    const auto count = static_cast<double>(subsets.size());
    curve.actual_mv.emplace_back(compensated_sum(mv) / count);
    curve.actual_disagreement.emplace_back(compensated_sum(disagreement) / count);
  }
  return curve;
}

CltCheck ustat_clt_check(const ClassifierSampler& sampler, std::size_t num_classifiers,
                         std::size_t trials, std::uint64_t seed) {
  if (num_classifiers < 10) throw ValidationError("CLT check needs N >= 10");
  if (trials < 100) throw ValidationError("CLT check needs at least 100 trials");
  std::vector<double> u(trials);
  parallel_for(trials, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng(derive_seed(seed, t));
      u[t] = disagreement_ustat(sampler.sample_ensemble(num_classifiers, rng));
    }
  });
  const auto count = static_cast<double>(trials);
  const double mean = compensated_sum(u) / count;
  CompensatedSum sq;
  for (double v : u) sq.add((v - mean) * (v - mean));
  const double variance = sq.value() / (count - 1.0);
  CltCheck out;
  out.mean_u = mean;
  out.var_scaled = static_cast<double>(num_classifiers) / 4.0 * variance;
  out.sigma1_sq_true = sampler.sigma1_sq();
  out.d_infinity_true = sampler.d_infinity();
  return out;
}

}  // namespace votelab
