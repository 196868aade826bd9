#include "votelab/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "votelab/error.hpp"
#include "votelab/parallel.hpp"
#include "votelab/summation.hpp"

namespace votelab {

namespace {

void require_matching(const PredictionDataset& data, const EnsembleWeights& weights) {
  if (weights.size() != data.num_classifiers()) {
    throw ValidationError("ensemble has " + std::to_string(weights.size()) +
                          " weights but the dataset has " +
                          std::to_string(data.num_classifiers()) + " classifiers");
  }
}

bool near_half(double w) { return std::abs(w - 0.5) <= kTieTolerance; }

// Snaps values within tolerance of 1/2 onto 1/2 exactly.
double snap_half(double w) { return near_half(w) ? 0.5 : w; }

// Classifier error indicators packed 64 examples per word.
std::vector<std::uint64_t> error_bitsets(const PredictionDataset& data, std::size_t& words) {
  const std::size_t m = data.num_examples();
  const std::size_t n = data.num_classifiers();
  words = (m + 63) / 64;
  std::vector<std::uint64_t> bits(n * words, 0);
  for (std::size_t j = 0; j < m; ++j) {
    const Label y = data.true_label(j);
    const auto votes = data.row(j);
    for (std::size_t i = 0; i < n; ++i) {
      if (votes[i] != y) bits[i * words + j / 64] |= std::uint64_t{1} << (j % 64);
    }
  }
  return bits;
}

}  // namespace

PointwiseProfile pointwise_profile(const PredictionDataset& data, const EnsembleWeights& weights) {
  require_matching(data, weights);
  const std::size_t m = data.num_examples();
  const auto k = static_cast<std::size_t>(data.num_classes());
  const auto w = weights.values();

  PointwiseProfile profile;
  profile.num_examples = m;
  profile.num_classes = data.num_classes();
  profile.w_rho.assign(m, 0.0);
  profile.label_mass.assign(m * k, 0.0);
  profile.tie_flags.assign(m, 0);
  profile.true_labels.assign(data.true_labels().begin(), data.true_labels().end());

  parallel_for(m, [&](std::size_t begin, std::size_t end) {
    std::vector<CompensatedSum> mass(k);
    for (std::size_t j = begin; j < end; ++j) {
      std::fill(mass.begin(), mass.end(), CompensatedSum{});
      CompensatedSum wrong;
      const Label y = data.true_label(j);
      const auto votes = data.row(j);
      for (std::size_t i = 0; i < votes.size(); ++i) {
        mass[static_cast<std::size_t>(votes[i])].add(w[i]);
        if (votes[i] != y) wrong.add(w[i]);
      }
      double* row = profile.label_mass.data() + j * k;
      for (std::size_t c = 0; c < k; ++c) row[c] = mass[c].value();
      profile.w_rho[j] = wrong.value();

      if (near_half(row[static_cast<std::size_t>(y)])) {
        for (std::size_t c = 0; c < k; ++c) {
          if (c != static_cast<std::size_t>(y) && near_half(row[c])) {
            profile.tie_flags[j] = 1;
            break;
          }
        }
      }
    }
  });
  return profile;
}

std::vector<Label> majority_vote(const PointwiseProfile& profile, TieRule /*rule*/) {
  // Both rules reduce to "lowest label among the maxima": with perturbed
  // weights the maximum is unique except on a null set.
  std::vector<Label> votes(profile.num_examples);
  for (std::size_t j = 0; j < profile.num_examples; ++j) {
    const auto row = profile.masses(j);
    const double top = *std::max_element(row.begin(), row.end());
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] >= top - kTieTolerance) {
        votes[j] = static_cast<Label>(c);
        break;
      }
    }
  }
  return votes;
}

double polarization_ratio(double prob_w_gt_half, double second_moment_w) {
  if (second_moment_w <= 0.0) return 0.0;
  return prob_w_gt_half / second_moment_w;
}

double pairwise_tandem(const PredictionDataset& data, const EnsembleWeights& weights) {
  require_matching(data, weights);
  std::size_t words = 0;
  const auto bits = error_bitsets(data, words);
  const std::size_t n = data.num_classifiers();
  const auto m = static_cast<double>(data.num_examples());
  const auto w = weights.values();
  CompensatedSum total;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      std::size_t both = 0;
      for (std::size_t q = 0; q < words; ++q) {
        both += static_cast<std::size_t>(std::popcount(bits[a * words + q] & bits[b * words + q]));
      }
      const double rate = static_cast<double>(both) / m;
      total.add((a == b ? 1.0 : 2.0) * w[a] * w[b] * rate);
    }
  }
  return total.value();
}

std::vector<double> pairwise_disagreement(const PredictionDataset& data) {
  const std::size_t n = data.num_classifiers();
  const std::size_t m = data.num_examples();
  std::vector<std::size_t> counts(n * n, 0);
  for (std::size_t j = 0; j < m; ++j) {
    const auto votes = data.row(j);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        if (votes[a] != votes[b]) ++counts[a * n + b];
      }
    }
  }
  std::vector<double> phi(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double rate = static_cast<double>(counts[a * n + b]) / static_cast<double>(m);
      phi[a * n + b] = rate;
      phi[b * n + a] = rate;
    }
  }
  return phi;
}

double sigma1_estimate(const PredictionDataset& data, const EnsembleWeights& weights) {
  require_matching(data, weights);
  const std::size_t n = data.num_classifiers();
  if (n < 2) throw ValidationError("sigma1 estimate needs at least two classifiers");
  if (!weights.is_uniform()) throw ValidationError("sigma1 estimate requires uniform weights");
  const auto phi = pairwise_disagreement(data);
  std::vector<double> g1(n);
  for (std::size_t a = 0; a < n; ++a) {
    CompensatedSum row;
    for (std::size_t b = 0; b < n; ++b) {
      if (b != a) row.add(phi[a * n + b]);
    }
    g1[a] = row.value() / static_cast<double>(n - 1);
  }
  const double mean = compensated_sum(g1) / static_cast<double>(n);
  CompensatedSum sq;
  for (double g : g1) sq.add((g - mean) * (g - mean));
  return sq.value() / static_cast<double>(n - 1);
}

EnsembleStats ensemble_stats(const PredictionDataset& data, const EnsembleWeights& weights,
                             TieRule rule) {
  const auto profile = pointwise_profile(data, weights);
  const std::size_t m = data.num_examples();
  const std::size_t n = data.num_classifiers();
  const auto k = static_cast<std::size_t>(data.num_classes());
  const auto md = static_cast<double>(m);
  const auto w = weights.values();

  EnsembleStats s;

  std::vector<std::size_t> wrong(n, 0);
  for (std::size_t j = 0; j < m; ++j) {
    const auto votes = data.row(j);
    for (std::size_t i = 0; i < n; ++i) {
      if (votes[i] != data.true_label(j)) ++wrong[i];
    }
  }
  CompensatedSum avg;
  for (std::size_t i = 0; i < n; ++i) avg.add(w[i] * (static_cast<double>(wrong[i]) / md));
  s.avg_error = avg.value();

  // Per example: P(h != h') = S^2 - sum p_c^2 = sum_c p_c (S - p_c), and the
  // distinct-wrong-pair mass is the same expression over wrong labels only.
  CompensatedSum disagreement;
  CompensatedSum distinct_wrong;
  CompensatedSum above_half;
  CompensatedSum second_moment;
  for (std::size_t j = 0; j < m; ++j) {
    const auto row = profile.masses(j);
    const auto y = static_cast<std::size_t>(profile.true_labels[j]);
    CompensatedSum total;
    CompensatedSum wrong_total;
    for (std::size_t c = 0; c < k; ++c) {
      total.add(row[c]);
      if (c != y) wrong_total.add(row[c]);
    }
    const double all_mass = total.value();
    const double wrong_mass = wrong_total.value();
    CompensatedSum pair;
    CompensatedSum wrong_pair;
    for (std::size_t c = 0; c < k; ++c) {
      if (row[c] == 0.0) continue;
      pair.add(row[c] * (all_mass - row[c]));
      if (c != y) wrong_pair.add(row[c] * (wrong_mass - row[c]));
    }
    disagreement.add(std::max(0.0, pair.value()));
    distinct_wrong.add(std::max(0.0, wrong_pair.value()));

    const double wj = profile.w_rho[j];
    if (wj > 0.5 + kTieTolerance) above_half.add(1.0);
    second_moment.add(wj * wj);
  }
  s.disagreement_v = disagreement.value() / md;
  if (weights.is_uniform() && n >= 2) {
    const auto nd = static_cast<double>(n);
    s.disagreement_u = s.disagreement_v * nd / (nd - 1.0);
    s.sigma1_sq = sigma1_estimate(data, weights);
  }
  s.tandem = pairwise_tandem(data, weights);
  s.prob_w_gt_half = above_half.value() / md;
  s.second_moment_w = second_moment.value() / md;
  s.polarization = polarization_ratio(s.prob_w_gt_half, s.second_moment_w);
  s.epsilon_rho = s.avg_error > 0.0 ? (distinct_wrong.value() / md) / (2.0 * s.avg_error) : 0.0;

  const auto votes = majority_vote(profile, rule);
  std::size_t mistakes = 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (votes[j] != profile.true_labels[j]) ++mistakes;
  }
  s.mv_error = static_cast<double>(mistakes) / md;
  return s;
}

TandemCheck tandem_identity_check(const PointwiseProfile& profile, const PredictionDataset& data,
                                  const EnsembleWeights& weights) {
  CompensatedSum sq;
  for (double wj : profile.w_rho) sq.add(wj * wj);
  return {sq.value() / static_cast<double>(profile.num_examples), pairwise_tandem(data, weights)};
}

CompetenceReport competence_check(const PointwiseProfile& profile) {
  const std::size_t m = profile.num_examples;
  const auto md = static_cast<double>(m);

  // sorted W, and sorted 1 - W for the W >= 1/2 (resp. > 1/2) population
  std::vector<double> w(m);
  std::transform(profile.w_rho.begin(), profile.w_rho.end(), w.begin(), snap_half);
  std::sort(w.begin(), w.end());
  std::vector<double> upper_at_or_above;  // 1 - W for W >= 1/2
  std::vector<double> upper_above;        // 1 - W for W > 1/2
  for (double v : w) {
    if (v >= 0.5) upper_at_or_above.push_back(1.0 - v);
    if (v > 0.5) upper_above.push_back(1.0 - v);
  }
  std::sort(upper_at_or_above.begin(), upper_at_or_above.end());
  std::sort(upper_above.begin(), upper_above.end());

  const auto count_less = [](const std::vector<double>& v, double x) {
    return static_cast<double>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
  };
  const auto count_at_least = [&](const std::vector<double>& v, double x) {
    return static_cast<double>(v.size()) - count_less(v, x);
  };
  const double below_half = count_less(w, 0.5);
  const double at_or_below_half =
      static_cast<double>(std::upper_bound(w.begin(), w.end(), 0.5) - w.begin());

  std::vector<double> breakpoints{0.0, 0.5};
  for (double v : w) {
    if (v <= 0.5) breakpoints.push_back(v);
    if (1.0 - v <= 0.5) breakpoints.push_back(1.0 - v);
  }
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
  std::vector<double> candidates = breakpoints;
  for (std::size_t b = 0; b + 1 < breakpoints.size(); ++b) {
    candidates.push_back(0.5 * (breakpoints[b] + breakpoints[b + 1]));
  }
  std::sort(candidates.begin(), candidates.end());

  CompetenceReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  report.semi_worst_margin = std::numeric_limits<double>::infinity();
  for (double t : candidates) {
    // competence: P(W in [t, 1/2)) >= P(W in [1/2, 1 - t])
    const double lhs = (below_half - count_less(w, t)) / md;
    const double rhs = count_at_least(upper_at_or_above, t) / md;
    if (lhs - rhs < report.worst_margin) {
      report.worst_margin = lhs - rhs;
      report.worst_t = t;
    }
    if (t >= 0.5) continue;
    // semi-competence: P(W in [t, 1/2]) >= P(W in (1/2, 1 - t])
    const double semi_lhs = (at_or_below_half - count_less(w, t)) / md;
    const double semi_rhs = count_at_least(upper_above, t) / md;
    if (semi_lhs - semi_rhs < report.semi_worst_margin) {
      report.semi_worst_margin = semi_lhs - semi_rhs;
      report.semi_worst_t = t;
    }
  }
  report.competent = report.worst_margin >= 0.0;
  report.semi_competent = report.semi_worst_margin >= 0.0;
  return report;
}

TieSet tie_set(const PointwiseProfile& profile) {
  TieSet ties;
  for (std::size_t j = 0; j < profile.num_examples; ++j) {
    if (profile.tie_flags[j]) ties.indices.push_back(j);
  }
  ties.fraction =
      static_cast<double>(ties.indices.size()) / static_cast<double>(profile.num_examples);
  return ties;
}

double entropy_profile(const PointwiseProfile& profile, int max_set_size) {
  if (max_set_size < 2 || max_set_size > profile.num_classes) {
    throw ValidationError("entropy set size M must satisfy 2 <= M <= K (got M=" +
                          std::to_string(max_set_size) + ", K=" +
                          std::to_string(profile.num_classes) + ")");
  }
  const auto k = static_cast<std::size_t>(profile.num_classes);
  const auto keep = static_cast<std::size_t>(max_set_size - 1);
  double delta = 0.0;
  std::vector<std::size_t> wrong_labels;
  for (std::size_t j = 0; j < profile.num_examples; ++j) {
    const auto row = profile.masses(j);
    const auto y = static_cast<std::size_t>(profile.true_labels[j]);
    wrong_labels.clear();
    for (std::size_t c = 0; c < k; ++c) {
      if (c != y) wrong_labels.push_back(c);
    }
    std::stable_sort(wrong_labels.begin(), wrong_labels.end(),
                     [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
    CompensatedSum outside;
    for (std::size_t r = keep; r < wrong_labels.size(); ++r) outside.add(row[wrong_labels[r]]);
    delta = std::max(delta, outside.value());
  }
  return delta;
}

}  // namespace votelab
