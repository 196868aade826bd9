#include "votelab/simgen.hpp"

#include <cmath>
#include <random>

#include "votelab/error.hpp"
#include "votelab/summation.hpp"

namespace votelab {

namespace {

std::vector<Label> split_labels(SplitCase layout, std::size_t m) {
  if (m == 0) throw ValidationError("need at least one example");
  std::vector<Label> y(m, 0);
  switch (layout) {
    case SplitCase::all_first:
      break;
    case SplitCase::all_second:
      std::fill(y.begin(), y.end(), 1);
      break;
    case SplitCase::half_half:
      if (m % 2 != 0) throw ValidationError("half-half layout needs an even number of examples");
      std::fill(y.begin() + static_cast<std::ptrdiff_t>(m / 2), y.end(), 1);
      break;
  }
  return y;
}

std::size_t integral_count(double fraction, std::size_t n, const char* what) {
  const double scaled = fraction * static_cast<double>(n);
  const double rounded = std::round(scaled);
  if (std::abs(scaled - rounded) > 1e-9) {
    throw ValidationError(std::string(what) + " times N must be an integer");
  }
  return static_cast<std::size_t>(rounded);
}

// Rotated wrong label for example j with true label y.
Label rotated_wrong(Label y, std::size_t j, int k) {
  const auto offset = 1 + static_cast<int>(j % static_cast<std::size_t>(k - 1));
  return static_cast<Label>((y + offset) % k);
}

std::vector<Label> pathological_labels(int k, std::size_t m) {
  std::vector<Label> y(m);
  for (std::size_t j = 0; j < m; ++j) y[j] = static_cast<Label>(j % static_cast<std::size_t>(k));
  return y;
}

// N = 2: the pair (f0, f1) weighted (share, 1 - share). Otherwise N uniform
// classifiers, share * N of them equal to f0 and the rest to f1.
SyntheticEnsemble two_function_ensemble(const std::vector<Label>& y, const std::vector<Label>& f0,
                                        const std::vector<Label>& f1, double f0_share,
                                        std::size_t n, int k, const char* what) {
  const std::size_t m = y.size();
  std::vector<Label> preds;
  preds.reserve(m * n);
  if (n == 2) {
    for (std::size_t j = 0; j < m; ++j) {
      preds.push_back(f0[j]);
      preds.push_back(f1[j]);
    }
    return {PredictionDataset(y, std::move(preds), 2, k),
            EnsembleWeights::from_values({f0_share, 1.0 - f0_share})};
  }
  if (n == 0) throw ValidationError("need at least one classifier");
  const std::size_t first = integral_count(f0_share, n, what);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) preds.push_back(i < first ? f0[j] : f1[j]);
  }
  return {PredictionDataset(y, std::move(preds), n, k), EnsembleWeights::uniform(n)};
}

}  // namespace

SyntheticEnsemble make_split_vote(double p, SplitCase layout, std::size_t num_examples,
                                  std::size_t num_classifiers) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("split fraction p must lie in (0, 1)");
  const auto y = split_labels(layout, num_examples);
  return two_function_ensemble(y, std::vector<Label>(num_examples, 0),
                               std::vector<Label>(num_examples, 1), p, num_classifiers, 2, "p");
}

SyntheticEnsemble make_pathological(int num_classes, double epsilon, std::size_t num_examples,
                                    std::size_t num_classifiers) {
  if (num_classes < 2) throw ValidationError("K must be at least 2");
  if (!(epsilon >= 0.0)) throw ValidationError("epsilon must be nonnegative");
  if (!(epsilon < 0.5)) throw ValidationError("epsilon must be below 1/2 or the vote flips");
  if (num_examples == 0) throw ValidationError("need at least one example");
  const auto y = pathological_labels(num_classes, num_examples);
  std::vector<Label> wrong(num_examples);
  for (std::size_t j = 0; j < num_examples; ++j) wrong[j] = rotated_wrong(y[j], j, num_classes);
  return two_function_ensemble(y, y, wrong, 1.0 - epsilon, num_classifiers, num_classes,
                               "1 - epsilon");
}

ClassifierSampler ClassifierSampler::finite_pool(std::vector<std::vector<Label>> pool,
                                                 std::vector<double> probs,
                                                 std::vector<Label> true_labels,
                                                 int num_classes) {
  if (pool.empty()) throw ValidationError("classifier pool is empty");
  if (pool.size() != probs.size()) throw ValidationError("pool and probabilities differ in size");
  if (true_labels.empty()) throw ValidationError("need at least one example");
  for (const auto& f : pool) {
    if (f.size() != true_labels.size()) {
      throw ValidationError("pool prediction vectors must all have length m");
    }
    for (Label h : f) {
      if (h < 0 || h >= num_classes) throw ValidationError("pool label outside [0, K)");
    }
  }
  CompensatedSum total;
  for (double q : probs) {
    if (!(q >= 0.0)) throw ValidationError("pool probabilities must be nonnegative");
    total.add(q);
  }
  if (std::abs(total.value() - 1.0) > 1e-9) {
    throw ValidationError("pool probabilities must sum to 1");
  }
  ClassifierSampler s;
  s.kind_ = SamplerKind::finite_pool;
  s.num_classes_ = num_classes;
  s.true_labels_ = std::move(true_labels);
  s.pool_ = std::move(pool);
  s.probs_ = std::move(probs);
  return s;
}

ClassifierSampler ClassifierSampler::split_vote(double p, SplitCase layout,
                                                std::size_t num_examples) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("split fraction p must lie in (0, 1)");
  auto s = finite_pool({std::vector<Label>(num_examples, 0), std::vector<Label>(num_examples, 1)},
                       {p, 1.0 - p}, split_labels(layout, num_examples), 2);
  s.kind_ = SamplerKind::split_vote;
  return s;
}

ClassifierSampler ClassifierSampler::pathological(int num_classes, double epsilon,
                                                  std::size_t num_examples) {
  auto ens = make_pathological(num_classes, epsilon, num_examples, 2);
  auto s = finite_pool({ens.data.column(0), ens.data.column(1)}, {1.0 - epsilon, epsilon},
                       std::vector<Label>(ens.data.true_labels().begin(),
                                          ens.data.true_labels().end()),
                       num_classes);
  s.kind_ = SamplerKind::pathological;
  return s;
}

ClassifierSampler ClassifierSampler::dirichlet_confusion(int num_classes,
                                                         std::size_t num_examples,
                                                         double concentration,
                                                         double correct_bias,
                                                         std::uint64_t seed) {
  if (num_classes < 2) throw ValidationError("K must be at least 2");
  if (num_examples == 0) throw ValidationError("need at least one example");
  if (!(concentration > 0.0)) throw ValidationError("concentration must be positive");
  if (!(correct_bias >= 0.0)) throw ValidationError("correct_bias must be nonnegative");
  const auto k = static_cast<std::size_t>(num_classes);
  Rng rng(seed);
  std::uniform_int_distribution<int> label(0, num_classes - 1);
  std::gamma_distribution<double> base(concentration, 1.0);
  std::gamma_distribution<double> tilted(concentration + correct_bias, 1.0);

  ClassifierSampler s;
  s.kind_ = SamplerKind::dirichlet_confusion;
  s.num_classes_ = num_classes;
  s.true_labels_.resize(num_examples);
  s.vote_mass_.assign(num_examples * k, 0.0);
  for (std::size_t j = 0; j < num_examples; ++j) {
    const Label y = static_cast<Label>(label(rng));
    s.true_labels_[j] = y;
    double* row = s.vote_mass_.data() + j * k;
    CompensatedSum total;
    for (std::size_t c = 0; c < k; ++c) {
      row[c] = c == static_cast<std::size_t>(y) ? tilted(rng) : base(rng);
      total.add(row[c]);
    }
    const double sum = total.value();
    if (sum > 0.0) {
      for (std::size_t c = 0; c < k; ++c) row[c] /= sum;
    } else {
      // every gamma draw underflowed; put the mass on the true label
      row[static_cast<std::size_t>(y)] = 1.0;
    }
  }
  return s;
}

void ClassifierSampler::draw_classifier(Rng& rng, std::span<Label> out) const {
  if (out.size() != num_examples()) throw ValidationError("output span must have length m");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (!pool_.empty()) {
    const double u = unit(rng);
    double cumulative = 0.0;
    std::size_t pick = pool_.size() - 1;
    for (std::size_t a = 0; a < pool_.size(); ++a) {
      cumulative += probs_[a];
      if (u < cumulative) {
        pick = a;
        break;
      }
    }
    std::copy(pool_[pick].begin(), pool_[pick].end(), out.begin());
    return;
  }
  const auto k = static_cast<std::size_t>(num_classes_);
  for (std::size_t j = 0; j < num_examples(); ++j) {
    const double* row = vote_mass_.data() + j * k;
    const double u = unit(rng);
    double cumulative = 0.0;
    std::size_t pick = k - 1;
    for (std::size_t c = 0; c < k; ++c) {
      cumulative += row[c];
      if (u < cumulative) {
        pick = c;
        break;
      }
    }
    out[j] = static_cast<Label>(pick);
  }
}

PredictionDataset ClassifierSampler::sample_ensemble(std::size_t num_classifiers, Rng& rng) const {
  if (num_classifiers == 0) throw ValidationError("need at least one classifier");
  const std::size_t m = num_examples();
  std::vector<Label> one(m);
  std::vector<Label> preds(m * num_classifiers);
  for (std::size_t i = 0; i < num_classifiers; ++i) {
    draw_classifier(rng, one);
    for (std::size_t j = 0; j < m; ++j) preds[j * num_classifiers + i] = one[j];
  }
  return PredictionDataset(true_labels_, std::move(preds), num_classifiers, num_classes_);
}

namespace {

double pool_disagreement(const std::vector<Label>& a, const std::vector<Label>& b) {
  std::size_t differ = 0;
  for (std::size_t j = 0; j < a.size(); ++j) differ += a[j] != b[j] ? 1 : 0;
  return static_cast<double>(differ) / static_cast<double>(a.size());
}

}  // namespace

double ClassifierSampler::d_infinity() const {
  CompensatedSum total;
  if (!pool_.empty()) {
    for (std::size_t a = 0; a < pool_.size(); ++a) {
      for (std::size_t b = 0; b < pool_.size(); ++b) {
        if (a != b) total.add(probs_[a] * probs_[b] * pool_disagreement(pool_[a], pool_[b]));
      }
    }
    return total.value();
  }
  // independent votes per example: E Phi = mean_j (1 - sum_c p_c^2)
  const auto k = static_cast<std::size_t>(num_classes_);
  for (std::size_t j = 0; j < num_examples(); ++j) {
    CompensatedSum row;
    for (std::size_t c = 0; c < k; ++c) {
      const double p = vote_mass_[j * k + c];
      row.add(p * (1.0 - p));
    }
    total.add(row.value());
  }
  return total.value() / static_cast<double>(num_examples());
}

double ClassifierSampler::sigma1_sq() const {
  if (!pool_.empty()) {
    std::vector<double> g1(pool_.size());
    for (std::size_t a = 0; a < pool_.size(); ++a) {
      CompensatedSum row;
      for (std::size_t b = 0; b < pool_.size(); ++b) {
        if (a != b) row.add(probs_[b] * pool_disagreement(pool_[a], pool_[b]));
      }
      g1[a] = row.value();
    }
    CompensatedSum mean;
    for (std::size_t a = 0; a < pool_.size(); ++a) mean.add(probs_[a] * g1[a]);
    CompensatedSum var;
    for (std::size_t a = 0; a < pool_.size(); ++a) {
      const double d = g1[a] - mean.value();
      var.add(probs_[a] * d * d);
    }
    return var.value();
  }
  // g1(h) = mean_j (1 - p_{j,h_j}); coordinates are independent, so
  // Var g1 = (1/m^2) sum_j [sum_c p_c^3 - (sum_c p_c^2)^2].
  const auto k = static_cast<std::size_t>(num_classes_);
  CompensatedSum total;
  for (std::size_t j = 0; j < num_examples(); ++j) {
    CompensatedSum second;
    CompensatedSum third;
    for (std::size_t c = 0; c < k; ++c) {
      const double p = vote_mass_[j * k + c];
      second.add(p * p);
      third.add(p * p * p);
    }
    total.add(third.value() - second.value() * second.value());
  }
  const auto m = static_cast<double>(num_examples());
  return total.value() / (m * m);
}

DirichletEnsemble make_dirichlet_confusion(int num_classes, std::size_t num_examples,
                                           std::size_t num_classifiers, double concentration,
                                           double correct_bias, std::uint64_t seed) {
  const auto sampler = ClassifierSampler::dirichlet_confusion(num_classes, num_examples,
                                                              concentration, correct_bias, seed);
  Rng rng(derive_seed(seed, 1));
  DirichletEnsemble out{sampler.sample_ensemble(num_classifiers, rng), {}};
  out.label_mass.assign(sampler.vote_mass().begin(), sampler.vote_mass().end());
  return out;
}

FinitePoolEnsemble make_finite_pool(std::vector<std::vector<Label>> pool,
                                    std::vector<double> probs, std::vector<Label> true_labels,
                                    int num_classes, std::size_t num_classifiers,
                                    std::uint64_t seed) {
  const auto sampler = ClassifierSampler::finite_pool(std::move(pool), std::move(probs),
                                                      std::move(true_labels), num_classes);
  Rng rng(seed);
  return {sampler.sample_ensemble(num_classifiers, rng), sampler.d_infinity(),
          sampler.sigma1_sq()};
}

}  // namespace votelab
