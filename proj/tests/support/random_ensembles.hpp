#pragma once

#include <random>
#include <vector>

#include "votelab/dataset.hpp"
#include "votelab/random.hpp"

namespace testing_support {

struct Instance {
  votelab::PredictionDataset data;
  votelab::EnsembleWeights weights;
};

// Random labels with an accuracy bias, so that both competent and
// incompetent ensembles show up.
inline Instance random_instance(votelab::Rng& rng, std::size_t max_n, std::size_t max_m,
                                int max_k, bool uniform_weights) {
  std::uniform_int_distribution<std::size_t> pick_n(1, max_n), pick_m(1, max_m);
  std::uniform_int_distribution<int> pick_k(2, max_k);
  const std::size_t n = pick_n(rng), m = pick_m(rng);
  const int k = pick_k(rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> label(0, k - 1);
  const double skill = unit(rng);
  std::vector<votelab::Label> y(m), preds(m * n);
  for (std::size_t j = 0; j < m; ++j) {
    y[j] = label(rng);
    for (std::size_t i = 0; i < n; ++i) preds[j * n + i] = unit(rng) < skill ? y[j] : label(rng);
  }
  votelab::PredictionDataset data(std::move(y), std::move(preds), n, k);
  if (uniform_weights) return {std::move(data), votelab::EnsembleWeights::uniform(n)};
  std::vector<double> w(n);
  for (auto& v : w) v = 0.05 + unit(rng);
  return {std::move(data), votelab::EnsembleWeights::from_values(std::move(w))};
}

}  // namespace testing_support
