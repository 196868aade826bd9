#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "votelab/dataset.hpp"

namespace testing_support {

inline votelab::PredictionDataset csv(const std::string& text, std::optional<int> k = {}) {
  std::istringstream in(text);
  return votelab::parse_predictions(in, k);
}

// N copies of one classifier that errs on the first `wrong` of m examples.
inline votelab::PredictionDataset identical(std::size_t n, std::size_t m, std::size_t wrong) {
  std::vector<votelab::Label> y(m, 0), preds(m * n, 0);
  for (std::size_t j = 0; j < wrong; ++j) {
    for (std::size_t i = 0; i < n; ++i) preds[j * n + i] = 1;
  }
  return votelab::PredictionDataset(std::move(y), std::move(preds), n, 2);
}

}  // namespace testing_support
