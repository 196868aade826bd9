#include "votelab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "votelab/error.hpp"

namespace votelab {

namespace {

BoundValue make(double raw, bool applicable = true, std::string note = {}) {
  BoundValue b;
  b.raw = raw;
  b.value = std::max(0.0, raw);
  b.applicable = applicable;
  b.note = std::move(note);
  if (raw < 0.0) {
    b.note += b.note.empty() ? "" : "; ";
    b.note += "negative raw value clamped to 0";
  }
  return b;
}

double second_order_gap(const EnsembleStats& s) { return s.avg_error - 0.5 * s.disagreement_v; }

void require_eta(double eta) {
  if (!(eta >= 0.0)) throw ValidationError("polarization eta must be nonnegative");
}

BoundValue competence_gate(double raw, const EnsembleConditions& cond) {
  if (cond.competent) return make(raw);
  if (cond.tie_free && cond.semi_competent) return make(raw, true, "via tie-free semi-competence");
  return make(raw, false, "ensemble is neither competent nor tie-free semi-competent");
}

}  // namespace

BoundValue first_order(const EnsembleStats& stats) { return make(2.0 * stats.avg_error); }

BoundValue c_bound(const EnsembleStats& stats) {
  const double numerator = stats.tandem - stats.avg_error * stats.avg_error;
  const double denominator = stats.tandem - stats.avg_error + 0.25;
  if (!(denominator > 0.0)) {
    BoundValue b = make(1.0, false, "denominator E[(W - 1/2)^2] is zero");
    b.raw = std::numeric_limits<double>::quiet_NaN();
    return b;
  }
  const double raw = numerator / denominator;
  if (!(stats.avg_error < 0.5)) return make(raw, false, "requires average error < 1/2");
  return make(raw);
}

BoundValue binary_second_order(const EnsembleStats& stats, int num_classes) {
  const double raw = 4.0 * stats.avg_error - 2.0 * stats.disagreement_v;
  if (num_classes != 2) return make(raw, false, "binary classification only (K=2)");
  return make(raw);
}

BoundValue competence_first_order(const EnsembleStats& stats, const EnsembleConditions& cond) {
  return competence_gate(stats.avg_error, cond);
}

BoundValue competence_second_order(const EnsembleStats& stats, int num_classes,
                                   const EnsembleConditions& cond) {
  const double k = num_classes;
  return competence_gate(4.0 * (k - 1.0) / k * second_order_gap(stats), cond);
}

BoundValue polarized_bound(const EnsembleStats& stats, int num_classes, std::optional<double> eta) {
  const double e = eta.value_or(stats.polarization);
  require_eta(e);
  const double k = num_classes;
  const double raw = 2.0 * e * (k - 1.0) / k * second_order_gap(stats);
  if (e < stats.polarization) return make(raw, false, "eta below the measured polarization");
  return make(raw);
}

BoundValue entropy_bound(const EnsembleStats& stats, int max_set_size, double delta, double eta) {
  if (max_set_size < 2) throw ValidationError("entropy set size M must be at least 2");
  if (!(delta >= 0.0 && delta <= 1.0)) throw ValidationError("Delta must lie in [0, 1]");
  require_eta(eta);
  const auto size = static_cast<double>(max_set_size);
  const double raw = 2.0 * eta * (size - 1.0) / size *
                     ((1.0 + delta / (size - 1.0)) * stats.avg_error - 0.5 * stats.disagreement_v);
  if (eta < stats.polarization) return make(raw, false, "eta below the measured polarization");
  return make(raw);
}

BoundValue finite_ensemble_bound(const EnsembleStats& stats, std::size_t num_classifiers,
                                 double eta) {
  if (num_classifiers < 1) throw ValidationError("finite ensemble bound needs N >= 1");
  return entropy_bound(stats, static_cast<int>(num_classifiers) + 1, 0.0, eta);
}

BoundValue epsilon_bound(const EnsembleStats& stats, double eta, std::optional<double> epsilon) {
  require_eta(eta);
  const double eps = epsilon.value_or(stats.epsilon_rho);
  if (!(eps >= 0.0)) throw ValidationError("epsilon must be nonnegative");
  const double raw = eta * ((1.0 + eps) * stats.avg_error - 0.5 * stats.disagreement_v);
  if (eta < stats.polarization) return make(raw, false, "eta below the measured polarization");
  if (eps < stats.epsilon_rho) return make(raw, false, "epsilon below the measured epsilon_rho");
  return make(raw);
}

double worst_case_epsilon(int num_classes) {
  const double k = num_classes;
  return (k - 2.0) / (2.0 * (k - 1.0));
}

double polarization_upper_bound(double second_moment, double prob_above_half,
                                std::size_t num_examples, double delta_conf) {
  if (!(second_moment > 0.0)) {
    throw ValidationError("polarization undefined under zero second moment; bound vacuous");
  }
  if (!(prob_above_half >= 0.0 && prob_above_half <= 1.0)) {
    throw ValidationError("P must lie in [0, 1]");
  }
  if (num_examples < 1) throw ValidationError("m must be at least 1");
  if (!(delta_conf > 0.0 && delta_conf < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  const double a = 3.0 / (8.0 * static_cast<double>(num_examples)) * std::log(1.0 / delta_conf);
  const double root =
      (std::sqrt(a) + std::sqrt(a + 4.0 * second_moment * prob_above_half)) / (2.0 * second_moment);
  return std::max(4.0 / 3.0, root * root);
}

const BoundEntry* BoundReport::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

BoundReport all_bounds(const PredictionDataset& data, const EnsembleWeights& weights,
                       const BoundOptions& options) {
  BoundReport report;
  const auto profile = pointwise_profile(data, weights);
  const auto stats = ensemble_stats(data, weights, options.tie_rule);
  const auto competence = competence_check(profile);
  report.inputs = stats;
  report.conditions = {competence.competent, competence.semi_competent,
                       tie_set(profile).tie_free()};

  const int k = data.num_classes();
  auto& p = report.params;
  p.num_classes = k;
  p.num_classifiers = data.num_classifiers();
  p.num_examples = data.num_examples();
  p.entropy_set_size = options.entropy_set_size.value_or(2);
  p.entropy_delta = options.entropy_delta ? *options.entropy_delta
                                          : entropy_profile(profile, p.entropy_set_size);
  p.epsilon = options.epsilon.value_or(stats.epsilon_rho);
  p.eta = options.eta.value_or(stats.polarization);
  p.delta_conf = options.delta_conf;

  const auto& cond = report.conditions;
  auto add = [&](std::string name, BoundValue b, bool needs_tie_free = false) {
    if (needs_tie_free && !cond.tie_free && b.applicable) {
      b.applicable = false;
      b.note += b.note.empty() ? "" : "; ";
      b.note += "requires a tie-free ensemble";
    }
    report.entries.push_back({std::move(name), "mv_error", std::move(b)});
  };

  add("first_order", first_order(stats));
  add("c_bound", c_bound(stats));
  add("binary_second_order", binary_second_order(stats, k));
  add("competence_first_order", competence_first_order(stats, cond));
  add("competence_second_order", competence_second_order(stats, k, cond));
  add("polarized", polarized_bound(stats, k, p.eta), true);
  add("entropy_restricted", entropy_bound(stats, p.entropy_set_size, p.entropy_delta, p.eta),
      true);
  add("finite_ensemble", finite_ensemble_bound(stats, p.num_classifiers, p.eta), true);
  add("epsilon_restricted", epsilon_bound(stats, p.eta, p.epsilon), true);
  add("epsilon_worst_case", epsilon_bound(stats, p.eta, worst_case_epsilon(k)), true);

  BoundValue eta_bound;
  if (stats.second_moment_w > 0.0) {
    eta_bound = make(polarization_upper_bound(stats.second_moment_w, stats.prob_w_gt_half,
                                              data.num_examples(), options.delta_conf));
  } else {
    eta_bound = make(4.0 / 3.0, false,
                     "polarization undefined under zero second moment; bound vacuous");
  }
  report.entries.push_back({"polarization_upper_bound", "polarization", std::move(eta_bound)});
  return report;
}

}  // namespace votelab
