#include "votelab/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "votelab/error.hpp"

namespace votelab {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_from(const Json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (v.is_null()) return std::nan("");
  if (!v.is_number()) throw ValidationError(std::string("field '") + key + "' is not a number");
  return v.get<double>();
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json to_json(const EnsembleStats& s) {
  Json j;
  j["avg_error"] = number(s.avg_error);
  j["disagreement_v"] = number(s.disagreement_v);
  j["disagreement_u"] = number(s.disagreement_u);
  j["tandem"] = number(s.tandem);
  j["mv_error"] = number(s.mv_error);
  j["polarization"] = number(s.polarization);
  j["epsilon_rho"] = number(s.epsilon_rho);
  j["prob_w_gt_half"] = number(s.prob_w_gt_half);
  j["second_moment_w"] = number(s.second_moment_w);
  j["sigma1_sq"] = number(s.sigma1_sq);
  return j;
}

EnsembleStats stats_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("ensemble statistics must be a JSON object");
  EnsembleStats s;
  s.avg_error = number_from(j, "avg_error");
  s.disagreement_v = number_from(j, "disagreement_v");
  s.disagreement_u = number_from(j, "disagreement_u");
  s.tandem = number_from(j, "tandem");
  s.mv_error = number_from(j, "mv_error");
  s.polarization = number_from(j, "polarization");
  s.epsilon_rho = number_from(j, "epsilon_rho");
  s.prob_w_gt_half = number_from(j, "prob_w_gt_half");
  s.second_moment_w = number_from(j, "second_moment_w");
  s.sigma1_sq = number_from(j, "sigma1_sq");
  return s;
}

Json to_json(const BoundReport& report) {
  Json j;
  Json entries = Json::array();
  for (const auto& e : report.entries) {
    Json entry;
    entry["name"] = e.name;
    entry["target"] = e.target;
    entry["value"] = number(e.bound.value);
    entry["applicable"] = e.bound.applicable;
    entry["precondition_note"] = e.bound.note;
    entry["raw"] = number(e.bound.raw);
    entries.push_back(std::move(entry));
  }
  j["entries"] = std::move(entries);
  j["inputs"] = to_json(report.inputs);
  j["conditions"] = {{"competent", report.conditions.competent},
                     {"semi_competent", report.conditions.semi_competent},
                     {"tie_free", report.conditions.tie_free}};
  const auto& p = report.params;
  j["params"] = {{"K", p.num_classes},
                 {"N", p.num_classifiers},
                 {"M", p.entropy_set_size},
                 {"Delta", number(p.entropy_delta)},
                 {"epsilon", number(p.epsilon)},
                 {"eta", number(p.eta)},
                 {"m", p.num_examples},
                 {"delta_conf", number(p.delta_conf)}};
  return j;
}

std::string bounds_table(const BoundReport& report) {
  std::size_t name_width = 5;
  for (const auto& e : report.entries) name_width = std::max(name_width, e.name.size());
  std::ostringstream out;
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(s.size(), w), ' ');
    return s;
  };
  out << pad("bound", name_width) << "  " << pad("target", 12) << "  " << pad("value", 22)
      << "  ok  note\n";
  for (const auto& e : report.entries) {
    out << pad(e.name, name_width) << "  " << pad(e.target, 12) << "  "
        << pad(format_double(e.bound.value), 22) << "  " << (e.bound.applicable ? "yes" : "no");
    if (!e.bound.note.empty()) out << (e.bound.applicable ? " " : "  ") << ' ' << e.bound.note;
    out << '\n';
  }
  out << "mv_error = " << format_double(report.inputs.mv_error)
      << ", polarization = " << format_double(report.inputs.polarization) << '\n';
  return out.str();
}

Json to_json(const SubsampleStats& sub) {
  return Json{{"M", sub.subset_size},
              {"avg_error_M", number(sub.avg_error)},
              {"disagreement_M", number(sub.disagreement)},
              {"epsilon_M", number(sub.epsilon)},
              {"eta_M", number(sub.eta)},
              {"mv_error_M", number(sub.mv_error)},
              {"num_subsets", sub.num_subsets},
              {"aggregation", "mean-over-subsets"}};
}

Json to_json(const GrowthCurve& curve) {
  Json j;
  j["target_Ns"] = curve.target_sizes;
  auto list = [](const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(number(x));
    return a;
  };
  auto optional_list = [](const std::vector<std::optional<double>>& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(x ? number(*x) : Json(nullptr));
    return a;
  };
  j["predicted_mv_conjecture"] = list(curve.predicted_mv_conjecture);
  j["predicted_mv_measured"] = list(curve.predicted_mv_measured);
  j["predicted_disagreement"] = list(curve.predicted_disagreement);
  j["actual_mv"] = optional_list(curve.actual_mv);
  j["actual_disagreement"] = optional_list(curve.actual_disagreement);
  j["D_infinity_hat"] = number(curve.d_infinity_hat);
  j["subsample"] = to_json(curve.subsample);
  return j;
}

std::string growth_curve_csv(const GrowthCurve& curve) {
  std::ostringstream out;
  out << "N,pred_conj,pred_meas,pred_disg,actual_mv\n";
  for (std::size_t t = 0; t < curve.target_sizes.size(); ++t) {
    out << curve.target_sizes[t] << ',' << format_double(curve.predicted_mv_conjecture[t]) << ','
        << format_double(curve.predicted_mv_measured[t]) << ','
        << format_double(curve.predicted_disagreement[t]) << ',';
    if (curve.actual_mv[t]) out << format_double(*curve.actual_mv[t]);
    out << '\n';
  }
  return out.str();
}

Json to_json(const CltCheck& check) {
  return Json{{"mean_UN", number(check.mean_u)},
              {"var_scaled", number(check.var_scaled)},
              {"sigma1_sq_true", number(check.sigma1_sq_true)},
              {"D_infinity_true", number(check.d_infinity_true)}};
}

}  // namespace votelab
