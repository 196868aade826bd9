#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "votelab/bounds.hpp"
#include "votelab/dataset.hpp"
#include "votelab/error.hpp"
#include "votelab/extrapolate.hpp"
#include "votelab/serialize.hpp"
#include "votelab/simgen.hpp"
#include "votelab/stats.hpp"

namespace py = pybind11;
using namespace votelab;

namespace {

py::object to_python(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null:
      return py::none();
    case Json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case Json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case Json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case Json::value_t::number_float:
      return py::float_(j.get<double>());
    case Json::value_t::string:
      return py::str(j.get<std::string>());
    case Json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(to_python(v));
      return out;
    }
    case Json::value_t::object: {
      py::dict out;
      for (const auto& item : j.items()) out[py::str(item.key())] = to_python(item.value());
      return out;
    }
    default:
      throw py::type_error("unsupported JSON value");
  }
}

EnsembleWeights weights_or_uniform(const PredictionDataset& data,
                                   const std::optional<std::vector<double>>& weights) {
  if (!weights) return EnsembleWeights::uniform(data.num_classifiers());
  auto w = EnsembleWeights::from_values(*weights);
  if (w.size() != data.num_classifiers()) {
    throw ValidationError("expected " + std::to_string(data.num_classifiers()) + " weights");
  }
  return w;
}

TieRule rule_from(const std::string& name) {
  if (name == "lowest-label") return TieRule::lowest_label;
  if (name == "perturbed") return TieRule::perturbed_weights;
  throw ValidationError("tie rule must be 'lowest-label' or 'perturbed'");
}

SplitCase case_from(const std::string& name) {
  if (name == "all-first") return SplitCase::all_first;
  if (name == "half-half") return SplitCase::half_half;
  if (name == "all-second") return SplitCase::all_second;
  throw ValidationError("case must be 'all-first', 'half-half' or 'all-second'");
}

}  // namespace

PYBIND11_MODULE(_votelab, m) {
  m.doc() = "Majority-vote ensemble statistics, bounds and extrapolation";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<PredictionDataset>(m, "PredictionDataset")
      .def(py::init<std::vector<Label>, std::vector<Label>, std::size_t, std::optional<int>>(),
           py::arg("true_labels"), py::arg("predictions"), py::arg("num_classifiers"),
           py::arg("num_classes") = py::none())
      .def_property_readonly("num_examples", &PredictionDataset::num_examples)
      .def_property_readonly("num_classifiers", &PredictionDataset::num_classifiers)
      .def_property_readonly("num_classes", &PredictionDataset::num_classes)
      .def_property_readonly("true_labels",
                             [](const PredictionDataset& d) {
                               return std::vector<Label>(d.true_labels().begin(),
                                                         d.true_labels().end());
                             })
      .def("column", &PredictionDataset::column)
      .def("to_csv", &predictions_to_csv)
      .def("__eq__", [](const PredictionDataset& a, const PredictionDataset& b) { return a == b; })
      .def("__repr__", [](const PredictionDataset& d) {
        std::ostringstream out;
        out << "PredictionDataset(m=" << d.num_examples() << ", N=" << d.num_classifiers()
            << ", K=" << d.num_classes() << ")";
        return out.str();
      });

  m.def("load_predictions", &load_predictions, py::arg("path"),
        py::arg("declared_classes") = py::none());
  m.def(
      "parse_predictions",
      [](const std::string& text, std::optional<int> k) {
        std::istringstream in(text);
        return parse_predictions(in, k);
      },
      py::arg("text"), py::arg("declared_classes") = py::none());

  m.def(
      "ensemble_stats",
      [](const PredictionDataset& d, std::optional<std::vector<double>> w,
         const std::string& tie_rule) {
        return to_python(to_json(ensemble_stats(d, weights_or_uniform(d, w), rule_from(tie_rule))));
      },
      py::arg("data"), py::arg("weights") = py::none(), py::arg("tie_rule") = "lowest-label");

  m.def(
      "bounds",
      [](const PredictionDataset& d, std::optional<std::vector<double>> w, double delta,
         std::optional<double> eta, std::optional<double> epsilon, std::optional<int> entropy_m) {
        BoundOptions opts;
        opts.tie_rule = TieRule::lowest_label;
        opts.delta_conf = delta;
        opts.eta = eta;
        opts.epsilon = epsilon;
        opts.entropy_set_size = entropy_m;
        return to_python(to_json(all_bounds(d, weights_or_uniform(d, w), opts)));
      },
      py::arg("data"), py::arg("weights") = py::none(), py::arg("delta") = 0.05,
      py::arg("eta") = py::none(), py::arg("epsilon") = py::none(),
      py::arg("entropy_m") = py::none());

  m.def("polarization_upper_bound", &polarization_upper_bound, py::arg("second_moment"),
        py::arg("prob_above_half"), py::arg("num_examples"), py::arg("delta") = 0.05);

  m.def(
      "growth_curve",
      [](const PredictionDataset& d, std::vector<std::size_t> targets, std::size_t m_size,
         std::size_t num_subsets, std::uint64_t seed) {
        return to_python(to_json(growth_curve(d, m_size, num_subsets, targets, seed)));
      },
      py::arg("data"), py::arg("targets"), py::arg("m") = 3, py::arg("num_subsets") = 20,
      py::arg("seed") = 0);

  m.def(
      "predict_mv_error",
      [](double avg_error, double disagreement, double epsilon, std::optional<std::size_t> n,
         std::optional<double> eta) {
        SubsampleStats s;
        s.subset_size = 3;
        s.avg_error = avg_error;
        s.disagreement = disagreement;
        s.epsilon = epsilon;
        s.eta = eta.value_or(4.0 / 3.0);
        return predict_mv_error(s, n, eta ? EtaMode::measured : EtaMode::conjecture);
      },
      py::arg("avg_error"), py::arg("disagreement"), py::arg("epsilon"),
      py::arg("n") = py::none(), py::arg("eta") = py::none(),
      "Triple-based majority-vote error prediction; n=None means an infinite ensemble.");

  m.def(
      "split_vote",
      [](double p, const std::string& layout, std::size_t m_size, std::size_t n) {
        auto e = make_split_vote(p, case_from(layout), m_size, n);
        return py::make_tuple(e.data, std::vector<double>(e.weights.values().begin(),
                                                          e.weights.values().end()));
      },
      py::arg("p"), py::arg("case"), py::arg("num_examples"), py::arg("num_classifiers") = 2);

  m.def(
      "pathological",
      [](int k, double eps, std::size_t m_size, std::size_t n) {
        auto e = make_pathological(k, eps, m_size, n);
        return py::make_tuple(e.data, std::vector<double>(e.weights.values().begin(),
                                                          e.weights.values().end()));
      },
      py::arg("num_classes"), py::arg("epsilon"), py::arg("num_examples"),
      py::arg("num_classifiers") = 2);

  m.def(
      "dirichlet_confusion",
      [](int k, std::size_t m_size, std::size_t n, double conc, double bias, std::uint64_t seed) {
        return make_dirichlet_confusion(k, m_size, n, conc, bias, seed).data;
      },
      py::arg("num_classes"), py::arg("num_examples"), py::arg("num_classifiers"),
      py::arg("concentration") = 1.0, py::arg("correct_bias") = 2.0, py::arg("seed") = 0);

  m.def(
      "clt_check",
      [](std::vector<std::vector<Label>> pool, std::vector<double> probs,
         std::vector<Label> true_labels, int k, std::size_t n, std::size_t trials,
         std::uint64_t seed) {
        const auto sampler = ClassifierSampler::finite_pool(std::move(pool), std::move(probs),
                                                            std::move(true_labels), k);
        return to_python(to_json(ustat_clt_check(sampler, n, trials, seed)));
      },
      py::arg("pool"), py::arg("probs"), py::arg("true_labels"), py::arg("num_classes"),
      py::arg("n"), py::arg("trials"), py::arg("seed") = 0);
}
