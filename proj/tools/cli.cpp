#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "votelab/bounds.hpp"
#include "votelab/dataset.hpp"
#include "votelab/error.hpp"
#include "votelab/extrapolate.hpp"
#include "votelab/serialize.hpp"
#include "votelab/simgen.hpp"
#include "votelab/stats.hpp"

namespace votelab::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string predictions;
  std::string weights;
  std::optional<int> declared_k;
  std::string output;
  std::uint64_t seed = 0;
  std::string tie_rule = "lowest-label";
  double perturbation = 1e-4;
  std::string format;
};

struct Inputs {
  PredictionDataset data;
  EnsembleWeights weights;
  TieRule rule;
};

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + tmp.string() + "' for writing");
    f << content;
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("failed writing '" + path.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

void emit(const Common& c, std::ostream& out, const std::string& content) {
  if (c.output.empty()) {
    out << content;
  } else {
    write_atomic(c.output, content);
  }
}

TieRule parse_rule(const std::string& s) {
  return s == "perturbed" ? TieRule::perturbed_weights : TieRule::lowest_label;
}

Inputs load_inputs(const Common& c) {
  auto data = load_predictions(c.predictions, c.declared_k);
  auto weights = c.weights.empty() ? EnsembleWeights::uniform(data.num_classifiers())
                                   : load_weights(c.weights, data.num_classifiers());
  const auto rule = parse_rule(c.tie_rule);
  if (rule == TieRule::perturbed_weights) weights = tie_free_perturb(weights, c.seed, c.perturbation);
  return {std::move(data), std::move(weights), rule};
}

void add_common(CLI::App* app, Common& c, bool with_format, const std::string& default_format,
                std::vector<std::string> formats) {
  app->add_option("--predictions", c.predictions, "prediction CSV (y,h1,...,hN)")->required();
  app->add_option("--weights", c.weights, "JSON array of classifier weights (default uniform)");
  app->add_option("--declared-k", c.declared_k, "number of classes K")->check(CLI::PositiveNumber);
  app->add_option("--output", c.output, "output path (default stdout)");
  app->add_option("--seed", c.seed, "random seed")->capture_default_str();
  app->add_option("--tie-rule", c.tie_rule, "majority-vote tie handling")
      ->check(CLI::IsMember({"perturbed", "lowest-label"}))
      ->capture_default_str();
  app->add_option("--perturbation", c.perturbation, "weight perturbation magnitude")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  if (with_format) {
    c.format = default_format;
    app->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember(formats))
        ->capture_default_str();
  }
}

SplitCase parse_case(const std::string& s) {
  if (s == "all-first") return SplitCase::all_first;
  if (s == "all-second") return SplitCase::all_second;
  return SplitCase::half_half;
}

std::vector<double> load_probs(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw ValidationError("--probs: " + std::string(e.what()));
  }
  if (!j.is_array()) throw ValidationError("--probs: expected a JSON array");
  std::vector<double> probs;
  for (const auto& v : j) {
    if (!v.is_number()) throw ValidationError("--probs: entries must be numbers");
    probs.push_back(v.get<double>());
  }
  return probs;
}

// Pool functions are the columns of a prediction CSV.
ClassifierSampler load_pool_sampler(const std::string& pool_path, const std::string& probs_path,
                                    std::optional<int> declared_k) {
  const auto pool_data = load_predictions(pool_path, declared_k);
  std::vector<std::vector<Label>> pool;
  for (std::size_t i = 0; i < pool_data.num_classifiers(); ++i) {
    const auto col = pool_data.column(i);
    pool.emplace_back(col.begin(), col.end());
  }
  const auto labels = pool_data.true_labels();
  return ClassifierSampler::finite_pool(std::move(pool), load_probs(probs_path),
                                        std::vector<Label>(labels.begin(), labels.end()),
                                        pool_data.num_classes());
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Majority-vote ensemble statistics, bounds and extrapolation"};
  app.require_subcommand(1);
  app.name("votelab");

  // analyze
  Common analyze_opts;
  auto* analyze = app.add_subcommand("analyze", "ensemble statistics as JSON");
  add_common(analyze, analyze_opts, true, "json", {"json"});

  // bounds
  Common bounds_opts;
  BoundOptions bopts;
  double delta = 0.05;
  std::optional<double> eta, epsilon, entropy_delta;
  std::optional<int> entropy_m;
  auto* bounds = app.add_subcommand("bounds", "majority-vote error bounds");
  add_common(bounds, bounds_opts, true, "table", {"table", "json"});
  bounds->add_option("--delta", delta, "confidence parameter for the polarization bound")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  bounds->add_option("--eta", eta, "polarization to use (default: measured)");
  bounds->add_option("--epsilon", epsilon, "epsilon to use (default: measured)");
  bounds->add_option("--entropy-m", entropy_m, "label-set size for the entropy bound");
  bounds->add_option("--entropy-delta", entropy_delta, "Delta for the entropy bound");

  // extrapolate
  Common ext_opts;
  std::size_t subset_size = 3;
  std::size_t num_subsets = 20;
  std::vector<std::size_t> targets;
  bool any_m = false;
  std::string eta_mode = "both";
  auto* extrapolate = app.add_subcommand("extrapolate", "predict large-ensemble errors");
  add_common(extrapolate, ext_opts, true, "csv", {"csv", "json"});
  extrapolate->add_option("--m", subset_size, "subset size M")->capture_default_str();
  extrapolate->add_option("--num-subsets", num_subsets, "subsets averaged per size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  extrapolate->add_option("--targets", targets, "comma-separated target ensemble sizes")
      ->delimiter(',')
      ->required();
  extrapolate->add_option("--eta-mode", eta_mode, "eta used by the predictions")
      ->check(CLI::IsMember({"both", "conjecture", "measured"}))
      ->capture_default_str();
  extrapolate->add_flag("--experimental-any-m", any_m, "accept subset sizes other than 3");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "generate synthetic ensembles");
  simulate->require_subcommand(1);
  std::string sim_output, weights_output, case_name = "half-half";
  std::uint64_t sim_seed = 0;
  double p = 0.75, sim_eps = 0.1, concentration = 1.0, bias = 2.0;
  std::size_t examples = 100, classifiers = 2, sim_n = 200, trials = 500;
  int classes = 2;
  std::string pool_path, probs_path;

  auto* split = simulate->add_subcommand("split-vote", "two-label split-vote ensemble");
  split->add_option("--p", p, "fraction voting label 0")->capture_default_str();
  split->add_option("--case", case_name, "true-label layout")
      ->check(CLI::IsMember({"all-first", "half-half", "all-second"}))
      ->capture_default_str();

  auto* patho = simulate->add_subcommand("pathological", "rotated wrong-vote ensemble");
  patho->add_option("--epsilon", sim_eps, "wrong-vote fraction")->capture_default_str();

  auto* dirichlet = simulate->add_subcommand("dirichlet", "Dirichlet confusion ensemble");
  dirichlet->add_option("--concentration", concentration)->capture_default_str();
  dirichlet->add_option("--correct-bias", bias)->capture_default_str();

  auto* pool = simulate->add_subcommand("finite-pool", "i.i.d. draws from a function pool");
  auto* clt = simulate->add_subcommand("clt-check", "U-statistic CLT check");
  for (auto* sub : {pool, clt}) {
    sub->add_option("--pool", pool_path, "prediction CSV whose columns are the pool");
    sub->add_option("--probs", probs_path, "JSON array of pool probabilities");
  }
  pool->get_option("--pool")->required();
  pool->get_option("--probs")->required();
  clt->add_option("--n", sim_n, "ensemble size N")->capture_default_str();
  clt->add_option("--trials", trials)->capture_default_str();
  clt->add_option("--concentration", concentration)->capture_default_str();
  clt->add_option("--correct-bias", bias)->capture_default_str();

  for (auto* sub : {split, patho, dirichlet, pool, clt}) {
    sub->add_option("--output", sim_output, "output path (default stdout)");
    sub->add_option("--seed", sim_seed)->capture_default_str();
  }
  for (auto* sub : {split, patho, dirichlet, clt}) {
    sub->add_option("--examples", examples, "number of examples m")->capture_default_str();
  }
  for (auto* sub : {patho, dirichlet, clt}) {
    sub->add_option("--classes", classes, "number of classes K")->capture_default_str();
  }
  for (auto* sub : {split, patho, dirichlet, pool}) {
    sub->add_option("--classifiers", classifiers, "ensemble size N")->capture_default_str();
  }
  for (auto* sub : {split, patho}) {
    sub->add_option("--weights-output", weights_output, "where to write the weights JSON");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    while (!target->get_subcommands().empty()) target = target->get_subcommands().front();
    out << target->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return 1;
  }

  try {
    if (analyze->parsed()) {
      const auto in = load_inputs(analyze_opts);
      const auto stats = ensemble_stats(in.data, in.weights, in.rule);
      emit(analyze_opts, out, to_json(stats).dump(2) + "\n");
    } else if (bounds->parsed()) {
      const auto in = load_inputs(bounds_opts);
      bopts.tie_rule = in.rule;
      bopts.eta = eta;
      bopts.epsilon = epsilon;
      bopts.entropy_set_size = entropy_m;
      bopts.entropy_delta = entropy_delta;
      bopts.delta_conf = delta;
      const auto report = all_bounds(in.data, in.weights, bopts);
      emit(bounds_opts, out,
           bounds_opts.format == "json" ? to_json(report).dump(2) + "\n" : bounds_table(report));
    } else if (extrapolate->parsed()) {
      if (!ext_opts.weights.empty()) {
        throw ValidationError("--weights: extrapolation uses uniform sub-ensembles");
      }
      const auto in = load_inputs(ext_opts);
      ExtrapolationOptions eopts;
      eopts.allow_any_subset_size = any_m;
      auto curve = growth_curve(in.data, subset_size, num_subsets, targets, ext_opts.seed, in.rule,
                                eopts);
      if (eta_mode == "conjecture") curve.predicted_mv_measured = curve.predicted_mv_conjecture;
      if (eta_mode == "measured") curve.predicted_mv_conjecture = curve.predicted_mv_measured;
      const auto csv = growth_curve_csv(curve);
      const auto json = to_json(curve).dump(2) + "\n";
      if (!ext_opts.output.empty()) {
        write_atomic(ext_opts.output + ".csv", csv);
        write_atomic(ext_opts.output + ".json", json);
      } else {
        out << (ext_opts.format == "json" ? json : csv);
      }
    } else if (simulate->parsed()) {
      Common sim;
      sim.output = sim_output;
      if (split->parsed() || patho->parsed()) {
        const auto ens = split->parsed()
                             ? make_split_vote(p, parse_case(case_name), examples, classifiers)
                             : make_pathological(classes, sim_eps, examples, classifiers);
        if (!weights_output.empty()) write_atomic(weights_output, weights_to_json(ens.weights) + "\n");
        emit(sim, out, predictions_to_csv(ens.data));
      } else if (dirichlet->parsed()) {
        const auto ens =
            make_dirichlet_confusion(classes, examples, classifiers, concentration, bias, sim_seed);
        emit(sim, out, predictions_to_csv(ens.data));
      } else if (pool->parsed()) {
        const auto sampler = load_pool_sampler(pool_path, probs_path, std::nullopt);
        Rng rng(sim_seed);
        emit(sim, out, predictions_to_csv(sampler.sample_ensemble(classifiers, rng)));
      } else if (clt->parsed()) {
        if (pool_path.empty() != probs_path.empty()) {
          throw ValidationError("--pool and --probs must be given together");
        }
        const auto sampler =
            pool_path.empty()
                ? ClassifierSampler::dirichlet_confusion(classes, examples, concentration, bias,
                                                         sim_seed)
                : load_pool_sampler(pool_path, probs_path, std::nullopt);
        const auto check = ustat_clt_check(sampler, sim_n, trials, derive_seed(sim_seed, 1));
        emit(sim, out, to_json(check).dump(2) + "\n");
      }
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace votelab::cli
