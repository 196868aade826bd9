#include <doctest.h>

#include <cmath>
#include <set>

#include "support/fixtures.hpp"
#include "votelab/error.hpp"
#include "votelab/extrapolate.hpp"
#include "votelab/simgen.hpp"

using namespace votelab;

namespace {

SubsampleStats sub3(double avg, double disagreement, double eps, double eta = 4.0 / 3.0) {
  SubsampleStats s;
  s.subset_size = 3;
  s.avg_error = avg;
  s.disagreement = disagreement;
  s.epsilon = eps;
  s.eta = eta;
  s.num_subsets = 1;
  return s;
}

PredictionDataset dirichlet(std::size_t n, std::uint64_t seed) {
  return make_dirichlet_confusion(3, 40, n, 1.0, 1.5, seed).data;
}

}  // namespace

TEST_SUITE("extrapolate") {

TEST_CASE("subset selection") {
  SUBCASE("exhaustive and lexicographic") {
    const auto s = choose_subsets(4, 3, 10, 0);
    REQUIRE(s.size() == 4);
    CHECK(s[0] == std::vector<std::size_t>{0, 1, 2});
    CHECK(s[3] == std::vector<std::size_t>{1, 2, 3});
  }
  SUBCASE("sampled subsets are distinct and sorted") {
    const auto s = choose_subsets(30, 3, 50, 9);
    CHECK(s.size() == 50);
    std::set<std::vector<std::size_t>> unique(s.begin(), s.end());
    CHECK(unique.size() == 50);
    for (const auto& v : s) CHECK(std::is_sorted(v.begin(), v.end()));
    CHECK(choose_subsets(30, 3, 50, 9) == s);
  }
  CHECK_THROWS_AS(choose_subsets(3, 4, 10, 0), ValidationError);
  CHECK_THROWS_AS(choose_subsets(3, 2, 0, 0), ValidationError);
}

TEST_CASE("subsample statistics") {
  const auto d = dirichlet(4, 1);
  SUBCASE("M = N is the full ensemble") {
    const auto sub = subsample_stats(d, 4, 10, 0);
    const auto full = ensemble_stats(d, EnsembleWeights::uniform(4), TieRule::lowest_label);
    CHECK(sub.num_subsets == 1);
    CHECK(sub.avg_error == full.avg_error);
    CHECK(sub.disagreement == full.disagreement_v);
    CHECK(sub.eta == full.polarization);
  }
  SUBCASE("all four triples of four classifiers") {
    const auto sub = subsample_stats(d, 3, 100, 0);
    CHECK(sub.num_subsets == 4);
    double avg = 0, dis = 0, eps = 0, eta = 0;
    for (std::size_t drop = 0; drop < 4; ++drop) {
      std::vector<std::size_t> cols;
      for (std::size_t i = 0; i < 4; ++i) {
        if (i != drop) cols.push_back(i);
      }
      const auto s = ensemble_stats(d.select_classifiers(cols), EnsembleWeights::uniform(3),
                                    TieRule::lowest_label);
      avg += s.avg_error / 4;
      dis += s.disagreement_v / 4;
      eps += s.epsilon_rho / 4;
      eta += s.polarization / 4;
    }
    CHECK(sub.avg_error == doctest::Approx(avg).epsilon(1e-14));
    CHECK(sub.disagreement == doctest::Approx(dis).epsilon(1e-14));
    CHECK(sub.epsilon == doctest::Approx(eps).epsilon(1e-14));
    CHECK(sub.eta == doctest::Approx(eta).epsilon(1e-14));
  }
  SUBCASE("deterministic under a seed") {
    const auto big = dirichlet(12, 2);
    const auto a = subsample_stats(big, 3, 20, 5);
    const auto b = subsample_stats(big, 3, 20, 5);
    CHECK(a.disagreement == b.disagreement);
    CHECK(a.eta == b.eta);
  }
  CHECK_THROWS_AS(subsample_stats(d, 5, 10, 0), ValidationError);
  CHECK_THROWS_AS(subsample_stats(d, 1, 10, 0), ValidationError);
}

TEST_CASE("disagreement prediction") {
  const auto s = sub3(0.1, 0.08, 0.2);
  CHECK(predict_disagreement(s, std::nullopt) == doctest::Approx(0.12).epsilon(1e-15));
  CHECK(predict_disagreement(s, 3) == s.disagreement);
  SubsampleStats two = s;
  two.subset_size = 2;
  two.disagreement = 0.15;
  CHECK(predict_disagreement(two, 10) == doctest::Approx(0.27).epsilon(1e-15));
  CHECK(predict_disagreement(two, 2) == 0.15);
}

TEST_CASE("majority-vote prediction") {
  const auto s = sub3(0.1, 0.08, 0.2);
  CHECK(std::abs(predict_mv_error(s, std::nullopt, EtaMode::conjecture) - 0.28 / 3.0) < 1e-12);
  CHECK(predict_mv_error(s, std::nullopt, EtaMode::measured) ==
        predict_mv_error(s, std::nullopt, EtaMode::conjecture));
  SUBCASE("degenerate identical classifiers") {
    const auto flat = sub3(0.2, 0.0, 0.0, 1.0);
    for (std::size_t n : {3u, 10u, 1000u}) {
      CHECK(predict_mv_error(flat, n, EtaMode::measured) == doctest::Approx(0.2).epsilon(1e-15));
    }
  }
  SUBCASE("clamped at zero") {
    CHECK(predict_mv_error(sub3(0.1, 0.4, 0.0), std::nullopt, EtaMode::conjecture) == 0.0);
  }
  SUBCASE("triples only unless opted in") {
    SubsampleStats four = s;
    four.subset_size = 4;
    CHECK_THROWS_AS(predict_mv_error(four, 10, EtaMode::conjecture), ValidationError);
    ExtrapolationOptions opts;
    opts.allow_any_subset_size = true;
    CHECK(predict_mv_error(four, 10, EtaMode::conjecture, opts) > 0.0);
  }
  SUBCASE("direction of change with N") {
    for (const auto& sub : {sub3(0.1, 0.08, 0.2), sub3(0.2, 0.05, 0.4), sub3(0.3, 0.3, 0.1)}) {
      const double slope_sign = sub.epsilon * sub.avg_error - sub.disagreement / 2;
      for (std::size_t n = 3; n < 40; ++n) {
        const double diff = predict_mv_error(sub, n + 1, EtaMode::measured) -
                            predict_mv_error(sub, n, EtaMode::measured);
        if (predict_mv_error(sub, n + 1, EtaMode::measured) == 0.0) continue;
        CHECK((diff > 0) == (slope_sign > 0));
      }
    }
  }
}

TEST_CASE("growth curves") {
  const auto d = dirichlet(12, 3);
  const auto curve = growth_curve(d, 3, 30, {3, 5, 12, 50}, 7);
  CHECK(curve.predicted_disagreement[0] == curve.subsample.disagreement);
  CHECK(curve.actual_mv[2].has_value());
  CHECK_FALSE(curve.actual_mv[3].has_value());
  CHECK(curve.d_infinity_hat == doctest::Approx(1.5 * curve.subsample.disagreement));
  const auto full = ensemble_stats(d, EnsembleWeights::uniform(12), TieRule::lowest_label);
  CHECK(*curve.actual_mv[2] == full.mv_error);
  CHECK(*curve.actual_disagreement[2] == doctest::Approx(full.disagreement_v).epsilon(1e-14));

  SUBCASE("identical classifiers give flat curves") {
    const auto same = testing_support::identical(6, 10, 2);
    const auto c = growth_curve(same, 3, 10, {3, 6, 100}, 0);
    for (std::size_t t = 0; t < 3; ++t) {
      CHECK(c.predicted_disagreement[t] == 0.0);
      CHECK(c.predicted_mv_measured[t] == doctest::Approx(0.2).epsilon(1e-14));
    }
  }
  CHECK_THROWS_AS(growth_curve(d, 3, 10, {}, 0), ValidationError);
  CHECK_THROWS_AS(growth_curve(d, 3, 10, {1}, 0), ValidationError);
}

TEST_CASE("U-statistic") {
  const auto d = testing_support::csv("y,h1,h2\n0,0,1\n0,0,0\n0,1,1\n0,0,1\n");
  CHECK(disagreement_ustat(d) == 0.5);
  CHECK_THROWS_AS(disagreement_ustat(testing_support::csv("y,h1\n0,0\n")), ValidationError);
}

TEST_CASE("CLT check") {
  SUBCASE("degenerate sampler") {
    const auto s = ClassifierSampler::finite_pool({{0, 1, 0}}, {1.0}, {0, 0, 0}, 2);
    const auto c = ustat_clt_check(s, 10, 100, 3);
    CHECK(c.mean_u == 0.0);
    CHECK(c.var_scaled == 0.0);
    CHECK(c.sigma1_sq_true == 0.0);
  }
  SUBCASE("two-function pool") {
    const std::vector<std::vector<Label>> pool{{0, 0, 0, 0, 0}, {1, 1, 1, 0, 0}};
    const double q = 0.2;
    const auto s = ClassifierSampler::finite_pool(pool, {q, 1 - q}, {0, 0, 0, 0, 0}, 2);
    const auto a = ustat_clt_check(s, 100, 400, 1);
    const auto b = ustat_clt_check(s, 200, 400, 2);
    CHECK(a.d_infinity_true == doctest::Approx(2 * q * (1 - q) * 0.6).epsilon(1e-14));
    CHECK(std::abs(b.var_scaled / a.var_scaled - 1.0) < 0.2);
    CHECK(std::abs(b.var_scaled / b.sigma1_sq_true - 1.0) < 0.2);
  }
  SUBCASE("requires enough classifiers and trials") {
    const auto s = ClassifierSampler::split_vote(0.5, SplitCase::all_first, 2);
    CHECK_THROWS_AS(ustat_clt_check(s, 5, 100, 0), ValidationError);
    CHECK_THROWS_AS(ustat_clt_check(s, 10, 10, 0), ValidationError);
  }
}

}  // TEST_SUITE
