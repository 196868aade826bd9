#include <doctest.h>

#include <cmath>

#include "support/fixtures.hpp"
#include "votelab/error.hpp"
#include "votelab/simgen.hpp"
#include "votelab/stats.hpp"

using namespace votelab;
using testing_support::csv;
using testing_support::identical;

TEST_SUITE("stats") {

TEST_CASE("pointwise profile") {
  SUBCASE("three of four vote the true label") {
    const auto d = csv("y,h1,h2,h3,h4\n1,1,1,1,2\n", 3);
    const auto p = pointwise_profile(d, EnsembleWeights::uniform(4));
    CHECK(p.w_rho[0] == 0.25);
    CHECK(p.masses(0)[1] == 0.75);
    CHECK(p.masses(0)[2] == 0.25);
    CHECK(p.masses(0)[0] == 0.0);
    CHECK_FALSE(p.tie_flags[0]);
  }
  SUBCASE("unanimous and correct") {
    const auto p = pointwise_profile(csv("y,h1,h2\n0,0,0\n"), EnsembleWeights::uniform(2));
    CHECK(p.w_rho[0] == 0.0);
    CHECK_FALSE(p.tie_flags[0]);
  }
  SUBCASE("even split between the truth and one wrong label") {
    const auto p = pointwise_profile(csv("y,h1,h2\n0,0,1\n"), EnsembleWeights::uniform(2));
    CHECK(p.w_rho[0] == 0.5);
    CHECK(p.tie_flags[0]);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(pointwise_profile(csv("y,h1,h2\n0,0,1\n"), EnsembleWeights::uniform(3)),
                    ValidationError);
  }
}

TEST_CASE("majority vote") {
  const auto d = csv("y,h1,h2\n0,0,1\n1,0,1\n");
  SUBCASE("strict majority") {
    const auto p = pointwise_profile(d, EnsembleWeights::from_values({0.75, 0.25}));
    CHECK(majority_vote(p, TieRule::lowest_label) == std::vector<Label>{0, 0});
  }
  SUBCASE("ties go to the lowest label") {
    const auto p = pointwise_profile(d, EnsembleWeights::uniform(2));
    CHECK(majority_vote(p, TieRule::lowest_label) == std::vector<Label>{0, 0});
  }
  SUBCASE("split-vote ensemble is right only where y is the majority label") {
    const auto ens = make_split_vote(0.75, SplitCase::half_half, 8);
    const auto p = pointwise_profile(ens.data, ens.weights);
    const auto votes = majority_vote(p, TieRule::lowest_label);
    for (std::size_t j = 0; j < 8; ++j) CHECK((votes[j] == p.true_labels[j]) == (j < 4));
  }
}

TEST_CASE("worked examples") {
  const auto eta = [](double p, SplitCase c) {
    const auto ens = make_split_vote(p, c, 10);
    return ensemble_stats(ens.data, ens.weights, TieRule::lowest_label).polarization;
  };
  CHECK(eta(0.75, SplitCase::all_first) == 0.0);
  CHECK(eta(0.75, SplitCase::half_half) == doctest::Approx(1.6).epsilon(1e-12));
  // W = 0.75 everywhere, so E[W^2] = 0.5625
  CHECK(eta(0.75, SplitCase::all_second) == doctest::Approx(1.0 / 0.5625).epsilon(1e-12));
  CHECK(eta(0.51, SplitCase::all_first) == 0.0);
  CHECK(eta(0.51, SplitCase::half_half) == doctest::Approx(0.5 / 0.2501).epsilon(1e-12));
  CHECK(eta(0.51, SplitCase::all_second) == doctest::Approx(1.0 / 0.2601).epsilon(1e-12));
}

TEST_CASE("ensemble statistics") {
  SUBCASE("identical classifiers") {
    const auto d = identical(5, 10, 3);
    const auto s = ensemble_stats(d, EnsembleWeights::uniform(5), TieRule::lowest_label);
    CHECK(s.disagreement_v == 0.0);
    CHECK(s.tandem == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(s.avg_error == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(s.polarization == doctest::Approx(0.3 / 0.3).epsilon(1e-15));
    CHECK(s.sigma1_sq == 0.0);
  }
  SUBCASE("identical classifiers that are always wrong") {
    const auto s =
        ensemble_stats(identical(3, 4, 4), EnsembleWeights::uniform(3), TieRule::lowest_label);
    CHECK(s.polarization == 1.0);
    CHECK(s.mv_error == 1.0);
  }
  SUBCASE("two classifiers disagreeing on 3 of 10 examples") {
    const auto d = csv("y,h1,h2\n0,0,1\n0,0,1\n0,0,1\n0,0,0\n0,0,0\n"
                       "0,0,0\n0,0,0\n0,0,0\n0,0,0\n0,0,0\n");
    const auto s = ensemble_stats(d, EnsembleWeights::uniform(2), TieRule::lowest_label);
    CHECK(s.disagreement_v == doctest::Approx(0.15).epsilon(1e-15));
    CHECK(s.disagreement_u == doctest::Approx(0.3).epsilon(1e-15));
  }
  SUBCASE("non-uniform weights leave the U-statistic undefined") {
    const auto ens = make_split_vote(0.75, SplitCase::half_half, 4);
    const auto s = ensemble_stats(ens.data, ens.weights, TieRule::lowest_label);
    CHECK(std::isnan(s.disagreement_u));
    CHECK(std::isnan(s.sigma1_sq));
  }
  SUBCASE("perfect ensemble reports zero polarization") {
    const auto s =
        ensemble_stats(identical(3, 5, 0), EnsembleWeights::uniform(3), TieRule::lowest_label);
    CHECK(s.polarization == 0.0);
    CHECK(s.epsilon_rho == 0.0);
  }
  SUBCASE("W exactly 1/2 is not counted above half") {
    const auto s = ensemble_stats(csv("y,h1,h2\n0,0,1\n"), EnsembleWeights::uniform(2),
                                  TieRule::lowest_label);
    CHECK(s.prob_w_gt_half == 0.0);
    CHECK(s.second_moment_w == 0.25);
  }
  SUBCASE("epsilon counts distinct wrong pairs") {
    // two wrong classifiers out of three, voting different wrong labels
    const auto d = csv("y,h1,h2,h3\n0,0,1,2\n", 3);
    const auto s = ensemble_stats(d, EnsembleWeights::uniform(3), TieRule::lowest_label);
    // P(h != y, h' != y, h != h') = 2/9, avg_error = 2/3
    CHECK(s.epsilon_rho == doctest::Approx((2.0 / 9.0) / (4.0 / 3.0)).epsilon(1e-14));
  }
}

TEST_CASE("tandem identity") {
  const auto ens = make_split_vote(0.75, SplitCase::half_half, 4);
  const auto p = pointwise_profile(ens.data, ens.weights);
  const auto t = tandem_identity_check(p, ens.data, ens.weights);
  CHECK(t.pointwise_second_moment == doctest::Approx(0.3125).epsilon(1e-15));
  CHECK(t.pairwise_tandem == doctest::Approx(0.3125).epsilon(1e-15));
  const auto same = identical(4, 10, 2);
  const auto q = pointwise_profile(same, EnsembleWeights::uniform(4));
  const auto u = tandem_identity_check(q, same, EnsembleWeights::uniform(4));
  CHECK(u.pointwise_second_moment == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(u.pairwise_tandem == doctest::Approx(0.2).epsilon(1e-15));
}

namespace {

PointwiseProfile profile_with_w(std::vector<double> w) {
  PointwiseProfile p;
  p.num_examples = w.size();
  p.num_classes = 2;
  p.w_rho = std::move(w);
  for (double v : p.w_rho) {
    p.label_mass.push_back(1.0 - v);
    p.label_mass.push_back(v);
  }
  p.tie_flags.assign(p.num_examples, 0);
  p.true_labels.assign(p.num_examples, 0);
  return p;
}

}  // namespace

TEST_CASE("competence") {
  SUBCASE("W = 0.25 everywhere") {
    const auto r = competence_check(profile_with_w({0.25, 0.25}));
    CHECK(r.competent);
    CHECK(r.semi_competent);
  }
  SUBCASE("W = 0.5 everywhere") {
    const auto r = competence_check(profile_with_w({0.5, 0.5, 0.5}));
    CHECK_FALSE(r.competent);
    CHECK(r.worst_margin == -1.0);
    CHECK(r.semi_competent);
  }
  SUBCASE("W = 0.75 everywhere") {
    const auto r = competence_check(profile_with_w({0.75}));
    CHECK_FALSE(r.competent);
    CHECK_FALSE(r.semi_competent);
  }
  SUBCASE("W a hair from 1/2 counts as 1/2") {
    const auto r = competence_check(profile_with_w({0.5 + 1e-15}));
    CHECK(r.semi_competent);
  }
  SUBCASE("violation only visible strictly between breakpoints") {
    // P(W in [t,1/2)) drops to 0 for t > 0.2 while P(W in [1/2, 1-t]) stays
    // 1/2 until t > 0.3.
    const auto r = competence_check(profile_with_w({0.2, 0.7}));
    CHECK_FALSE(r.competent);
    CHECK(r.worst_t > 0.2);
    CHECK(r.worst_t <= 0.3);
  }
}

TEST_CASE("tie set") {
  SUBCASE("perturbed weights have no ties") {
    const auto d = csv("y,h1,h2\n0,0,1\n1,0,1\n");
    const auto w = tie_free_perturb(EnsembleWeights::uniform(2), 1);
    CHECK(tie_set(pointwise_profile(d, w)).fraction == 0.0);
  }
  SUBCASE("always split between a right and a wrong classifier") {
    const auto d = csv("y,h1,h2\n0,0,1\n1,0,1\n2,2,0\n");
    const auto t = tie_set(pointwise_profile(d, EnsembleWeights::uniform(2)));
    CHECK(t.fraction == 1.0);
    CHECK_FALSE(t.tie_free());
  }
  SUBCASE("three of ten rows split") {
    std::string text = "y,h1,h2,h3,h4\n";
    for (int j = 0; j < 10; ++j) text += j < 3 ? "0,0,0,1,1\n" : "0,0,0,0,1\n";
    const auto t = tie_set(pointwise_profile(csv(text), EnsembleWeights::uniform(4)));
    CHECK(t.fraction == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(t.indices == std::vector<std::size_t>{0, 1, 2});
  }
  SUBCASE("a half split over two wrong labels is not a tie with y") {
    const auto d = csv("y,h1,h2\n0,1,2\n", 3);
    CHECK(tie_set(pointwise_profile(d, EnsembleWeights::uniform(2))).tie_free());
  }
}

TEST_CASE("sigma1 estimate") {
  CHECK(sigma1_estimate(identical(4, 6, 2), EnsembleWeights::uniform(4)) == 0.0);
  const auto pair = csv("y,h1,h2\n0,0,1\n0,1,1\n");
  CHECK(sigma1_estimate(pair, EnsembleWeights::uniform(2)) == 0.0);
  CHECK_THROWS_AS(sigma1_estimate(csv("y,h1\n0,0\n"), EnsembleWeights::uniform(1)),
                  ValidationError);
  CHECK_THROWS_AS(sigma1_estimate(pair, EnsembleWeights::from_values({1, 2})), ValidationError);
  // h1 disagrees with h2 and h3 everywhere; h2 and h3 agree.
  const auto d = csv("y,h1,h2,h3\n0,1,0,0\n0,1,0,0\n");
  // g1 = (1, 0.5, 0.5), sample variance 1/12
  CHECK(sigma1_estimate(d, EnsembleWeights::uniform(3)) ==
        doctest::Approx(1.0 / 12.0).epsilon(1e-15));
}

TEST_CASE("entropy profile") {
  SUBCASE("M = K") {
    const auto d = csv("y,h1,h2,h3\n0,1,2,0\n", 3);
    CHECK(entropy_profile(pointwise_profile(d, EnsembleWeights::uniform(3)), 3) == 0.0);
  }
  SUBCASE("two labels per row") {
    const auto d = csv("y,h1,h2\n0,0,2\n1,1,0\n", 3);
    CHECK(entropy_profile(pointwise_profile(d, EnsembleWeights::uniform(2)), 2) == 0.0);
  }
  SUBCASE("masses (0.6, 0.3, 0.1)") {
    const auto d = csv("y,h1,h2,h3\n0,0,1,2\n", 3);
    const auto p = pointwise_profile(d, EnsembleWeights::from_values({0.6, 0.3, 0.1}));
    CHECK(entropy_profile(p, 2) == doctest::Approx(0.1).epsilon(1e-15));
  }
  SUBCASE("set size out of range") {
    const auto p = pointwise_profile(csv("y,h1\n0,1\n"), EnsembleWeights::uniform(1));
    CHECK_THROWS_AS(entropy_profile(p, 1), ValidationError);
    CHECK_THROWS_AS(entropy_profile(p, 3), ValidationError);
  }
}

TEST_CASE("polarization ratio") {
  CHECK(polarization_ratio(0.0, 0.0) == 0.0);
  CHECK(polarization_ratio(0.5, 0.3125) == 1.6);
}

}  // TEST_SUITE
