#include <doctest.h>

#include <cmath>

#include "evograph/estimate.hpp"
#include "evograph/exact.hpp"

using namespace evograph;
using namespace evograph::estimate;
using dynamics::InitialPolicy;

TEST_CASE("wilson intervals") {
  auto [lo0, hi0] = wilson_ci(0, 100, 0.95);
  CHECK(lo0 == 0.0);
  CHECK(hi0 == doctest::Approx(0.036994).epsilon(1e-3));

  auto [lo5, hi5] = wilson_ci(50, 100, 0.95);
  CHECK(lo5 + hi5 == doctest::Approx(1.0).epsilon(1e-12));  // symmetric about 1/2

  auto [lo1, hi1] = wilson_ci(100, 100, 0.95);
  CHECK(hi1 == 1.0);
  CHECK(lo1 < 1.0);

  CHECK_THROWS_AS(wilson_ci(0, 0, 0.95), std::invalid_argument);
  CHECK_THROWS_AS(wilson_ci(5, 4, 0.95), std::invalid_argument);
  CHECK_THROWS_AS(wilson_ci(1, 4, 0.0), std::invalid_argument);
}

TEST_CASE("normal quantile round trips through the cdf") {
  for (double p : {0.001, 0.01, 0.05, 0.25, 0.5, 0.9, 0.975, 0.995, 0.9999}) {
    double x = stats::normal_quantile(p);
    CHECK(stats::normal_cdf(x) == doctest::Approx(p).epsilon(1e-9));
  }
  CHECK(stats::normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
}

TEST_CASE("spearman rho") {
  CHECK(stats::spearman_rho({1, 2, 3}, {5, 4, 1}) == doctest::Approx(-1.0));
  CHECK(stats::spearman_rho({1, 2, 3}, {2, 5, 9}) == doctest::Approx(1.0));
  CHECK(std::fabs(stats::spearman_rho({1, 2, 3, 4}, {1, 3, 2, 4})) < 1.0);
}

TEST_CASE("estimate matches the exact solver on a metafunnel") {
  auto g = make_metafunnel(2, 1, 2);  // n = 7
  double expect = exact::solve_absorbing(g, 2.0).uniform_fixation;
  EstimateOptions opt;
  opt.trials = 40000;
  opt.master_seed = 23;
  auto est = estimate_fixation(g, 2.0, InitialPolicy::uniform(), opt);
  CHECK(est.ci_lo <= expect);
  CHECK(expect <= est.ci_hi);
}

TEST_CASE("estimate matches the exact solver on K_3") {
  auto g = make_complete(3);
  EstimateOptions opt;
  opt.trials = 100000;
  opt.master_seed = 17;
  auto est = estimate_fixation(g, 2.0, InitialPolicy::uniform(), opt);
  double expect = exact::rho_reg(2.0, 3);
  CHECK(est.ci_lo <= expect);
  CHECK(expect <= est.ci_hi);
  CHECK(est.fixations + est.extinctions + est.censored == est.trials);
  CHECK(est.mean_steps > 0.0);
}

TEST_CASE("star detection") {
  CHECK(is_star_shaped(make_star(5)));
  CHECK(is_star_shaped(make_star(1)));  // K_2 counts; the reduction still holds
  CHECK_FALSE(is_star_shaped(make_complete(3)));
  CHECK_FALSE(is_star_shaped(make_superstar(1, 1, 2)));
  CHECK_FALSE(is_star_shaped(make_counterexample()));
}

TEST_CASE("star-lumped engine agrees with the exact solver") {
  auto g = make_star(6);
  double expect = exact::solve_absorbing(g, 2.0).uniform_fixation;
  EstimateOptions opt;
  opt.trials = 200000;
  opt.master_seed = 18;
  opt.engine = Engine::kStarLumped;
  auto est = estimate_fixation(g, 2.0, InitialPolicy::uniform(), opt);
  CHECK(est.ci_lo <= expect);
  CHECK(expect <= est.ci_hi);
}

TEST_CASE("star-lumped engine agrees with the generic engine") {
  auto g = make_star(10);
  EstimateOptions lumped;
  lumped.trials = 100000;
  lumped.master_seed = 19;
  lumped.engine = Engine::kStarLumped;
  auto a = estimate_fixation(g, 2.0, InitialPolicy::uniform(), lumped);

  EstimateOptions plain = lumped;
  plain.master_seed = 20;
  plain.engine = Engine::kDiscrete;
  auto b = estimate_fixation(g, 2.0, InitialPolicy::uniform(), plain);

  double z = stats::two_proportion_z(a.fixations, a.trials, b.fixations, b.trials);
  CHECK(std::fabs(z) < 3.0);
  // step accounting: the lumped engine reports conditional expectations whose
  // mean must match the realized counts
  CHECK(a.mean_steps == doctest::Approx(b.mean_steps).epsilon(0.05));

  // fixed-vertex policies work through the reduction too; check both engines
  // against the exact solver from a leaf and from the centre
  auto singles = exact::fixation_all_singletons(g, 2.0);
  for (int v : {0, 3}) {
    double expect = singles[v];
    double sigma = std::sqrt(expect * (1.0 - expect) / lumped.trials);
    auto c = estimate_fixation(g, 2.0, InitialPolicy::at(v), lumped);
    auto d = estimate_fixation(g, 2.0, InitialPolicy::at(v), plain);
    CHECK(std::fabs(c.point - expect) < 4.0 * sigma);
    CHECK(std::fabs(d.point - expect) < 4.0 * sigma);
  }

  CHECK_THROWS_AS(estimate_fixation(make_complete(3), 2.0,
                                    InitialPolicy::uniform(), lumped),
                  std::invalid_argument);
}

TEST_CASE("star-lumped engine on K_2 reproduces the closed form") {
  auto g = make_star(1);
  EstimateOptions opt;
  opt.trials = 200000;
  opt.master_seed = 21;
  opt.engine = Engine::kStarLumped;
  auto est = estimate_fixation(g, 2.0, InitialPolicy::uniform(), opt);
  double expect = exact::rho_reg(2.0, 2);
  CHECK(est.ci_lo <= expect);
  CHECK(expect <= est.ci_hi);
}

TEST_CASE("deterministic policies give degenerate intervals") {
  auto g = make_complete(3);
  EstimateOptions opt;
  opt.trials = 1;
  opt.master_seed = 5;
  auto est = estimate_fixation(g, 2.0, InitialPolicy::fixed({0, 1, 2}), opt);
  CHECK(est.point == 1.0);
  CHECK(est.ci_lo == 1.0);
  CHECK(est.ci_hi == 1.0);
  CHECK(est.mean_steps == 0.0);
}

TEST_CASE("all-censored estimates raise with diagnostics") {
  auto g = make_complete(8);
  EstimateOptions opt;
  opt.trials = 50;
  opt.master_seed = 6;
  opt.max_steps = 1;  // two mutants cannot absorb in one step
  bool threw = false;
  try {
    estimate_fixation(g, 2.0, InitialPolicy::fixed({0, 1}), opt);
  } catch (const EstimateUnavailable& e) {
    threw = true;
    CHECK(e.censored_trials == 50);
  }
  CHECK(threw);
}

TEST_CASE("identical seeds give identical tallies for any worker count") {
  auto g = make_star(30);
  std::vector<uint8_t> t1, t4;
  EstimateOptions opt;
  opt.trials = 5000;
  opt.master_seed = 777;
  opt.workers = 1;
  opt.per_trial = &t1;
  auto a = estimate_fixation(g, 2.0, InitialPolicy::uniform(), opt);
  opt.workers = 4;
  opt.per_trial = &t4;
  auto b = estimate_fixation(g, 2.0, InitialPolicy::uniform(), opt);
  CHECK(a.fixations == b.fixations);
  CHECK(a.extinctions == b.extinctions);
  CHECK(a.mean_steps == b.mean_steps);
  CHECK(t1 == t4);

  // different seeds give different trial sequences
  opt.master_seed = 778;
  std::vector<uint8_t> t_other;
  opt.per_trial = &t_other;
  estimate_fixation(g, 2.0, InitialPolicy::uniform(), opt);
  CHECK(t_other != t1);
}

TEST_CASE("ci coverage on K_3") {
  // 200 independent 1000-trial estimates: the 95% interval must cover the
  // true value 4/7 at least 90% of the time
  auto g = make_complete(3);
  double truth = 4.0 / 7.0;
  int covered = 0;
  for (int rep = 0; rep < 200; ++rep) {
    EstimateOptions opt;
    opt.trials = 1000;
    opt.master_seed = 9000 + rep;
    auto est = estimate_fixation(g, 2.0, InitialPolicy::uniform(), opt);
    if (est.ci_lo <= truth && truth <= est.ci_hi) ++covered;
  }
  CHECK(covered >= 180);
}

TEST_CASE("result serialization schemas") {
  FixationEstimate e;
  e.trials = 10;
  e.fixations = 6;
  e.extinctions = 4;
  e.point = 0.6;
  e.ci_lo = 0.3;
  e.ci_hi = 0.8;
  e.level = 0.95;
  e.mean_steps = 12.5;
  e.master_seed = 42;

  auto j = estimate_to_json(e, R"({"family":"star","l":5})", 2.0, "uniform");
  for (auto key : {"\"graph\"", "\"r\"", "\"policy\"", "\"trials\"", "\"fix\"",
                   "\"ext\"", "\"cens\"", "\"point\"", "\"ci\"", "\"level\"",
                   "\"seed\"", "\"mean_steps\""})
    CHECK(j.find(key) != std::string::npos);

  auto header = estimate_csv_header();
  auto row = estimate_to_csv(e, R"({"family":"star","l":5})", 2.0, "uniform");
  CHECK(std::count(header.begin(), header.end(), ',') ==
        std::count(row.begin(), row.end(), ','));
}
