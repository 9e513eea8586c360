#include <doctest.h>

#include <cmath>

#include "evograph/experiments.hpp"

using namespace evograph;
using namespace evograph::experiments;

TEST_CASE("superstar instant-death bound check") {
  CheckOptions opt;
  opt.trials = 10000;
  opt.seed = 404;
  auto rep = check_superstar_instant_death(10, 5, 10, 2.0, opt);
  CHECK(rep.bound == doctest::Approx(0.125));  // 10/(2*2*20)
  CHECK(rep.verdict == "pass");
  CHECK(rep.empirical >= rep.bound);
  CHECK(rep.power > 0.9);
  CHECK(rep.bound_formula == "k/(2*r*(m+k))");

  // the bound shrinks toward k/(2rm) when m dominates k
  CheckOptions tiny;
  tiny.trials = 100;
  auto b_large_m = 5.0 / (2.0 * 2.0 * (1000.0 + 5.0));
  CHECK(b_large_m == doctest::Approx(5.0 / (2.0 * 2.0 * 1000.0)).epsilon(0.01));
}

TEST_CASE("scenario verdicts never convert noise into failure") {
  // tiny trial counts must give "inconclusive", not "fail"
  CheckOptions opt;
  opt.trials = 120;
  opt.seed = 405;
  auto rep = check_megastar_upper(3, 3, 3, 2.0, opt);
  CHECK(rep.bound == doctest::Approx(1.0 / (52.0 * 4.0 * std::sqrt(22.0))));
  CHECK((rep.verdict == "pass" || rep.verdict == "inconclusive"));
  if (rep.verdict == "inconclusive") CHECK(rep.power < 0.5);
}

TEST_CASE("megastar upper bound check") {
  CheckOptions opt;
  opt.trials = 60000;  // enough for power >= 0.5 against half the tiny bound
  opt.seed = 406;
  auto rep = check_megastar_upper(3, 3, 3, 2.0, opt);
  CHECK(rep.extras.at("n") == 22.0);
  CHECK(rep.verdict == "pass");
  CHECK(rep.power >= 0.5);
  CHECK(rep.extras.at("fixation_bound") == doctest::Approx(1.0 - rep.bound));
}

TEST_CASE("jlh scenario arithmetic") {
  CheckOptions opt;
  opt.trials = 10000;
  opt.seed = 407;
  auto rep = check_jlh_scenario(4, 2.0, opt);
  // l = m = 8, n = 8(4+8)+1 = 97
  CHECK(rep.extras.at("l") == 8.0);
  CHECK(rep.extras.at("n") == 97.0);
  CHECK(rep.bound == doctest::Approx(1.0 / 12.0));
  CHECK(rep.extras.at("heuristic_extinction_upper") ==
        doctest::Approx(1.0 / 12.0));
  CHECK(rep.extras.at("rounded_l") == 0.0);
  CHECK((rep.verdict == "pass" || rep.verdict == "inconclusive"));

  // k = 5 forces rounding of k^(3/2)
  CheckOptions small;
  small.trials = 500;
  small.seed = 408;
  auto rounded = check_jlh_scenario(5, 2.0, small);
  CHECK(rounded.extras.at("rounded_l") == 1.0);
}

TEST_CASE("scenario report json carries the bound formula and power") {
  CheckOptions opt;
  opt.trials = 2000;
  opt.seed = 409;
  auto rep = check_superstar_instant_death(2, 2, 2, 2.0, opt);
  auto j = rep.to_json();
  for (auto key : {"\"scenario\"", "\"bound\"", "\"bound_formula\"",
                   "\"verdict\"", "\"power\"", "\"trials\"", "\"seed\""})
    CHECK(j.find(key) != std::string::npos);
}

TEST_CASE("scenario reports are deterministic given the seed") {
  CheckOptions opt;
  opt.trials = 3000;
  opt.seed = 414;
  auto a = check_superstar_instant_death(3, 2, 3, 2.0, opt);
  auto b = check_superstar_instant_death(3, 2, 3, 2.0, opt);
  CHECK(a.to_json() == b.to_json());

  std::vector<FamilyParams> sizes;
  FamilyParams p;
  p.family = Family::kStar;
  p.l = 20;
  sizes.push_back(p);
  p.l = 40;
  sizes.push_back(p);
  auto r1 = amplification_report("star", 2.0, sizes, opt);
  auto r2 = amplification_report("star", 2.0, sizes, opt);
  CHECK(r1.to_json() == r2.to_json());
}

TEST_CASE("amplification report on stars") {
  CheckOptions opt;
  opt.trials = 20000;
  opt.seed = 410;
  std::vector<FamilyParams> sizes;
  for (long long l : {50, 500, 5000}) {
    FamilyParams p;
    p.family = Family::kStar;
    p.l = l;
    sizes.push_back(p);
  }
  auto rep = amplification_report("star", 2.0, sizes, opt);
  REQUIRE(rep.rows.size() == 3);
  // extinction plateaus near 1/4, below the regular-graph 1/2
  const auto& last = rep.rows.back();
  CHECK(std::fabs(last.extinction - 0.25) < 0.02);
  CHECK(last.classification.find("amplifying") != std::string::npos);
  CHECK(rep.caveat.find("finite-size") != std::string::npos);
}

TEST_CASE("amplification report on complete graphs flags no amplification") {
  CheckOptions opt;
  opt.trials = 20000;
  opt.seed = 411;
  std::vector<FamilyParams> sizes;
  for (long long n : {6, 10, 14}) {
    FamilyParams p;
    p.family = Family::kComplete;
    p.n = n;
    sizes.push_back(p);
  }
  auto rep = amplification_report("complete", 2.0, sizes, opt);
  for (const auto& row : rep.rows) {
    CHECK_FALSE(row.skipped);
    CHECK(std::fabs(row.extinction - row.ext_reg_value) < 0.02);
    CHECK(row.classification.find("not amplifying") != std::string::npos);
  }
}

TEST_CASE("amplification report on the single-parameter megastar family") {
  CheckOptions opt;
  opt.trials = 40000;
  opt.seed = 413;
  std::vector<FamilyParams> sizes;
  for (long long l : {2, 3}) {
    FamilyParams p;
    p.family = Family::kMegastarFamily;
    p.l = l;
    sizes.push_back(p);
  }
  auto rep = amplification_report("megastar_family", 2.0, sizes, opt);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].n == 9);
  CHECK(rep.rows[1].n == 40);
  CHECK(rep.trend == "decreasing");
}

TEST_CASE("amplification report skips cells above the size cap") {
  CheckOptions opt;
  opt.trials = 100;
  opt.seed = 412;
  std::vector<FamilyParams> sizes;
  FamilyParams p;
  p.family = Family::kMegastarFamily;
  p.l = 2;
  sizes.push_back(p);
  p.l = 8;  // over the default cap
  sizes.push_back(p);
  auto rep = amplification_report("megastar_family", 2.0, sizes, opt);
  CHECK_FALSE(rep.rows[0].skipped);
  CHECK(rep.rows[1].skipped);
  CHECK_FALSE(rep.rows[1].skip_reason.empty());
}

TEST_CASE("experiment spec parsing") {
  auto spec = ExperimentSpec::from_json(R"({
    "family": "star",
    "grid": [{"l": 10}, {"l": 100}],
    "r": [2.0, 3.0],
    "trials": 500,
    "seed": 7,
    "policy": "uniform",
    "checks": []
  })");
  CHECK(spec.family == Family::kStar);
  CHECK(spec.grid.size() == 2);
  CHECK(spec.r_values.size() == 2);
  CHECK(spec.trials == 500);

  CHECK_THROWS_AS(ExperimentSpec::from_json(R"({"family":"star","grid":[],"r":[2]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentSpec::from_json(R"({"family":"star","grid":[{"l":3}],"r":[]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentSpec::from_json(
                      R"({"family":"star","grid":[{"l":3}],"r":[2],"checks":["nope"]})"),
                  std::invalid_argument);
}

TEST_CASE("sweep runs cells and streams rows") {
  auto spec = ExperimentSpec::from_json(R"({
    "family": "complete",
    "grid": [{"n": 3}, {"n": 4}],
    "r": [2.0],
    "trials": 2000,
    "seed": 11
  })");
  int streamed = 0;
  auto rows = sweep(spec, [&](const SweepRow& row) {
    ++streamed;
    CHECK_FALSE(row.skipped);
  });
  CHECK(streamed == 2);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    REQUIRE(row.est.has_value());
    CHECK(row.est->trials == 2000);
    auto j = row.to_json();
    CHECK(j.find("\"point\"") != std::string::npos);
    auto csv = row.to_csv();
    auto header = sweep_csv_header();
    CHECK(std::count(csv.begin(), csv.end(), ',') ==
          std::count(header.begin(), header.end(), ','));
  }

  // a single complete-graph cell tracks the exact value inside its CI
  double expect = 4.0 / 7.0;
  CHECK(rows[0].est->ci_lo <= expect);
  CHECK(expect <= rows[0].est->ci_hi);
}

TEST_CASE("sweep marks oversized cells as skipped") {
  ExperimentSpec spec;
  spec.family = Family::kMegastarFamily;
  FamilyParams p;
  p.family = Family::kMegastarFamily;
  p.l = 8;
  spec.grid.push_back(p);
  spec.r_values = {2.0};
  spec.trials = 10;
  auto rows = sweep(spec);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].skipped);
  CHECK(rows[0].to_json().find("skipped") != std::string::npos);
}

TEST_CASE("sweep rejects empty grids") {
  ExperimentSpec spec;
  spec.r_values = {2.0};
  CHECK_THROWS_AS(sweep(spec), std::invalid_argument);
}
