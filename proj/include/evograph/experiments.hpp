#ifndef EVOGRAPH_EXPERIMENTS_HPP
#define EVOGRAPH_EXPERIMENTS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evograph/estimate.hpp"
#include "evograph/graph.hpp"

namespace evograph::experiments {

using estimate::FixationEstimate;

// One-sided bound scenario against a Monte Carlo extinction estimate.
// verdict:
//   "fail"         the 99% one-sided upper bound on extinction fell below
//                  the tested lower bound
//   "pass"         consistent with the bound and the test had power >= 0.5
//                  against the halved-bound alternative
//   "inconclusive" consistent, but too few trials to resolve the bound
struct ScenarioReport {
  std::string scenario;
  std::string verdict;
  double bound = 0.0;
  std::string bound_formula;
  double empirical = 0.0;  // extinction frequency among resolved trials
  double ci_lo = 0.0, ci_hi = 0.0;
  double power = 0.0;      // P(fail | true extinction = bound/2)
  long long trials = 0;
  uint64_t seed = 0;
  std::map<std::string, double> extras;

  std::string to_json() const;
};

struct CheckOptions {
  long long trials = 10000;
  uint64_t seed = 0;
  int workers = 0;
  long long max_steps = 1'000'000'000;
  double alpha = 0.01;  // one-sided test level
};

// Extinction probability of a uniformly seeded superstar is at least
// k/(2r(m+k)).
ScenarioReport check_superstar_instant_death(long long k, long long l,
                                             long long m, double r,
                                             const CheckOptions& opt);

// Fixation probability of a uniformly seeded megastar is at most
// 1 - 1/(52 r^2 sqrt(n)), i.e. extinction at least 1/(52 r^2 sqrt(n)).
ScenarioReport check_megastar_upper(long long k, long long l, long long m,
                                    double r, const CheckOptions& opt);

// Superstar with l = m = k^(3/2): reports the empirical extinction, the exact
// lower bound 1/(2r(sqrt(k)+1)), and the heuristic upper bound
// 1/(r^4 (k-1) (1-1/r)^2) side by side. The verdict covers only consistency
// with the lower bound; the heuristic value is descriptive.
ScenarioReport check_jlh_scenario(long long k, double r, const CheckOptions& opt);

struct AmplificationRow {
  FamilyParams params;
  long long n = 0;
  bool skipped = false;
  std::string skip_reason;
  double extinction = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;
  double ext_reg_value = 0.0;  // regular-graph extinction at this n
  double one_over_r = 0.0;
  std::string classification;  // finite-size evidence label
};

struct AmplificationReport {
  std::string family;
  double r = 0.0;
  std::vector<AmplificationRow> rows;
  double spearman = 0.0;        // rank correlation of extinction vs n
  std::string trend;            // "decreasing", "increasing", "flat"
  std::string caveat = "finite-size evidence, not an asymptotic proof";

  std::string to_json() const;
};

AmplificationReport amplification_report(const std::string& family, double r,
                                         const std::vector<FamilyParams>& sizes,
                                         const CheckOptions& opt);

// Declarative sweep over families, sizes and fitness values.
struct ExperimentSpec {
  Family family = Family::kComplete;
  std::vector<FamilyParams> grid;
  std::vector<double> r_values;
  long long trials = 10000;
  dynamics::InitialPolicy policy;
  std::vector<std::string> checks;  // named scenario ids to run per cell
  uint64_t seed = 0;
  long long max_steps = 1'000'000'000;
  int workers = 0;

  static ExperimentSpec from_json(const std::string& text);
};

struct SweepRow {
  FamilyParams params;
  double r = 0.0;
  bool skipped = false;
  std::string skip_reason;
  std::optional<FixationEstimate> est;
  std::vector<ScenarioReport> scenario_reports;

  std::string to_json() const;
  std::string to_csv() const;
};

std::string sweep_csv_header();

// Runs every cell; calls on_row as each completes (streaming), and also
// returns the collected rows.
std::vector<SweepRow> sweep(const ExperimentSpec& spec,
                            const std::function<void(const SweepRow&)>& on_row = {});

const std::vector<std::string>& known_check_ids();

std::string params_to_json(const FamilyParams& p);

}  // namespace evograph::experiments

#endif
