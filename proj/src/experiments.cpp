#include "evograph/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "evograph/exact.hpp"

namespace evograph::experiments {

using estimate::EstimateOptions;
using estimate::estimate_fixation;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// One-sided test of H0 "extinction >= bound" at level alpha:
// reject (fail) iff the (1-alpha) upper Wilson bound on extinction falls
// below the bound. Power is evaluated against the alternative p = bound/2.
struct BoundTest {
  std::string verdict;
  double empirical;
  double ci_lo, ci_hi;
  double power;
};

BoundTest one_sided_bound_test(long long ext, long long resolved, double bound,
                               double alpha) {
  BoundTest t;
  t.empirical = static_cast<double>(ext) / resolved;
  auto ci = stats::wilson_ci(ext, resolved, 0.95);
  t.ci_lo = ci.first;
  t.ci_hi = ci.second;

  double upper = stats::wilson_upper_bound(ext, resolved, 1.0 - alpha);
  bool fail = upper < bound;

  // rejection region: counts whose one-sided upper bound stays below the
  // tested bound (the upper bound is increasing in the count)
  long long lo = -1, hi = resolved;
  while (lo + 1 < hi) {
    long long mid = lo + (hi - lo) / 2;
    if (stats::wilson_upper_bound(mid, resolved, 1.0 - alpha) < bound)
      lo = mid;
    else
      hi = mid;
  }
  long long reject_at = lo;  // largest rejecting count, -1 if none

  // power against the halved-bound alternative
  if (reject_at < 0) {
    t.power = 0.0;
  } else {
    double n = static_cast<double>(resolved);
    double alt = bound / 2.0;
    double mu = n * alt;
    double sd = std::sqrt(std::max(n * alt * (1.0 - alt), 1e-300));
    t.power = stats::normal_cdf((static_cast<double>(reject_at) + 0.5 - mu) / sd);
  }

  if (fail)
    t.verdict = "fail";
  else
    t.verdict = t.power >= 0.5 ? "pass" : "inconclusive";
  return t;
}

FixationEstimate run_cell(const EvolutionaryGraph& g, double r,
                          const CheckOptions& opt) {
  EstimateOptions eo;
  eo.trials = opt.trials;
  eo.master_seed = opt.seed;
  eo.workers = opt.workers;
  eo.max_steps = opt.max_steps;
  return estimate_fixation(g, r, dynamics::InitialPolicy::uniform(), eo);
}

}  // namespace

std::string ScenarioReport::to_json() const {
  ordered_json j;
  j["scenario"] = scenario;
  j["bound"] = bound;
  j["bound_formula"] = bound_formula;
  j["verdict"] = verdict;
  j["empirical"] = empirical;
  j["ci"] = {ci_lo, ci_hi};
  j["power"] = power;
  j["trials"] = trials;
  j["seed"] = seed;
  for (const auto& [k, v] : extras) j[k] = v;
  return j.dump();
}

ScenarioReport check_superstar_instant_death(long long k, long long l,
                                             long long m, double r,
                                             const CheckOptions& opt) {
  auto g = make_superstar(k, l, m);
  auto est = run_cell(g, r, opt);

  ScenarioReport rep;
  rep.scenario = "superstar_instant_death";
  rep.bound_formula = "k/(2*r*(m+k))";
  rep.bound = static_cast<double>(k) /
              (2.0 * r * static_cast<double>(m + k));
  rep.trials = opt.trials;
  rep.seed = opt.seed;

  long long resolved = est.fixations + est.extinctions;
  BoundTest t = one_sided_bound_test(est.extinctions, resolved, rep.bound, opt.alpha);
  rep.verdict = t.verdict;
  rep.empirical = t.empirical;
  rep.ci_lo = t.ci_lo;
  rep.ci_hi = t.ci_hi;
  rep.power = t.power;
  rep.extras["n"] = static_cast<double>(g.n());
  rep.extras["censored"] = static_cast<double>(est.censored);
  return rep;
}

ScenarioReport check_megastar_upper(long long k, long long l, long long m,
                                    double r, const CheckOptions& opt) {
  auto g = make_megastar(k, l, m);
  double n = static_cast<double>(g.n());
  auto est = run_cell(g, r, opt);

  ScenarioReport rep;
  rep.scenario = "megastar_upper";
  rep.bound_formula = "1/(52*r^2*sqrt(n))";
  rep.bound = 1.0 / (52.0 * r * r * std::sqrt(n));
  rep.trials = opt.trials;
  rep.seed = opt.seed;

  long long resolved = est.fixations + est.extinctions;
  BoundTest t = one_sided_bound_test(est.extinctions, resolved, rep.bound, opt.alpha);
  rep.verdict = t.verdict;
  rep.empirical = t.empirical;
  rep.ci_lo = t.ci_lo;
  rep.ci_hi = t.ci_hi;
  rep.power = t.power;
  rep.extras["n"] = n;
  rep.extras["fixation_bound"] = 1.0 - rep.bound;
  rep.extras["fixation_point"] = est.point;
  rep.extras["censored"] = static_cast<double>(est.censored);
  return rep;
}

ScenarioReport check_jlh_scenario(long long k, double r, const CheckOptions& opt) {
  if (k < 2) throw std::invalid_argument("jlh scenario needs k >= 2");
  double exact_s = std::pow(static_cast<double>(k), 1.5);
  long long s = std::llround(exact_s);
  bool rounded = std::fabs(exact_s - static_cast<double>(s)) > 1e-9;

  auto g = make_superstar(k, s, s);
  auto est = run_cell(g, r, opt);

  ScenarioReport rep;
  rep.scenario = "jlh_scenario";
  rep.bound_formula = "1/(2*r*(sqrt(k)+1))";
  rep.bound = 1.0 / (2.0 * r * (std::sqrt(static_cast<double>(k)) + 1.0));
  rep.trials = opt.trials;
  rep.seed = opt.seed;

  long long resolved = est.fixations + est.extinctions;
  BoundTest t = one_sided_bound_test(est.extinctions, resolved, rep.bound, opt.alpha);
  rep.verdict = t.verdict;
  rep.empirical = t.empirical;
  rep.ci_lo = t.ci_lo;
  rep.ci_hi = t.ci_hi;
  rep.power = t.power;
  rep.extras["n"] = static_cast<double>(g.n());
  rep.extras["l"] = static_cast<double>(s);
  rep.extras["m"] = static_cast<double>(s);
  rep.extras["rounded_l"] = rounded ? 1.0 : 0.0;
  // heuristic aggregate bound, reported descriptively and never as an oracle
  rep.extras["heuristic_extinction_upper"] =
      1.0 / (std::pow(r, 4.0) * static_cast<double>(k - 1) *
             std::pow(1.0 - 1.0 / r, 2.0));
  return rep;
}

std::string AmplificationReport::to_json() const {
  ordered_json j;
  j["family"] = family;
  j["r"] = r;
  j["spearman"] = spearman;
  j["trend"] = trend;
  j["caveat"] = caveat;
  auto& rows_j = j["rows"] = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json rj = ordered_json::parse(params_to_json(row.params));
    rj["n"] = row.n;
    if (row.skipped) {
      rj["skipped"] = row.skip_reason;
    } else {
      rj["extinction"] = row.extinction;
      rj["ci"] = {row.ci_lo, row.ci_hi};
      rj["ext_reg"] = row.ext_reg_value;
      rj["one_over_r"] = row.one_over_r;
      rj["classification"] = row.classification;
    }
    rows_j.push_back(rj);
  }
  return j.dump();
}

AmplificationReport amplification_report(const std::string& family, double r,
                                         const std::vector<FamilyParams>& sizes,
                                         const CheckOptions& opt) {
  AmplificationReport rep;
  rep.family = family;
  rep.r = r;

  std::vector<double> ns, exts;
  uint64_t cell_seed = opt.seed;
  for (const FamilyParams& p : sizes) {
    AmplificationRow row;
    row.params = p;
    row.params.family = family_from_string(family);
    try {
      auto g = make_from_params(row.params);
      row.n = g.n();
      CheckOptions cell = opt;
      cell.seed = cell_seed++;
      auto est = run_cell(g, r, cell);
      row.extinction = est.extinction_point();
      // extinction CI mirrors the fixation CI
      row.ci_lo = 1.0 - est.ci_hi;
      row.ci_hi = 1.0 - est.ci_lo;
      row.ext_reg_value = exact::ext_reg(r, g.n());
      row.one_over_r = 1.0 / r;
      if (row.extinction >= row.ext_reg_value - (row.ci_hi - row.ci_lo) / 2.0)
        row.classification = "not amplifying (matches regular-graph extinction)";
      else if (row.ci_hi < 1.0 / r)
        row.classification = "amplifying (extinction below 1/r)";
      else
        row.classification = "unresolved at this size";
      ns.push_back(static_cast<double>(row.n));
      exts.push_back(row.extinction);
    } catch (const SizeLimitError& e) {
      row.skipped = true;
      row.skip_reason = e.what();
    }
    rep.rows.push_back(row);
  }

  if (ns.size() >= 2) {
    rep.spearman = stats::spearman_rho(ns, exts);
    rep.trend = rep.spearman <= -0.999 ? "decreasing"
                : rep.spearman >= 0.999 ? "increasing"
                                        : "flat";
  } else {
    rep.trend = "insufficient data";
  }
  return rep;
}

const std::vector<std::string>& known_check_ids() {
  static const std::vector<std::string> ids = {
      "superstar_instant_death", "megastar_upper", "jlh_scenario"};
  return ids;
}

std::string params_to_json(const FamilyParams& p) {
  ordered_json j;
  j["family"] = family_to_string(p.family);
  switch (p.family) {
    case Family::kComplete: j["n"] = p.n; break;
    case Family::kStar: j["l"] = p.l > 0 ? p.l : p.n; break;
    case Family::kMegastarFamily: j["l"] = p.l; break;
    case Family::kCounterexample: break;
    default:
      j["k"] = p.k;
      j["l"] = p.l;
      j["m"] = p.m;
  }
  return j.dump();
}

ExperimentSpec ExperimentSpec::from_json(const std::string& text) {
  json j = json::parse(text);
  ExperimentSpec spec;
  spec.family = family_from_string(j.at("family").get<std::string>());

  if (!j.contains("grid") || !j.at("grid").is_array() || j.at("grid").empty())
    throw std::invalid_argument("experiment spec needs a non-empty grid");
  for (const auto& cell : j.at("grid")) {
    FamilyParams p;
    p.family = spec.family;
    p.k = cell.value("k", 0LL);
    p.l = cell.value("l", 0LL);
    p.m = cell.value("m", 0LL);
    p.n = cell.value("n", 0LL);
    spec.grid.push_back(p);
  }

  if (!j.contains("r") || j.at("r").empty())
    throw std::invalid_argument("experiment spec needs at least one r value");
  for (const auto& rv : j.at("r")) spec.r_values.push_back(rv.get<double>());

  spec.trials = j.value("trials", 10000LL);
  if (spec.trials < 1) throw std::invalid_argument("trials must be >= 1");
  spec.seed = j.value("seed", 0ULL);
  spec.max_steps = j.value("max_steps", 1'000'000'000LL);
  spec.workers = j.value("workers", 0);

  std::string pol = j.value("policy", "uniform");
  if (pol == "uniform") {
    spec.policy = dynamics::InitialPolicy::uniform();
  } else if (pol.rfind("vertex:", 0) == 0) {
    spec.policy = dynamics::InitialPolicy::at(std::stoi(pol.substr(7)));
  } else {
    throw std::invalid_argument("unknown policy: " + pol);
  }

  if (j.contains("checks")) {
    for (const auto& c : j.at("checks")) {
      std::string id = c.get<std::string>();
      const auto& known = known_check_ids();
      if (std::find(known.begin(), known.end(), id) == known.end())
        throw std::invalid_argument("unknown scenario id: " + id);
      spec.checks.push_back(id);
    }
  }
  return spec;
}

std::string SweepRow::to_json() const {
  ordered_json j = ordered_json::parse(params_to_json(params));
  j["r"] = r;
  if (skipped) {
    j["skipped"] = skip_reason;
  } else if (est) {
    ordered_json e = ordered_json::parse(estimate::estimate_to_json(
        *est, params_to_json(params), r, "uniform"));
    for (auto it = e.begin(); it != e.end(); ++it)
      if (it.key() != "graph" && it.key() != "r") j[it.key()] = it.value();
  }
  if (!scenario_reports.empty()) {
    auto& arr = j["scenarios"] = ordered_json::array();
    for (const auto& s : scenario_reports) arr.push_back(ordered_json::parse(s.to_json()));
  }
  return j.dump();
}

std::string sweep_csv_header() {
  return "family,k,l,m,n,r,trials,fix,ext,cens,point,ci_lo,ci_hi,level,seed,"
         "mean_steps,skipped";
}

std::string SweepRow::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << family_to_string(params.family) << ',' << params.k << ',' << params.l
     << ',' << params.m << ',' << params.n << ',' << r << ',';
  if (skipped || !est) {
    os << ",,,,,,,,,," << '"' << skip_reason << '"';
  } else {
    const auto& e = *est;
    os << e.trials << ',' << e.fixations << ',' << e.extinctions << ','
       << e.censored << ',' << e.point << ',' << e.ci_lo << ',' << e.ci_hi
       << ',' << e.level << ',' << e.master_seed << ',' << e.mean_steps << ',';
  }
  return os.str();
}

std::vector<SweepRow> sweep(const ExperimentSpec& spec,
                            const std::function<void(const SweepRow&)>& on_row) {
  if (spec.grid.empty()) throw std::invalid_argument("sweep needs a non-empty grid");
  if (spec.r_values.empty())
    throw std::invalid_argument("sweep needs at least one r value");

  std::vector<SweepRow> rows;
  uint64_t cell_index = 0;
  for (const FamilyParams& p : spec.grid) {
    for (double r : spec.r_values) {
      SweepRow row;
      row.params = p;
      row.r = r;
      uint64_t cell_seed = spec.seed + 0x9e3779b97f4a7c15ULL * ++cell_index;
      try {
        auto g = make_from_params(p);
        row.params.n = g.n();
        EstimateOptions eo;
        eo.trials = spec.trials;
        eo.master_seed = cell_seed;
        eo.workers = spec.workers;
        eo.max_steps = spec.max_steps;
        row.est = estimate_fixation(g, r, spec.policy, eo);

        CheckOptions co;
        co.trials = spec.trials;
        co.seed = cell_seed;
        co.workers = spec.workers;
        co.max_steps = spec.max_steps;
        for (const std::string& id : spec.checks) {
          if (id == "superstar_instant_death" && p.family == Family::kSuperstar)
            row.scenario_reports.push_back(
                check_superstar_instant_death(p.k, p.l, p.m, r, co));
          else if (id == "megastar_upper" && p.family == Family::kMegastar)
            row.scenario_reports.push_back(
                check_megastar_upper(p.k, p.l, p.m, r, co));
          else if (id == "jlh_scenario" && p.family == Family::kSuperstar)
            row.scenario_reports.push_back(check_jlh_scenario(p.k, r, co));
        }
      } catch (const SizeLimitError& e) {
        row.skipped = true;
        row.skip_reason = e.what();
      }
      if (on_row) on_row(row);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace evograph::experiments
