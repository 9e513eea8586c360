#include "evograph/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "evograph/rng.hpp"

namespace evograph::stats {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal quantile needs p in (0,1)");

  // Acklam's rational approximation
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;

  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    double q = p - 0.5;
    double t = q * q;
    x = (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) * q /
        (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // one Halley refinement
  double e = normal_cdf(x) - p;
  double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

std::pair<double, double> wilson_ci(long long successes, long long trials,
                                    double level) {
  if (trials <= 0) throw std::invalid_argument("wilson_ci needs trials >= 1");
  if (successes < 0 || successes > trials)
    throw std::invalid_argument("wilson_ci needs 0 <= successes <= trials");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("wilson_ci needs level in (0,1)");

  double z = normal_quantile(1.0 - (1.0 - level) / 2.0);
  double n = static_cast<double>(trials);
  double phat = static_cast<double>(successes) / n;
  double z2n = z * z / n;
  double centre = (phat + z2n / 2.0) / (1.0 + z2n);
  double half = z * std::sqrt(phat * (1.0 - phat) / n + z2n / (4.0 * n)) /
                (1.0 + z2n);
  double lo = std::max(0.0, centre - half);
  double hi = std::min(1.0, centre + half);
  if (successes == 0) lo = 0.0;
  if (successes == trials) hi = 1.0;
  return {lo, hi};
}

double wilson_upper_bound(long long successes, long long trials,
                          double confidence) {
  // one-sided: same centre/half with z at `confidence` directly
  if (trials <= 0) throw std::invalid_argument("wilson bound needs trials >= 1");
  double z = normal_quantile(confidence);
  double n = static_cast<double>(trials);
  double phat = static_cast<double>(successes) / n;
  double z2n = z * z / n;
  double centre = (phat + z2n / 2.0) / (1.0 + z2n);
  double half = z * std::sqrt(phat * (1.0 - phat) / n + z2n / (4.0 * n)) /
                (1.0 + z2n);
  return std::min(1.0, centre + half);
}

double two_proportion_z(long long x1, long long n1, long long x2, long long n2) {
  double p1 = static_cast<double>(x1) / n1;
  double p2 = static_cast<double>(x2) / n2;
  double pooled = static_cast<double>(x1 + x2) / (n1 + n2);
  double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
  if (se == 0.0) return 0.0;
  return (p1 - p2) / se;
}

namespace {
std::vector<double> midranks(const std::vector<double>& v) {
  size_t n = v.size();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t t = i; t <= j; ++t) rank[idx[t]] = mid;
    i = j + 1;
  }
  return rank;
}
}  // namespace

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("spearman_rho needs two equal-length series");
  auto rx = midranks(x), ry = midranks(y);
  double mx = 0, my = 0;
  for (size_t i = 0; i < rx.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= rx.size();
  my /= ry.size();
  double num = 0, dx = 0, dy = 0;
  for (size_t i = 0; i < rx.size(); ++i) {
    num += (rx[i] - mx) * (ry[i] - my);
    dx += (rx[i] - mx) * (rx[i] - mx);
    dy += (ry[i] - my) * (ry[i] - my);
  }
  if (dx == 0.0 || dy == 0.0) return 0.0;
  return num / std::sqrt(dx * dy);
}

}  // namespace evograph::stats

namespace evograph::estimate {

using dynamics::InitialPolicy;
using dynamics::Result;

bool is_star_shaped(const EvolutionaryGraph& g) {
  int n = g.n();
  if (n < 2) return false;
  if (g.out_degree(0) != n - 1 || !g.uniform_out(0)) return false;
  for (int v = 1; v < n; ++v)
    if (g.out_degree(v) != 1 || g.target(v, 0) != 0) return false;
  return true;
}

namespace {

struct TrialResult {
  Result result;
  double steps;
};

// Exact reduction of the star to (centre type, mutant leaf count).
// Leaves are exchangeable, so the full process lumps to this pair; one
// uniform draw resolves the race between the next leaf-count change and the
// intervening centre flips. Step counts are accumulated as conditional
// expectations, which leaves the estimated mean unchanged.
class StarLumpedEngine {
 public:
  StarLumpedEngine(long long leaves, double r) : l_(leaves), r_(r) {
    double lf = static_cast<double>(l_);
    a_ = r_ / (r_ + lf);          // P(leaf gain before centre flip | centre mutant)
    b_ = 1.0 / (1.0 + r_ * lf);   // P(leaf loss before centre flip | centre non-mutant)
    denom_ = a_ + b_ - a_ * b_;
  }

  TrialResult run(bool centre_mutant, long long m_leaves, Rng& rng) const {
    double steps = 0.0;
    bool c = centre_mutant;
    long long m = m_leaves;
    double lf = static_cast<double>(l_);

    while (true) {
      if (c && m == l_) return {Result::kFixation, steps};
      if (!c && m == 0) return {Result::kExtinction, steps};

      if (c && m == 0) {
        // up vs extinction-by-flip; every parity event resolves the race
        steps += 1.0;
        if (rng.uniform01() < a_) {
          m = 1;
        } else {
          return {Result::kExtinction, steps};
        }
        continue;
      }
      if (!c && m == l_) {
        steps += 1.0;
        if (rng.uniform01() < b_) {
          m = l_ - 1;
        } else {
          return {Result::kFixation, steps};
        }
        continue;
      }

      // interior: race between the next leaf gain and the next leaf loss,
      // with the centre flip-flopping in between
      double mf = static_cast<double>(m);
      double w_m = r_ * (mf + 1.0) + (lf - mf);          // W while centre mutant
      double exit_m = (lf - mf) * (1.0 + r_ / lf);       // phase-exit rate
      double w_n = r_ * mf + (lf - mf) + 1.0;            // W while centre non-mutant
      double exit_n = mf * (r_ + 1.0 / lf);
      double sm = w_m / exit_m;  // expected parity steps per mutant phase
      double sn = w_n / exit_n;

      double p_up, phases_m, phases_n;
      if (c) {
        p_up = a_ / denom_;
        phases_m = 1.0 / denom_;
        phases_n = (1.0 - a_) / denom_;
      } else {
        p_up = 1.0 - b_ / denom_;
        phases_n = 1.0 / denom_;
        phases_m = (1.0 - b_) / denom_;
      }
      steps += phases_m * sm + phases_n * sn;

      if (rng.uniform01() < p_up) {
        ++m;
        c = true;   // a gain happens from a mutant-centre phase
      } else {
        --m;
        c = false;  // a loss happens from a non-mutant-centre phase
      }
    }
  }

 private:
  long long l_;
  double r_;
  double a_, b_, denom_;
};

TrialResult run_one_trial(const EvolutionaryGraph& g, double r,
                          const InitialPolicy& policy, Engine engine,
                          const StarLumpedEngine* star, long long max_steps,
                          Rng& rng) {
  if (engine == Engine::kStarLumped) {
    std::vector<int> init = policy.draw(g.n(), rng);
    bool c = false;
    std::vector<char> leaf(g.n(), 0);
    for (int v : init) {
      if (v < 0 || v >= g.n())
        throw std::invalid_argument("initial vertex out of range");
      if (v == 0)
        c = true;
      else
        leaf[v] = 1;
    }
    long long m = std::count(leaf.begin(), leaf.end(), 1);
    return star->run(c, m, rng);
  }
  if (engine == Engine::kContinuous) {
    dynamics::ContinuousOptions copt;
    copt.max_events = max_steps;
    auto out = dynamics::run_continuous(g, r, policy, rng, copt);
    return {out.result, static_cast<double>(out.steps)};
  }
  dynamics::RunOptions ropt;
  ropt.max_steps = max_steps;
  auto out = dynamics::run_to_absorption(g, r, policy, rng, ropt);
  return {out.result, static_cast<double>(out.steps)};
}

struct Partial {
  long long fix = 0, ext = 0, cens = 0;
};

}  // namespace

FixationEstimate estimate_fixation(const EvolutionaryGraph& g, double r,
                                   const InitialPolicy& policy,
                                   const EstimateOptions& opt) {
  if (opt.trials < 1) throw std::invalid_argument("estimate needs trials >= 1");
  if (!(r > 0.0)) throw std::invalid_argument("estimate needs r > 0");

  Engine engine = opt.engine;
  bool star_ok = is_star_shaped(g);
  if (engine == Engine::kAuto)
    engine = star_ok ? Engine::kStarLumped : Engine::kDiscrete;
  if (engine == Engine::kStarLumped && !star_ok)
    throw std::invalid_argument("star-lumped engine needs a star graph");
  StarLumpedEngine star(star_ok ? g.n() - 1 : 1, r);

  if (opt.per_trial) opt.per_trial->assign(opt.trials, 0);

  int workers = opt.workers > 0
                    ? opt.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = static_cast<int>(
      std::min<long long>(workers, opt.trials));

  std::vector<Partial> parts(workers);
  // per-trial step counts, summed in trial order afterwards so the mean does
  // not depend on how trials were partitioned
  std::vector<double> trial_steps(opt.trials, 0.0);
  auto body = [&](int w) {
    Partial& p = parts[w];
    for (long long i = w; i < opt.trials; i += workers) {
      Rng rng(trial_seed(opt.master_seed, static_cast<uint64_t>(i)));
      TrialResult tr = run_one_trial(g, r, policy, engine, &star,
                                     opt.max_steps, rng);
      switch (tr.result) {
        case Result::kFixation: ++p.fix; trial_steps[i] = tr.steps; break;
        case Result::kExtinction: ++p.ext; trial_steps[i] = tr.steps; break;
        case Result::kCensored: ++p.cens; break;
      }
      if (opt.per_trial)
        (*opt.per_trial)[i] = tr.result == Result::kFixation     ? 1
                              : tr.result == Result::kExtinction ? 0
                                                                 : 2;
    }
  };

  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(body, w);
    for (auto& th : pool) th.join();
  }

  FixationEstimate est;
  est.trials = opt.trials;
  est.master_seed = opt.master_seed;
  est.level = opt.ci_level;
  for (const Partial& p : parts) {
    est.fixations += p.fix;
    est.extinctions += p.ext;
    est.censored += p.cens;
  }
  double steps_sum = 0.0;
  for (double s : trial_steps) steps_sum += s;

  long long resolved = est.fixations + est.extinctions;
  if (resolved == 0)
    throw EstimateUnavailable(
        "all " + std::to_string(est.censored) +
            " trials were censored at max_steps; no fixation estimate",
        est.censored);

  est.point = static_cast<double>(est.fixations) / resolved;
  est.mean_steps = steps_sum / resolved;
  if (policy.deterministic_outcome(g.n())) {
    est.ci_lo = est.ci_hi = est.point;
  } else {
    auto ci = stats::wilson_ci(est.fixations, resolved, opt.ci_level);
    est.ci_lo = ci.first;
    est.ci_hi = ci.second;
  }
  return est;
}

std::string policy_to_string(const InitialPolicy& p) {
  switch (p.kind) {
    case InitialPolicy::kUniformSingleton: return "uniform";
    case InitialPolicy::kFixedVertex: return "vertex:" + std::to_string(p.vertex);
    case InitialPolicy::kFixedSet: {
      std::string s = "set:";
      for (size_t i = 0; i < p.set.size(); ++i)
        s += (i ? "," : "") + std::to_string(p.set[i]);
      return s;
    }
  }
  return "?";
}

std::string estimate_to_json(const FixationEstimate& e,
                             const std::string& graph_desc, double r,
                             const std::string& policy) {
  nlohmann::ordered_json j;
  j["graph"] = nlohmann::ordered_json::parse(graph_desc);
  j["r"] = r;
  j["policy"] = policy;
  j["trials"] = e.trials;
  j["fix"] = e.fixations;
  j["ext"] = e.extinctions;
  j["cens"] = e.censored;
  j["point"] = e.point;
  j["ci"] = {e.ci_lo, e.ci_hi};
  j["level"] = e.level;
  j["seed"] = e.master_seed;
  j["mean_steps"] = e.mean_steps;
  return j.dump();
}

std::string estimate_csv_header() {
  return "graph,r,policy,trials,fix,ext,cens,point,ci_lo,ci_hi,level,seed,mean_steps";
}

std::string estimate_to_csv(const FixationEstimate& e,
                            const std::string& graph_desc, double r,
                            const std::string& policy) {
  std::ostringstream os;
  os.precision(17);
  std::string gd = graph_desc;
  for (char& ch : gd)
    if (ch == ',') ch = ';';
  os << '"' << gd << '"' << ',' << r << ',' << policy << ',' << e.trials << ','
     << e.fixations << ',' << e.extinctions << ',' << e.censored << ','
     << e.point << ',' << e.ci_lo << ',' << e.ci_hi << ',' << e.level << ','
     << e.master_seed << ',' << e.mean_steps;
  return os.str();
}

}  // namespace evograph::estimate
