#include "evograph/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace evograph::exact {

double rho_reg(double r, long long n) {
  if (!(r > 0.0)) throw std::invalid_argument("rho_reg needs r > 0");
  if (n < 1) throw std::invalid_argument("rho_reg needs n >= 1");
  double a = std::log(r);
  if (a == 0.0) return 1.0 / static_cast<double>(n);
  // (1 - r^-1) / (1 - r^-n) = expm1(-a) / expm1(-n a)
  return std::expm1(-a) / std::expm1(-static_cast<double>(n) * a);
}

double ext_reg(double r, long long n) {
  if (!(r > 0.0)) throw std::invalid_argument("ext_reg needs r > 0");
  if (n < 1) throw std::invalid_argument("ext_reg needs n >= 1");
  if (r == 1.0) return 1.0 - 1.0 / static_cast<double>(n);
  double rinv = 1.0 / r;
  double rn = std::exp(-static_cast<double>(n) * std::log(r));
  return (rinv - rn) / (1.0 - rn);
}

namespace {

void check_gambler_args(double p, long long z, long long a) {
  if (a < 1) throw std::invalid_argument("gambler's ruin needs a >= 1");
  if (z < 0 || z > a) throw std::invalid_argument("gambler's ruin needs 0 <= z <= a");
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("gambler's ruin needs p in (0,1)");
  if (p == 0.5)
    throw std::invalid_argument("p = 1/2 unsupported in gambler's ruin closed forms");
}

}  // namespace

double gambler_fixation(double p, long long z, long long a) {
  check_gambler_args(p, z, a);
  double q = 1.0 - p;
  double lr = std::log(q / p);
  // ((q/p)^z - 1) / ((q/p)^a - 1), stable for extreme exponents
  return std::expm1(static_cast<double>(z) * lr) /
         std::expm1(static_cast<double>(a) * lr);
}

double gambler_expected_steps(double p, long long z, long long a) {
  check_gambler_args(p, z, a);
  double q = 1.0 - p;
  double zf = static_cast<double>(z), af = static_cast<double>(a);
  double lr = std::log(q / p);
  double ratio = std::expm1(zf * lr) / std::expm1(af * lr);
  return zf / (q - p) - (af / (q - p)) * ratio;
}

double walk_absorb_high(const WalkSpec& w) {
  long long a = w.a;
  if (a < 1) throw std::invalid_argument("walk needs a >= 1");
  if (w.start < 0 || w.start > a) throw std::invalid_argument("walk start out of range");
  if (static_cast<long long>(w.up.size()) < a)
    throw std::invalid_argument("walk up-probabilities missing");
  if (w.start == 0) return 0.0;
  if (w.start == a) return 1.0;

  // h(i) = up(i) h(i+1) + down(i) h(i-1); h(0)=0, h(a)=1.
  // Forward elimination on the tridiagonal system.
  std::vector<double> c(a, 0.0), d(a, 0.0);  // h(i) = c[i] h(i+1) + d[i]
  for (long long i = 1; i < a; ++i) {
    double p = w.up[i];
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("interior up-probability must be in (0,1)");
    double q = 1.0 - p;
    double denom = 1.0 - q * c[i - 1];
    c[i] = p / denom;
    d[i] = q * d[i - 1] / denom;
  }
  std::vector<double> h(a + 1, 0.0);
  h[a] = 1.0;
  for (long long i = a - 1; i >= 1; --i) h[i] = c[i] * h[i + 1] + d[i];
  return h[w.start];
}

double walk_expected_steps(const WalkSpec& w) {
  long long a = w.a;
  if (a < 1) throw std::invalid_argument("walk needs a >= 1");
  if (w.start < 0 || w.start > a) throw std::invalid_argument("walk start out of range");
  if (w.start == 0 || w.start == a) return 0.0;

  // t(i) = 1 + up(i) t(i+1) + down(i) t(i-1); t(0)=t(a)=0.
  std::vector<double> c(a, 0.0), d(a, 0.0);
  for (long long i = 1; i < a; ++i) {
    double p = w.up[i];
    double q = 1.0 - p;
    double denom = 1.0 - q * c[i - 1];
    c[i] = p / denom;
    d[i] = (1.0 + q * d[i - 1]) / denom;
  }
  std::vector<double> t(a + 1, 0.0);
  for (long long i = a - 1; i >= 1; --i) t[i] = c[i] * t[i + 1] + d[i];
  return t[w.start];
}

BackToBackResult backtoback_exact(long long a, long long b, long long c,
                                  long long d, double p1) {
  if (!(a < b && b < c - 1 && c + 1 < d))
    throw std::invalid_argument("back-to-back chain needs a < b < c-1 and c+1 < d");
  if (!(p1 > 0.5 && p1 < 1.0))
    throw std::invalid_argument("back-to-back chain needs p1 in (1/2, 1)");

  auto up_at = [&](long long state) {
    return state <= c ? p1 : 1.0 / 3.0;
  };

  BackToBackResult res;

  // P(reach d from c without passing through b): walk on {b..d}, both ends
  // absorbing, shifted to {0..d-b}.
  {
    WalkSpec w;
    w.a = d - b;
    w.start = c - b;
    w.up.assign(w.a, 0.0);
    for (long long i = 1; i < w.a; ++i) w.up[i] = up_at(b + i);
    res.p_c_to_d_avoiding_b = walk_absorb_high(w);
  }

  // E[H_{c;{a,d}}]: hitting time of {a, d} on the full chain {a..d}.
  {
    WalkSpec w;
    w.a = d - a;
    w.start = c - a;
    w.up.assign(w.a, 0.0);
    for (long long i = 1; i < w.a; ++i) w.up[i] = up_at(a + i);
    res.expected_hit_ad = walk_expected_steps(w);
  }

  res.bound_p = 1.0 - std::pow((1.0 - p1) / p1, static_cast<double>(c - b)) *
                          std::pow(2.0, static_cast<double>(d - c));
  res.bound_steps = std::pow(2.0, static_cast<double>(d - c + 1)) *
                    (3.0 * p1 - 1.0) / (2.0 * p1 - 1.0);

  const double slack = 1e-9;
  if (res.p_c_to_d_avoiding_b < res.bound_p - slack)
    throw std::logic_error("back-to-back probability bound violated");
  if (res.expected_hit_ad > res.bound_steps + slack)
    throw std::logic_error("back-to-back expected-steps bound violated");
  return res;
}

std::vector<std::vector<double>> clique_jump_matrix(double r, long long k) {
  if (!(r > 0.0)) throw std::invalid_argument("clique jump chain needs r > 0");
  if (k < 1) throw std::invalid_argument("clique jump chain needs k >= 1");
  std::vector<std::vector<double>> P(k + 1, std::vector<double>(k + 1, 0.0));
  P[0][0] = 1.0;
  P[k][k] = 1.0;
  for (long long i = 1; i < k; ++i) {
    double ki = static_cast<double>(k - i);
    double up = r * ki / ((r + 1.0) * ki + 1.0);
    P[i][i + 1] = up;
    P[i][i - 1] = 1.0 - up;
  }
  return P;
}

std::vector<std::vector<double>> z_chain_matrix(double r, long long k) {
  if (!(r > 1.0)) throw std::invalid_argument("Z chain needs r > 1");
  if (k < 1) throw std::invalid_argument("Z chain needs k >= 1");
  long long cr = static_cast<long long>(std::ceil(2.0 * r / (r - 1.0)));
  double rp = (r + 1.0) / 2.0;
  double low_up = rp / (rp + 1.0);

  std::vector<std::vector<double>> Z(k + 1, std::vector<double>(k + 1, 0.0));
  Z[0][0] = 1.0;
  Z[k][k] = 1.0;
  for (long long i = 1; i < k; ++i) {
    double up = (i <= k - cr) ? low_up : 1.0 / 3.0;
    Z[i][i + 1] = up;
    Z[i][i - 1] = 1.0 - up;
  }

  // entrywise domination against the clique chain: p'_{i,i+1} >= p_{i,i+1}
  // and the shifted form p'_{i+1,i+2} >= p_{i,i+1}
  auto P = clique_jump_matrix(r, k);
  for (long long i = 1; i < k; ++i) {
    if (P[i][i + 1] < Z[i][i + 1] - 1e-12)
      throw std::logic_error("Z chain fails domination at state " + std::to_string(i));
    if (i + 1 < k && P[i + 1][i + 2] < Z[i][i + 1] - 1e-12)
      throw std::logic_error("Z chain fails shifted domination at state " +
                             std::to_string(i));
  }
  return Z;
}

CounterexampleFixation counterexample_fixation(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("counterexample fixation needs r > 0");
  CounterexampleFixation f;
  double denom = (r + 1.0) * (r * r + r + 1.0);
  f.p0 = r * r * (2.0 * r + 1.0) / (2.0 * denom);
  f.p1 = r * r * (4.0 * r + 5.0) / (4.0 * denom);
  f.uniform = r * r / (r * r + r + 1.0);
  return f;
}

namespace {

// Gauss-Seidel sweeps over states ordered by popcount. Boundary information
// enters from the absorbing states (empty set and full set), so alternating
// ascending/descending popcount sweeps propagates it in both directions.
struct TransitionScratch {
  const EvolutionaryGraph& g;
  double r;
  int n;

  // visits every transition of state S: calls f(T, prob)
  template <typename F>
  void for_each(uint64_t S, F&& f) const {
    int mutants = static_cast<int>(__builtin_popcountll(S));
    double W = r * mutants + (n - mutants);
    for (int u = 0; u < n; ++u) {
      bool um = (S >> u) & 1;
      double pu = (um ? r : 1.0) / W;
      for (int i = 0; i < g.out_degree(u); ++i) {
        int v = g.target(u, i);
        uint64_t T = um ? (S | (1ULL << v)) : (S & ~(1ULL << v));
        f(T, pu * g.weight(u, i));
      }
    }
  }
};

void solve_direct(const TransitionScratch& tr, std::vector<double>& p) {
  // dense elimination over the transient states
  size_t total = p.size();
  uint64_t full = total - 1;
  size_t m = total - 2;  // transient states: 1..full-1 map to rows 0..m-1
  std::vector<double> A(m * (m + 1), 0.0);
  auto row = [&](size_t i) { return A.data() + i * (m + 1); };

  for (uint64_t S = 1; S < full; ++S) {
    size_t i = S - 1;
    row(i)[i] = 1.0;
    tr.for_each(S, [&](uint64_t T, double prob) {
      if (T == 0) return;
      if (T == full) {
        row(i)[m] += prob;
      } else {
        row(i)[T - 1] -= prob;
      }
    });
  }

  for (size_t col = 0; col < m; ++col) {
    size_t piv = col;
    for (size_t i = col + 1; i < m; ++i)
      if (std::fabs(row(i)[col]) > std::fabs(row(piv)[col])) piv = i;
    if (piv != col)
      std::swap_ranges(row(col), row(col) + m + 1, row(piv));
    double diag = row(col)[col];
    if (diag == 0.0) throw std::runtime_error("singular absorption system");
    for (size_t i = col + 1; i < m; ++i) {
      double factor = row(i)[col] / diag;
      if (factor == 0.0) continue;
      for (size_t jj = col; jj <= m; ++jj) row(i)[jj] -= factor * row(col)[jj];
    }
  }
  for (size_t i = m; i-- > 0;) {
    double acc = row(i)[m];
    for (size_t jj = i + 1; jj < m; ++jj) acc -= row(i)[jj] * p[jj + 1];
    p[i + 1] = acc / row(i)[i];
  }
}

}  // namespace

AbsorbingChainSolution solve_absorbing(const EvolutionaryGraph& g, double r,
                                       const SolveOptions& opt) {
  if (!(r > 0.0)) throw std::invalid_argument("fixation solve needs r > 0");
  int n = g.n();
  if (n < 1) throw std::invalid_argument("fixation solve needs a non-empty graph");
  if (n > opt.state_cap)
    throw SizeLimitError("exact solver limited to " +
                         std::to_string(opt.state_cap) + " vertices, got " +
                         std::to_string(n));

  AbsorbingChainSolution sol;
  sol.n = n;
  if (!strongly_connected(g))
    sol.warnings.push_back(
        "graph is not strongly connected; absorbing states other than the "
        "empty and full sets may exist and the solution is taken as given");

  size_t total = 1ULL << n;
  uint64_t full = total - 1;
  sol.fixation.assign(total, 0.0);
  sol.fixation[full] = 1.0;

  TransitionScratch tr{g, r, n};

  if (opt.force_direct || n <= 6) {
    if (n > 12)
      throw std::invalid_argument("direct elimination limited to n <= 12");
    solve_direct(tr, sol.fixation);
    sol.achieved_residual = 0.0;
  } else {
    // states sorted by popcount; sweep alternately up and down
    std::vector<uint64_t> order;
    order.reserve(total - 2);
    for (int pc = 1; pc < n; ++pc)
      for (uint64_t S = 1; S < full; ++S)
        if (__builtin_popcountll(S) == pc) order.push_back(S);

    auto& p = sol.fixation;
    auto update = [&](uint64_t S) {
      double acc = 0.0, self = 0.0;
      tr.for_each(S, [&](uint64_t T, double prob) {
        if (T == S)
          self += prob;
        else
          acc += prob * p[T];
      });
      double next = acc / (1.0 - self);
      double delta = std::fabs(next - p[S]);
      p[S] = next;
      return delta;
    };

    double max_delta = 0.0;
    long long sweep = 0;
    for (; sweep < opt.max_sweeps; ++sweep) {
      max_delta = 0.0;
      if (sweep % 2 == 0) {
        for (uint64_t S : order) max_delta = std::max(max_delta, update(S));
      } else {
        for (auto it = order.rbegin(); it != order.rend(); ++it)
          max_delta = std::max(max_delta, update(*it));
      }
      if (max_delta <= opt.residual * 0.01) break;
    }
    sol.sweeps = sweep + 1;

    // true residual |p - Pp|
    double residual = 0.0;
    for (uint64_t S : order) {
      double acc = 0.0;
      tr.for_each(S, [&](uint64_t T, double prob) { acc += prob * p[T]; });
      residual = std::max(residual, std::fabs(acc - p[S]));
    }
    sol.achieved_residual = residual;
    if (residual > opt.residual) {
      if (n <= 12) {
        solve_direct(tr, sol.fixation);
        sol.achieved_residual = 0.0;
        sol.warnings.push_back("Gauss-Seidel stalled; fell back to direct elimination");
      } else {
        sol.warnings.push_back("residual target not reached: " +
                               std::to_string(residual));
      }
    }
  }

  double acc = 0.0;
  for (int v = 0; v < n; ++v) acc += sol.fixation[1ULL << v];
  sol.uniform_fixation = acc / n;
  return sol;
}

double fixation_exact(const EvolutionaryGraph& g, double r,
                      const std::vector<int>& initial, const SolveOptions& opt) {
  auto sol = solve_absorbing(g, r, opt);
  uint64_t mask = 0;
  for (int v : initial) {
    if (v < 0 || v >= g.n()) throw std::invalid_argument("initial vertex out of range");
    mask |= 1ULL << v;
  }
  return sol.fixation[mask];
}

std::vector<double> fixation_all_singletons(const EvolutionaryGraph& g, double r,
                                            const SolveOptions& opt) {
  auto sol = solve_absorbing(g, r, opt);
  std::vector<double> out(g.n());
  for (int v = 0; v < g.n(); ++v) out[v] = sol.fixation[1ULL << v];
  return out;
}

}  // namespace evograph::exact
