#ifndef EVOGRAPH_EXACT_HPP
#define EVOGRAPH_EXACT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "evograph/graph.hpp"

namespace evograph::exact {

// Fixation probability of a fitness-r mutant on a strongly connected regular
// n-vertex graph: (1 - 1/r) / (1 - 1/r^n), with the r = 1 limit 1/n.
// Computed through expm1 so large n and r near 1 stay accurate.
double rho_reg(double r, long long n);

// Extinction counterpart: (1/r - 1/r^n) / (1 - 1/r^n); 1 - 1/n at r = 1.
// Evaluated on its own route rather than as 1 - rho_reg so the pair can be
// cross-checked.
double ext_reg(double r, long long n);

// --- Classical gambler's ruin (biased walk on {0..a}, absorbing ends) ---

// Probability of reaching a before 0 from z, up-probability p != 1/2.
double gambler_fixation(double p, long long z, long long a);
// Expected number of transitions until absorption.
double gambler_expected_steps(double p, long long z, long long a);

// Birth-death chain on {0..a} with per-state up-probabilities, absorbing at
// both ends. Direct tridiagonal solves; used as the brute-force oracle for
// the closed forms and as the workhorse for the back-to-back chain.
struct WalkSpec {
  long long a = 0;                // states 0..a
  std::vector<double> up;         // up[i] for i in 1..a-1 (index i)
  long long start = 0;
};
double walk_absorb_high(const WalkSpec& w);      // P(hit a before 0)
double walk_expected_steps(const WalkSpec& w);   // E[steps to absorption]

// Back-to-back chain on states {a..d}: up-probability p1 on (a, c], 1/3 on
// (c, d), absorbing at a and d.  Returns the exact probability of reaching d
// from c without passing through b, and the exact expected hitting time of
// {a, d} from c.  Verifies the closed-form bounds
//   p >= 1 - ((1-p1)/p1)^(c-b) * 2^(d-c)   and
//   E[H] <= 2^(d-c+1) * (3 p1 - 1) / (2 p1 - 1)
// and throws std::logic_error if either fails.
struct BackToBackResult {
  double p_c_to_d_avoiding_b = 0.0;
  double expected_hit_ad = 0.0;
  double bound_p = 0.0;      // lower bound on the probability
  double bound_steps = 0.0;  // upper bound on the expectation
};
BackToBackResult backtoback_exact(long long a, long long b, long long c,
                                  long long d, double p1);

// Jump chain of an active megastar clique of size k: up-probability from
// state i is r(k-i) / ((r+1)(k-i) + 1), absorbing at 0 and k.
// Returned as a dense (k+1)x(k+1) row-stochastic matrix.
std::vector<std::vector<double>> clique_jump_matrix(double r, long long k);

// Dominating chain: up-probability r'/(r'+1) with r' = (r+1)/2 for
// 1 <= i <= k - c_r (c_r = ceil(2r/(r-1))), 1/3 above, absorbing at 0 and k.
// Verifies the entrywise domination against clique_jump_matrix(r, k)
// (p'_{i,i+1} >= p_{i,i+1} and p'_{i+1,i+2} >= p_{i,i+1}) and throws
// std::logic_error if it fails.
std::vector<std::vector<double>> z_chain_matrix(double r, long long k);

// Closed-form fixation probabilities of the 3-vertex counterexample graph.
struct CounterexampleFixation {
  double p0 = 0.0;       // initial mutant at vertex 0
  double p1 = 0.0;       // initial mutant at vertex 1 (= vertex 2)
  double uniform = 0.0;  // uniformly random initial mutant
};
CounterexampleFixation counterexample_fixation(double r);

// --- Brute-force absorbing-chain solver over the 2^n configuration lattice ---

struct SolveOptions {
  long long state_cap = 20;    // refuse graphs with more than this many vertices
  double residual = 1e-12;
  long long max_sweeps = 1'000'000;
  bool force_direct = false;   // direct elimination (n <= 12 only)
};

struct AbsorbingChainSolution {
  int n = 0;
  std::vector<double> fixation;  // indexed by mutant-set bitmask, size 2^n
  double uniform_fixation = 0.0; // mean over singleton initial sets
  long long sweeps = 0;
  double achieved_residual = 0.0;
  std::vector<std::string> warnings;

  double prob(uint64_t mask) const { return fixation[mask]; }
};

AbsorbingChainSolution solve_absorbing(const EvolutionaryGraph& g, double r,
                                       const SolveOptions& opt = {});

double fixation_exact(const EvolutionaryGraph& g, double r,
                      const std::vector<int>& initial,
                      const SolveOptions& opt = {});
std::vector<double> fixation_all_singletons(const EvolutionaryGraph& g, double r,
                                            const SolveOptions& opt = {});

}  // namespace evograph::exact

#endif
