#ifndef EVOGRAPH_MEGASTAR_HPP
#define EVOGRAPH_MEGASTAR_HPP

#include <cstdint>
#include <vector>

#include "evograph/dynamics.hpp"
#include "evograph/graph.hpp"
#include "evograph/rng.hpp"

namespace evograph::dynamics {

// Modified Moran dynamics on a megastar in which a feeder vertex cannot
// become a mutant while its clique is active (contains both mutants and
// non-mutants), and a mutant spawn from a feeder into an empty clique demotes
// the feeder. Dominated below by the Moran process under shared clocks.
class MegastarProcess {
 public:
  enum class Role : uint8_t { kCentre, kReservoir, kFeeder, kClique };

  // g must come from make_megastar; throws std::invalid_argument otherwise.
  MegastarProcess(const EvolutionaryGraph& g, double r,
                  const std::vector<int>& initial);

  const MutantState& state() const { return state_; }
  long long k() const { return k_; }
  long long branches() const { return l_; }
  Role role(int v) const { return role_[v]; }
  int branch(int v) const { return branch_[v]; }
  // |X' intersect K_j|, branches indexed from 1
  int clique_mutants(int j) const { return clique_count_[j]; }
  bool clique_active(int j) const {
    return clique_count_[j] > 0 && clique_count_[j] < k_;
  }
  bool absorbed() const { return state_.absorbed(); }
  bool fixated() const { return state_.fixated(); }

  // Applies one clock trigger (source u, spawn kind, target v) under the
  // megastar rules; returns the resulting effect on the mutant set.
  Effect apply_trigger(int u, SpawnKind kind, int v);

 private:
  const EvolutionaryGraph* g_;
  long long k_ = 0, l_ = 0, m_ = 0;
  std::vector<Role> role_;
  std::vector<int> branch_;
  std::vector<int> clique_count_;  // per branch, 1-based
  MutantState state_;

  void set_mutant(int v, bool mutant);
};

// One parity-matching step of the megastar process: reproducer chosen with
// probability fitness/W, target by out-weight, update per the forced-feeder
// rules. Throws std::logic_error on absorbed states.
Event megastar_step(const EvolutionaryGraph& g, MegastarProcess& proc, Rng& rng);

struct CoupledDominationResult {
  Outcome moran;
  Outcome megastar;
  bool domination_held = true;  // X' subset of X at every trigger
};

// Drives the Moran process X and the megastar process X' from one shared
// clock-trigger stream and reports whether X' remained a subset of X
// throughout. Runs until both processes absorb or max_events triggers.
CoupledDominationResult coupled_domination_run(const EvolutionaryGraph& g,
                                               double r,
                                               const InitialPolicy& initial,
                                               Rng& rng,
                                               long long max_events = 1'000'000'000);

}  // namespace evograph::dynamics

#endif
