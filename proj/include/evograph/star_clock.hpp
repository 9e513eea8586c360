#ifndef EVOGRAPH_STAR_CLOCK_HPP
#define EVOGRAPH_STAR_CLOCK_HPP

#include <vector>

#include "evograph/dynamics.hpp"
#include "evograph/graph.hpp"
#include "evograph/rng.hpp"

namespace evograph::dynamics {

// The four auxiliary Poisson streams attached to an edge (u,v). The starred
// pair runs on u's mutant local time, the barred complements on u's
// non-mutant local time:
//   kMutStar    rate r*w_uv, drives the mutant clock while u is a mutant
//   kNonBarStar rate   w_uv, drives the non-mutant clock while u is a mutant
//   kNonStar    rate   w_uv, drives the non-mutant clock while u is not
//   kMutBarStar rate r*w_uv, drives the mutant clock while u is not
enum class StarStream : uint8_t { kMutStar, kNonBarStar, kNonStar, kMutBarStar };

inline bool runs_on_mutant_time(StarStream s) {
  return s == StarStream::kMutStar || s == StarStream::kNonBarStar;
}
inline SpawnKind physical_kind(StarStream s) {
  return (s == StarStream::kMutStar || s == StarStream::kMutBarStar)
             ? SpawnKind::kMutant
             : SpawnKind::kNonMutant;
}

struct StarTrigger {
  double t = 0.0;          // global time of the trigger
  int source = -1;
  int target = -1;
  StarStream stream = StarStream::kMutStar;
  double local_time = 0.0;  // position on the stream's local-time axis
  bool source_was_mutant = false;  // state of the source just before the trigger
  Effect effect = Effect::kNone;
};

struct StarClockLedger {
  int n = 0;
  std::vector<int> initial;
  std::vector<StarTrigger> triggers;
};

struct StarClockOptions {
  long long max_events = 1'000'000'000;
  bool log_events = false;  // also produce a timed event log on the Outcome
};

struct StarClockRun {
  Outcome outcome;          // the projected Moran process
  StarClockLedger ledger;
};

// Runs the Moran process through the star-clock coupling: every stream keeps
// its own pending trigger in local time and is paused whenever the parity of
// its source does not match, so the same stream randomness is reused across
// parity flips.
StarClockRun star_clock_coupled_run(const EvolutionaryGraph& g, double r,
                                    const InitialPolicy& initial, Rng& rng,
                                    const StarClockOptions& opt = {});

// Replays a ledger and checks, trigger by trigger, that each physical clock
// fired exactly when its parity-matching star-clock reached the source's
// local time (mutant clocks from the starred mutant stream at T_m(u,t) while
// u is a mutant, from the barred one at T_n(u,t) otherwise, and dually for
// non-mutant clocks). Returns false and fills `why` on the first violation.
bool check_observation_one(const StarClockLedger& ledger, double tol = 1e-7,
                           std::string* why = nullptr);

}  // namespace evograph::dynamics

#endif
