#ifndef EVOGRAPH_DYNAMICS_HPP
#define EVOGRAPH_DYNAMICS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evograph/graph.hpp"
#include "evograph/rng.hpp"

namespace evograph::dynamics {

// Mutant set with O(1) membership flips and O(1) uniform sampling from either
// class. order_[0..count) holds the mutants, order_[count..n) the rest.
class MutantState {
 public:
  MutantState(int n, double r);
  MutantState(int n, double r, const std::vector<int>& mutants);

  int n() const { return n_; }
  double r() const { return r_; }
  int mutant_count() const { return count_; }
  // sum of individual fitnesses, r per mutant and 1 per non-mutant;
  // maintained incrementally
  double total_fitness() const { return total_fitness_; }
  bool is_mutant(int v) const { return pos_[v] < count_; }
  bool absorbed() const { return count_ == 0 || count_ == n_; }
  bool fixated() const { return count_ == n_; }

  int mutant_at(int i) const { return order_[i]; }
  int nonmutant_at(int i) const { return order_[count_ + i]; }

  void make_mutant(int v);
  void make_nonmutant(int v);

  std::vector<int> mutants() const;

 private:
  int n_ = 0;
  double r_ = 1.0;
  int count_ = 0;
  double total_fitness_ = 0.0;
  std::vector<int> order_;
  std::vector<int> pos_;
};

enum class SpawnKind : uint8_t { kMutant, kNonMutant };
enum class Effect : uint8_t { kGain, kLoss, kNone };

struct Event {
  double time = 0.0;  // continuous time, or step index for discrete runs
  int source = -1;
  int target = -1;
  SpawnKind kind = SpawnKind::kMutant;
  Effect effect = Effect::kNone;
};

enum class Result : uint8_t { kFixation, kExtinction, kCensored };

struct EventLog {
  int n = 0;
  std::vector<int> initial;
  std::vector<Event> events;
  double final_time = 0.0;
};

struct Outcome {
  Result result = Result::kCensored;
  long long steps = 0;       // reproduction events (parity-matching triggers)
  double final_time = 0.0;   // meaningful for continuous runs
  std::optional<EventLog> event_log;

  bool fixated() const { return result == Result::kFixation; }
};

// How the initial mutant set is chosen.
struct InitialPolicy {
  enum Kind { kUniformSingleton, kFixedVertex, kFixedSet } kind = kUniformSingleton;
  int vertex = 0;
  std::vector<int> set;

  static InitialPolicy uniform() { return {}; }
  static InitialPolicy at(int v) { return {kFixedVertex, v, {}}; }
  static InitialPolicy fixed(std::vector<int> s) { return {kFixedSet, 0, std::move(s)}; }

  std::vector<int> draw(int n, Rng& rng) const;
  // true when every trial starts from the same deterministic absorbing state
  bool deterministic_outcome(int n) const;
};

// One step of the discrete Moran process: reproducing vertex chosen with
// probability fitness/W, offspring target by out-weight, target overwritten.
// Throws std::logic_error if the state is already absorbed.
Event discrete_step(const EvolutionaryGraph& g, MutantState& state, Rng& rng);

struct RunOptions {
  long long max_steps = 1'000'000'000;
  bool log_events = false;
};

Outcome run_to_absorption(const EvolutionaryGraph& g, double r,
                          const InitialPolicy& initial, Rng& rng,
                          const RunOptions& opt = {});

// Continuous-time run. Mode selects between sampling only parity-matching
// clocks (fast; the jump chain equals the discrete process) and simulating
// every clock stream so that parity-mismatched triggers appear in the log as
// no-change events.
enum class ContinuousMode { kEffectiveOnly, kFullLedger };

struct ContinuousOptions {
  long long max_events = 1'000'000'000;
  bool log_events = false;
  ContinuousMode mode = ContinuousMode::kEffectiveOnly;
};

Outcome run_continuous(const EvolutionaryGraph& g, double r,
                       const InitialPolicy& initial, Rng& rng,
                       const ContinuousOptions& opt = {});

struct LocalTimes {
  double t_mutant = 0.0;
  double t_nonmutant = 0.0;
};

// Local times of vertex v up to time t, reconstructed from a timed event log.
// Throws std::out_of_range if t exceeds the logged horizon.
LocalTimes local_times(const EventLog& log, int v, double t);

}  // namespace evograph::dynamics

#endif
