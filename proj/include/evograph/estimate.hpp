#ifndef EVOGRAPH_ESTIMATE_HPP
#define EVOGRAPH_ESTIMATE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "evograph/dynamics.hpp"
#include "evograph/graph.hpp"
#include "evograph/stats.hpp"

namespace evograph::estimate {

// Raised when every trial was censored and no point estimate exists.
class EstimateUnavailable : public std::runtime_error {
 public:
  EstimateUnavailable(const std::string& what, long long censored)
      : std::runtime_error(what), censored_trials(censored) {}
  long long censored_trials = 0;
};

struct FixationEstimate {
  long long trials = 0;
  long long fixations = 0;
  long long extinctions = 0;
  long long censored = 0;
  double point = 0.0;       // fixations / (fixations + extinctions)
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double level = 0.95;
  double mean_steps = 0.0;  // over non-censored trials
  uint64_t master_seed = 0;

  double extinction_point() const { return 1.0 - point; }
};

enum class Engine {
  kAuto,        // star-lumped when the graph is structurally a star
  kDiscrete,    // per-event discrete chain
  kStarLumped,  // exact two-variable reduction for stars
  kContinuous,  // effective-only continuous engine (same jump chain)
};

struct EstimateOptions {
  long long trials = 10000;
  uint64_t master_seed = 0;
  long long max_steps = 1'000'000'000;
  int workers = 0;  // 0 = hardware concurrency
  double ci_level = 0.95;
  Engine engine = Engine::kAuto;
  // optional per-trial results, indexed by trial: 0 ext / 1 fix / 2 censored
  std::vector<uint8_t>* per_trial = nullptr;
};

// Independent trials of the Moran process; per-trial RNG streams are seeded
// from (master_seed, trial_index), so tallies are bit-identical for any
// worker count. Deterministic policies (fixed full/empty sets) yield
// degenerate confidence intervals.
FixationEstimate estimate_fixation(const EvolutionaryGraph& g, double r,
                                   const dynamics::InitialPolicy& policy,
                                   const EstimateOptions& opt);

// Wilson score interval; exposed as the module-level CI primitive.
inline std::pair<double, double> wilson_ci(long long successes, long long trials,
                                           double level) {
  return stats::wilson_ci(successes, trials, level);
}

// True when g is a star embedded the standard way: vertex 0 points to every
// other vertex with equal weights and every other vertex points only to 0.
bool is_star_shaped(const EvolutionaryGraph& g);

// JSON per the result schema; `graph_desc` is the graph/params object.
std::string estimate_to_json(const FixationEstimate& e,
                             const std::string& graph_desc, double r,
                             const std::string& policy);
std::string estimate_csv_header();
std::string estimate_to_csv(const FixationEstimate& e,
                            const std::string& graph_desc, double r,
                            const std::string& policy);

std::string policy_to_string(const dynamics::InitialPolicy& p);

}  // namespace evograph::estimate

#endif
