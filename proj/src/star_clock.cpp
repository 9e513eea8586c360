#include "evograph/star_clock.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace evograph::dynamics {

namespace {

struct Stream {
  int source = 0;
  int target = 0;
  StarStream kind = StarStream::kMutStar;
  double rate = 0.0;
  double next_local = 0.0;  // local time of the pending trigger
};

}  // namespace

StarClockRun star_clock_coupled_run(const EvolutionaryGraph& g, double r,
                                    const InitialPolicy& initial, Rng& rng,
                                    const StarClockOptions& opt) {
  if (!(r > 0.0)) throw std::invalid_argument("fitness must be positive");
  int n = g.n();
  MutantState st(n, r, initial.draw(n, rng));

  StarClockRun run;
  run.ledger.n = n;
  run.ledger.initial = st.mutants();
  if (opt.log_events) {
    run.outcome.event_log = EventLog{};
    run.outcome.event_log->n = n;
    run.outcome.event_log->initial = run.ledger.initial;
  }

  // four streams per edge, pending triggers drawn lazily
  std::vector<Stream> streams;
  streams.reserve(4 * g.edge_count());
  for (int u = 0; u < n; ++u) {
    for (int i = 0; i < g.out_degree(u); ++i) {
      int v = g.target(u, i);
      double w = g.weight(u, i);
      for (StarStream k : {StarStream::kMutStar, StarStream::kNonBarStar,
                           StarStream::kNonStar, StarStream::kMutBarStar}) {
        double rate = physical_kind(k) == SpawnKind::kMutant ? r * w : w;
        Stream s{u, v, k, rate, 0.0};
        s.next_local = rng.exponential(rate);
        streams.push_back(s);
      }
    }
  }

  std::vector<double> t_mut(n, 0.0), t_non(n, 0.0);
  double t = 0.0;
  long long events = 0;

  while (!st.absorbed() && events < opt.max_events) {
    // a stream is running iff its local-time axis matches its source's parity
    double best_wait = std::numeric_limits<double>::infinity();
    int best = -1;
    for (int i = 0; i < static_cast<int>(streams.size()); ++i) {
      const Stream& s = streams[i];
      bool mutant_axis = runs_on_mutant_time(s.kind);
      if (mutant_axis != st.is_mutant(s.source)) continue;
      double axis = mutant_axis ? t_mut[s.source] : t_non[s.source];
      double wait = s.next_local - axis;
      if (wait < best_wait) {
        best_wait = wait;
        best = i;
      }
    }
    if (best < 0) throw std::logic_error("no star-clock is running");

    // advance global and local times to the trigger
    t += best_wait;
    for (int u = 0; u < n; ++u) {
      if (st.is_mutant(u))
        t_mut[u] += best_wait;
      else
        t_non[u] += best_wait;
    }

    Stream& s = streams[best];
    StarTrigger trig;
    trig.t = t;
    trig.source = s.source;
    trig.target = s.target;
    trig.stream = s.kind;
    trig.local_time = s.next_local;
    trig.source_was_mutant = st.is_mutant(s.source);
    s.next_local += rng.exponential(s.rate);

    // project onto the Moran process
    SpawnKind kind = physical_kind(s.kind);
    bool parity = (kind == SpawnKind::kMutant) == trig.source_was_mutant;
    if (parity) {
      if (kind == SpawnKind::kMutant) {
        if (!st.is_mutant(trig.target)) {
          st.make_mutant(trig.target);
          trig.effect = Effect::kGain;
        }
      } else {
        if (st.is_mutant(trig.target)) {
          st.make_nonmutant(trig.target);
          trig.effect = Effect::kLoss;
        }
      }
      ++run.outcome.steps;
    }
    ++events;

    run.ledger.triggers.push_back(trig);
    if (run.outcome.event_log)
      run.outcome.event_log->events.push_back(
          {t, trig.source, trig.target, kind, trig.effect});
  }

  run.outcome.result =
      st.absorbed() ? (st.fixated() ? Result::kFixation : Result::kExtinction)
                    : Result::kCensored;
  run.outcome.final_time = t;
  if (run.outcome.event_log) run.outcome.event_log->final_time = t;
  return run;
}

bool check_observation_one(const StarClockLedger& ledger, double tol,
                           std::string* why) {
  int n = ledger.n;
  std::vector<char> mutant(n, 0);
  for (int v : ledger.initial) mutant[v] = 1;
  std::vector<double> t_mut(n, 0.0), t_non(n, 0.0);
  double prev_t = 0.0;

  auto fail = [&](const StarTrigger& trig, const char* reason) {
    if (why) {
      *why = std::string(reason) + " at t=" + std::to_string(trig.t) +
             " edge (" + std::to_string(trig.source) + "," +
             std::to_string(trig.target) + ")";
    }
    return false;
  };

  for (const StarTrigger& trig : ledger.triggers) {
    double dt = trig.t - prev_t;
    if (dt < -tol) return fail(trig, "triggers out of order");
    for (int u = 0; u < n; ++u) {
      if (mutant[u])
        t_mut[u] += dt;
      else
        t_non[u] += dt;
    }
    prev_t = trig.t;

    int u = trig.source;
    if (static_cast<bool>(mutant[u]) != trig.source_was_mutant)
      return fail(trig, "recorded source parity disagrees with the replay");

    // which stream was allowed to drive this physical clock, and at which
    // local time it must have triggered
    SpawnKind kind = physical_kind(trig.stream);
    StarStream expected;
    double local;
    if (kind == SpawnKind::kMutant) {
      expected = mutant[u] ? StarStream::kMutStar : StarStream::kMutBarStar;
      local = mutant[u] ? t_mut[u] : t_non[u];
    } else {
      expected = mutant[u] ? StarStream::kNonBarStar : StarStream::kNonStar;
      local = mutant[u] ? t_mut[u] : t_non[u];
    }
    if (trig.stream != expected)
      return fail(trig, "physical clock driven by a paused star-clock");
    double scale = std::max(1.0, std::fabs(local));
    if (std::fabs(trig.local_time - local) > tol * scale)
      return fail(trig, "star-clock local trigger time disagrees with the "
                        "source's local time");

    // replay the projected process
    bool parity = (kind == SpawnKind::kMutant) == static_cast<bool>(mutant[u]);
    Effect expect_eff = Effect::kNone;
    if (parity) {
      if (kind == SpawnKind::kMutant && !mutant[trig.target])
        expect_eff = Effect::kGain;
      if (kind == SpawnKind::kNonMutant && mutant[trig.target])
        expect_eff = Effect::kLoss;
    }
    if (expect_eff != trig.effect)
      return fail(trig, "ledger effect disagrees with the replayed process");
    if (trig.effect == Effect::kGain) mutant[trig.target] = 1;
    if (trig.effect == Effect::kLoss) mutant[trig.target] = 0;
  }
  return true;
}

}  // namespace evograph::dynamics
