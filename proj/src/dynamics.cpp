#include "evograph/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace evograph::dynamics {

MutantState::MutantState(int n, double r) : n_(n), r_(r) {
  if (n < 1) throw std::invalid_argument("state needs at least one vertex");
  if (!(r > 0.0)) throw std::invalid_argument("fitness must be positive");
  order_.resize(n);
  pos_.resize(n);
  std::iota(order_.begin(), order_.end(), 0);
  std::iota(pos_.begin(), pos_.end(), 0);
  total_fitness_ = static_cast<double>(n);
}

MutantState::MutantState(int n, double r, const std::vector<int>& mutants)
    : MutantState(n, r) {
  for (int v : mutants) {
    if (v < 0 || v >= n) throw std::invalid_argument("mutant vertex out of range");
    make_mutant(v);
  }
}

void MutantState::make_mutant(int v) {
  int p = pos_[v];
  if (p < count_) return;
  int q = count_;
  int w = order_[q];
  std::swap(order_[p], order_[q]);
  pos_[v] = q;
  pos_[w] = p;
  ++count_;
  total_fitness_ += r_ - 1.0;
}

void MutantState::make_nonmutant(int v) {
  int p = pos_[v];
  if (p >= count_) return;
  int q = count_ - 1;
  int w = order_[q];
  std::swap(order_[p], order_[q]);
  pos_[v] = q;
  pos_[w] = p;
  --count_;
  total_fitness_ -= r_ - 1.0;
}

std::vector<int> MutantState::mutants() const {
  std::vector<int> out(order_.begin(), order_.begin() + count_);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> InitialPolicy::draw(int n, Rng& rng) const {
  switch (kind) {
    case kUniformSingleton:
      return {static_cast<int>(rng.uniform_index(n))};
    case kFixedVertex:
      if (vertex < 0 || vertex >= n)
        throw std::invalid_argument("initial vertex out of range");
      return {vertex};
    case kFixedSet:
      return set;
  }
  return {};
}

bool InitialPolicy::deterministic_outcome(int n) const {
  if (kind != kFixedSet) return false;
  if (set.empty()) return true;
  std::vector<char> seen(n, 0);
  int distinct = 0;
  for (int v : set)
    if (v >= 0 && v < n && !seen[v]) {
      seen[v] = 1;
      ++distinct;
    }
  return distinct == n;
}

namespace {

// offspring target of u: uniform among out-neighbours when the weights are
// uniform, otherwise a cumulative search
int sample_target(const EvolutionaryGraph& g, int u, Rng& rng) {
  int deg = g.out_degree(u);
  if (g.uniform_out(u)) return g.target(u, static_cast<int>(rng.uniform_index(deg)));
  double x = rng.uniform01();
  double acc = 0.0;
  for (int i = 0; i < deg; ++i) {
    acc += g.weight(u, i);
    if (x < acc) return g.target(u, i);
  }
  return g.target(u, deg - 1);
}

int sample_reproducer(const MutantState& st, Rng& rng) {
  int m = st.mutant_count();
  double w_mut = st.r() * m;
  if (rng.uniform01() * st.total_fitness() < w_mut)
    return st.mutant_at(static_cast<int>(rng.uniform_index(m)));
  return st.nonmutant_at(static_cast<int>(rng.uniform_index(st.n() - m)));
}

Effect apply_spawn(MutantState& st, int v, SpawnKind kind) {
  if (kind == SpawnKind::kMutant) {
    if (st.is_mutant(v)) return Effect::kNone;
    st.make_mutant(v);
    return Effect::kGain;
  }
  if (!st.is_mutant(v)) return Effect::kNone;
  st.make_nonmutant(v);
  return Effect::kLoss;
}

}  // namespace

Event discrete_step(const EvolutionaryGraph& g, MutantState& state, Rng& rng) {
  if (state.absorbed())
    throw std::logic_error("discrete_step called on an absorbed state");
  int u = sample_reproducer(state, rng);
  int v = sample_target(g, u, rng);
  SpawnKind kind = state.is_mutant(u) ? SpawnKind::kMutant : SpawnKind::kNonMutant;
  Effect eff = apply_spawn(state, v, kind);
  return Event{0.0, u, v, kind, eff};
}

Outcome run_to_absorption(const EvolutionaryGraph& g, double r,
                          const InitialPolicy& initial, Rng& rng,
                          const RunOptions& opt) {
  if (opt.max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
  MutantState st(g.n(), r, initial.draw(g.n(), rng));

  Outcome out;
  if (opt.log_events) {
    out.event_log = EventLog{};
    out.event_log->n = g.n();
    out.event_log->initial = st.mutants();
  }

  while (!st.absorbed() && out.steps < opt.max_steps) {
    Event e = discrete_step(g, st, rng);
    e.time = static_cast<double>(out.steps);
    ++out.steps;
    if (out.event_log) out.event_log->events.push_back(e);
  }

  out.result = st.absorbed()
                   ? (st.fixated() ? Result::kFixation : Result::kExtinction)
                   : Result::kCensored;
  out.final_time = static_cast<double>(out.steps);
  if (out.event_log) out.event_log->final_time = out.final_time;
  return out;
}

Outcome run_continuous(const EvolutionaryGraph& g, double r,
                       const InitialPolicy& initial, Rng& rng,
                       const ContinuousOptions& opt) {
  if (opt.max_events < 1) throw std::invalid_argument("max_events must be >= 1");
  MutantState st(g.n(), r, initial.draw(g.n(), rng));
  int n = g.n();

  Outcome out;
  if (opt.log_events) {
    out.event_log = EventLog{};
    out.event_log->n = n;
    out.event_log->initial = st.mutants();
  }

  double t = 0.0;
  long long events = 0;
  while (!st.absorbed() && events < opt.max_events) {
    int u;
    SpawnKind kind;
    if (opt.mode == ContinuousMode::kEffectiveOnly) {
      // only parity-matching clocks can change the state; their total rate is
      // W = r*M + (n-M)
      t += rng.exponential(st.total_fitness());
      u = sample_reproducer(st, rng);
      kind = st.is_mutant(u) ? SpawnKind::kMutant : SpawnKind::kNonMutant;
    } else {
      // every clock stream: per-vertex trigger rate is r+1 regardless of state
      t += rng.exponential(static_cast<double>(n) * (r + 1.0));
      u = static_cast<int>(rng.uniform_index(n));
      kind = rng.uniform01() * (r + 1.0) < r ? SpawnKind::kMutant
                                             : SpawnKind::kNonMutant;
    }
    int v = sample_target(g, u, rng);

    Effect eff;
    bool parity = (kind == SpawnKind::kMutant) == st.is_mutant(u);
    if (parity) {
      eff = apply_spawn(st, v, kind);
      ++out.steps;
    } else {
      eff = Effect::kNone;  // mismatched clock: trigger recorded, state unchanged
    }
    ++events;
    if (out.event_log) out.event_log->events.push_back({t, u, v, kind, eff});
  }

  out.result = st.absorbed()
                   ? (st.fixated() ? Result::kFixation : Result::kExtinction)
                   : Result::kCensored;
  out.final_time = t;
  if (out.event_log) out.event_log->final_time = t;
  return out;
}

LocalTimes local_times(const EventLog& log, int v, double t) {
  if (v < 0 || v >= log.n) throw std::invalid_argument("vertex out of range");
  if (t < 0.0 || t > log.final_time)
    throw std::out_of_range("query time outside the logged horizon");

  bool mutant = std::find(log.initial.begin(), log.initial.end(), v) !=
                log.initial.end();
  LocalTimes lt;
  double prev = 0.0;
  for (const Event& e : log.events) {
    double upto = std::min(e.time, t);
    if (upto > prev) {
      (mutant ? lt.t_mutant : lt.t_nonmutant) += upto - prev;
      prev = upto;
    }
    if (e.time > t) break;
    if (e.target == v) {
      if (e.effect == Effect::kGain) mutant = true;
      else if (e.effect == Effect::kLoss) mutant = false;
    }
  }
  if (t > prev) (mutant ? lt.t_mutant : lt.t_nonmutant) += t - prev;
  return lt;
}

}  // namespace evograph::dynamics
