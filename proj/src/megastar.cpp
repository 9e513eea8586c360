#include "evograph/megastar.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace evograph::dynamics {

namespace {

// parses "role(j)" labels produced by make_megastar
bool parse_branch(const std::string& label, const char* role, int* branch) {
  size_t rl = std::string(role).size();
  if (label.size() < rl + 3 || label.compare(0, rl, role) != 0 ||
      label[rl] != '(' || label.back() != ')')
    return false;
  *branch = std::stoi(label.substr(rl + 1, label.size() - rl - 2));
  return true;
}

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

}  // namespace

MegastarProcess::MegastarProcess(const EvolutionaryGraph& g, double r,
                                 const std::vector<int>& initial)
    : g_(&g), state_(g.n(), r) {
  int n = g.n();
  role_.assign(n, Role::kCentre);
  branch_.assign(n, 0);
  long long max_branch = 0;
  long long reservoirs = 0, feeders = 0, cliquers = 0;
  if (n < 1 || g.label(0) != "centre")
    throw std::invalid_argument("megastar process needs a make_megastar graph");
  for (int v = 1; v < n; ++v) {
    int j = 0;
    if (parse_branch(g.label(v), "reservoir", &j)) {
      role_[v] = Role::kReservoir;
      ++reservoirs;
    } else if (parse_branch(g.label(v), "feeder", &j)) {
      role_[v] = Role::kFeeder;
      ++feeders;
    } else if (parse_branch(g.label(v), "clique", &j)) {
      role_[v] = Role::kClique;
      ++cliquers;
    } else {
      throw std::invalid_argument("megastar process needs a make_megastar graph");
    }
    branch_[v] = j;
    max_branch = std::max<long long>(max_branch, j);
  }
  l_ = max_branch;
  if (l_ < 1 || feeders != l_ || reservoirs % l_ != 0 || cliquers % l_ != 0 ||
      reservoirs == 0 || cliquers == 0)
    throw std::invalid_argument("megastar process needs a make_megastar graph");
  m_ = reservoirs / l_;
  k_ = cliquers / l_;
  if (n != 1 + l_ * (m_ + 1 + k_))
    throw std::invalid_argument("megastar process needs a make_megastar graph");

  clique_count_.assign(l_ + 1, 0);
  for (int v : initial) set_mutant(v, true);
}

void MegastarProcess::set_mutant(int v, bool mutant) {
  if (state_.is_mutant(v) == mutant) return;
  if (mutant)
    state_.make_mutant(v);
  else
    state_.make_nonmutant(v);
  if (role_[v] == Role::kClique) clique_count_[branch_[v]] += mutant ? 1 : -1;
}

Effect MegastarProcess::apply_trigger(int u, SpawnKind kind, int v) {
  if (kind == SpawnKind::kNonMutant) {
    // (iv): a non-mutant source overwrites the target
    if (state_.is_mutant(u)) return Effect::kNone;
    if (!state_.is_mutant(v)) return Effect::kNone;
    set_mutant(v, false);
    return Effect::kLoss;
  }

  if (!state_.is_mutant(u)) return Effect::kNone;

  if (role_[u] == Role::kFeeder) {
    // (ii): a_j spawns into its clique only while the clique is empty, and
    // doing so demotes a_j
    int j = branch_[u];
    if (clique_count_[j] != 0) return Effect::kNone;
    set_mutant(v, true);
    set_mutant(u, false);
    return Effect::kGain;
  }
  if (role_[v] == Role::kFeeder) {
    // (iii): a_j can become a mutant only while K_j is inactive
    int j = branch_[v];
    if (clique_count_[j] != 0 && clique_count_[j] != k_) return Effect::kNone;
    if (state_.is_mutant(v)) return Effect::kNone;
    set_mutant(v, true);
    return Effect::kGain;
  }
  // (i): ordinary mutant spawn away from feeders
  if (state_.is_mutant(v)) return Effect::kNone;
  set_mutant(v, true);
  return Effect::kGain;
}

Event megastar_step(const EvolutionaryGraph& g, MegastarProcess& proc, Rng& rng) {
  if (proc.absorbed())
    throw std::logic_error("megastar_step called on an absorbed state");
  const MutantState& st = proc.state();
  int m = st.mutant_count();
  int u;
  if (rng.uniform01() * st.total_fitness() < st.r() * m)
    u = st.mutant_at(static_cast<int>(rng.uniform_index(m)));
  else
    u = st.nonmutant_at(static_cast<int>(rng.uniform_index(st.n() - m)));
  int v = sample_target(g, u, rng);
  SpawnKind kind = st.is_mutant(u) ? SpawnKind::kMutant : SpawnKind::kNonMutant;
  Effect eff = proc.apply_trigger(u, kind, v);
  return Event{0.0, u, v, kind, eff};
}

CoupledDominationResult coupled_domination_run(const EvolutionaryGraph& g,
                                               double r,
                                               const InitialPolicy& initial,
                                               Rng& rng, long long max_events) {
  int n = g.n();
  std::vector<int> init = initial.draw(n, rng);
  MutantState moran(n, r, init);
  MegastarProcess mega(g, r, init);

  CoupledDominationResult res;
  double t = 0.0;
  long long events = 0;
  double total_rate = static_cast<double>(n) * (r + 1.0);

  auto subset_ok = [&]() {
    for (int v = 0; v < n; ++v)
      if (mega.state().is_mutant(v) && !moran.is_mutant(v)) return false;
    return true;
  };

  while ((!moran.absorbed() || !mega.absorbed()) && events < max_events) {
    // shared trigger from the full clock process: each vertex triggers at
    // rate r+1, mutant kind with probability r/(r+1)
    t += rng.exponential(total_rate);
    int u = static_cast<int>(rng.uniform_index(n));
    SpawnKind kind = rng.uniform01() * (r + 1.0) < r ? SpawnKind::kMutant
                                                     : SpawnKind::kNonMutant;
    int v = sample_target(g, u, rng);

    bool moran_parity = (kind == SpawnKind::kMutant) == moran.is_mutant(u);
    if (moran_parity && !moran.absorbed()) {
      if (kind == SpawnKind::kMutant)
        moran.make_mutant(v);
      else
        moran.make_nonmutant(v);
      ++res.moran.steps;
    }
    bool mega_parity = (kind == SpawnKind::kMutant) == mega.state().is_mutant(u);
    if (!mega.absorbed()) {
      Effect eff = mega.apply_trigger(u, kind, v);
      if (mega_parity) ++res.megastar.steps;
      // domination can only break where X' just gained a vertex
      if (eff == Effect::kGain && !moran.is_mutant(v)) res.domination_held = false;
    }
    if ((events & 0xfff) == 0 && !subset_ok()) res.domination_held = false;
    ++events;
  }
  if (!subset_ok()) res.domination_held = false;

  auto finish = [&](Outcome& o, bool absorbed, bool fixated) {
    o.result = absorbed ? (fixated ? Result::kFixation : Result::kExtinction)
                        : Result::kCensored;
    o.final_time = t;
  };
  finish(res.moran, moran.absorbed(), moran.fixated());
  finish(res.megastar, mega.absorbed(), mega.fixated());
  return res;
}

}  // namespace evograph::dynamics
