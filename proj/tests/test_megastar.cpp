#include <doctest.h>

#include <cmath>

#include "evograph/exact.hpp"
#include "evograph/megastar.hpp"

using namespace evograph;
using namespace evograph::dynamics;

namespace {

// vertex ids in make_megastar's layout: branch i (1-based) occupies
// [1 + (i-1)(m+1+k), ...): m reservoirs, feeder, k clique vertices
struct Layout {
  long long k, l, m;
  int reservoir(int branch, int s) const {
    return 1 + (branch - 1) * (m + 1 + k) + s;
  }
  int feeder(int branch) const { return 1 + (branch - 1) * (m + 1 + k) + m; }
  int clique(int branch, int s) const { return feeder(branch) + 1 + s; }
};

}  // namespace

TEST_CASE("megastar process rejects non-megastar graphs") {
  auto star = make_star(4);
  CHECK_THROWS_AS(MegastarProcess(star, 2.0, {1}), std::invalid_argument);
  auto super = make_superstar(2, 2, 2);
  CHECK_THROWS_AS(MegastarProcess(super, 2.0, {1}), std::invalid_argument);
}

TEST_CASE("feeder spawning into an empty clique is demoted") {
  Layout lay{3, 2, 4};
  auto g = make_megastar(lay.k, lay.l, lay.m);
  int a1 = lay.feeder(1);
  int c10 = lay.clique(1, 0);

  MegastarProcess proc(g, 2.0, {a1});
  REQUIRE(proc.state().is_mutant(a1));
  REQUIRE(proc.clique_mutants(1) == 0);

  Effect eff = proc.apply_trigger(a1, SpawnKind::kMutant, c10);
  CHECK(eff == Effect::kGain);
  CHECK(proc.state().is_mutant(c10));
  CHECK_FALSE(proc.state().is_mutant(a1));  // demoted by the same trigger
  CHECK(proc.clique_mutants(1) == 1);
}

TEST_CASE("feeder spawn into an occupied clique does nothing") {
  Layout lay{3, 2, 4};
  auto g = make_megastar(lay.k, lay.l, lay.m);
  int a1 = lay.feeder(1);
  int c10 = lay.clique(1, 0);
  int c11 = lay.clique(1, 1);

  MegastarProcess proc(g, 2.0, {a1, c10});
  Effect eff = proc.apply_trigger(a1, SpawnKind::kMutant, c11);
  CHECK(eff == Effect::kNone);
  CHECK_FALSE(proc.state().is_mutant(c11));
  CHECK(proc.state().is_mutant(a1));
}

TEST_CASE("reservoir spawn onto the feeder requires an inactive clique") {
  Layout lay{3, 2, 4};
  auto g = make_megastar(lay.k, lay.l, lay.m);
  int r0 = lay.reservoir(1, 0);
  int a1 = lay.feeder(1);

  // active clique: no change
  MegastarProcess active(g, 2.0, {r0, lay.clique(1, 0)});
  CHECK(active.clique_active(1));
  CHECK(active.apply_trigger(r0, SpawnKind::kMutant, a1) == Effect::kNone);
  CHECK_FALSE(active.state().is_mutant(a1));

  // empty clique: the feeder becomes a mutant
  MegastarProcess empty(g, 2.0, {r0});
  CHECK(empty.apply_trigger(r0, SpawnKind::kMutant, a1) == Effect::kGain);
  CHECK(empty.state().is_mutant(a1));

  // full clique: also allowed
  std::vector<int> full = {r0};
  for (int s = 0; s < lay.k; ++s) full.push_back(lay.clique(1, s));
  MegastarProcess fullp(g, 2.0, full);
  CHECK_FALSE(fullp.clique_active(1));
  CHECK(fullp.apply_trigger(r0, SpawnKind::kMutant, a1) == Effect::kGain);
}

TEST_CASE("non-mutant spawns always remove the target") {
  Layout lay{3, 2, 4};
  auto g = make_megastar(lay.k, lay.l, lay.m);
  int r0 = lay.reservoir(1, 0);

  MegastarProcess proc(g, 2.0, {r0});
  CHECK(proc.apply_trigger(0, SpawnKind::kNonMutant, r0) == Effect::kLoss);
  CHECK_FALSE(proc.state().is_mutant(r0));
  CHECK(proc.absorbed());
}

TEST_CASE("parity-mismatched triggers leave the state unchanged") {
  Layout lay{3, 2, 4};
  auto g = make_megastar(lay.k, lay.l, lay.m);
  int r0 = lay.reservoir(1, 0);
  MegastarProcess proc(g, 2.0, {r0});
  // vertex 0 is a non-mutant; its mutant clock trigger does nothing
  CHECK(proc.apply_trigger(0, SpawnKind::kMutant, r0) == Effect::kNone);
  // r0 is a mutant; its non-mutant clock trigger does nothing
  CHECK(proc.apply_trigger(r0, SpawnKind::kNonMutant, lay.feeder(1)) ==
        Effect::kNone);
}

TEST_CASE("active cliques force their feeder to stay a non-mutant") {
  auto g = make_megastar(3, 2, 3);
  for (long long trial = 0; trial < 300; ++trial) {
    Rng rng(trial_seed(660, trial));
    std::vector<int> init = InitialPolicy::uniform().draw(g.n(), rng);
    MegastarProcess proc(g, 2.0, init);
    long long guard = 0;
    while (!proc.absorbed() && guard++ < 100000) {
      megastar_step(g, proc, rng);
      for (int j = 1; j <= proc.branches(); ++j) {
        if (proc.clique_active(j)) {
          Layout lay{3, 2, 3};
          CHECK_FALSE(proc.state().is_mutant(lay.feeder(j)));
        }
      }
    }
  }
}

TEST_CASE("megastar_step on an absorbed state throws") {
  auto g = make_megastar(2, 1, 2);
  Rng rng(1);
  MegastarProcess proc(g, 2.0, {});
  CHECK(proc.absorbed());
  CHECK_THROWS_AS(megastar_step(g, proc, rng), std::logic_error);
}

TEST_CASE("coupled domination holds and fixation is inherited") {
  auto g = make_megastar(2, 2, 3);
  long long mega_fix = 0, moran_fix = 0;
  for (long long i = 0; i < 500; ++i) {
    Rng rng(trial_seed(670, i));
    auto res = coupled_domination_run(g, 2.0, InitialPolicy::uniform(), rng);
    CHECK(res.domination_held);
    if (res.megastar.fixated()) {
      ++mega_fix;
      CHECK(res.moran.fixated());
    }
    if (res.moran.fixated()) ++moran_fix;
  }
  CHECK(mega_fix <= moran_fix);
  CHECK(moran_fix > 0);
}

TEST_CASE("empty initial set absorbs both processes immediately") {
  auto g = make_megastar(3, 2, 4);
  Rng rng(2);
  auto res =
      coupled_domination_run(g, 2.0, InitialPolicy::fixed({}), rng, 1000);
  CHECK(res.domination_held);
  CHECK(res.moran.result == Result::kExtinction);
  CHECK(res.megastar.result == Result::kExtinction);
}

TEST_CASE("active-clique jump frequencies follow the transition matrix") {
  const long long k = 4;
  auto g = make_megastar(k, 2, 3);
  auto P = exact::clique_jump_matrix(2.0, k);

  std::vector<long long> ups(k, 0), downs(k, 0);
  long long total = 0;
  uint64_t trial = 0;
  while (total < 20000) {
    Rng rng(trial_seed(680, trial++));
    std::vector<int> init = InitialPolicy::uniform().draw(g.n(), rng);
    MegastarProcess proc(g, 2.0, init);
    long long guard = 0;
    while (!proc.absorbed() && guard++ < 1000000) {
      int before[3] = {0, proc.clique_mutants(1), proc.clique_mutants(2)};
      megastar_step(g, proc, rng);
      for (int j = 1; j <= 2; ++j) {
        int y0 = before[j], y1 = proc.clique_mutants(j);
        if (y1 != y0 && y0 >= 1 && y0 <= k - 1) {
          (y1 > y0 ? ups : downs)[y0]++;
          ++total;
        }
      }
    }
  }
  for (long long i = 1; i < k; ++i) {
    long long n_i = ups[i] + downs[i];
    if (n_i < 200) continue;
    double phat = static_cast<double>(ups[i]) / n_i;
    double p = P[i][i + 1];
    CHECK(std::fabs(phat - p) < 3.5 * std::sqrt(p * (1 - p) / n_i));
  }
}
