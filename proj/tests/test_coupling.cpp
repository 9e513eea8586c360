#include <doctest.h>

#include <cmath>

#include "evograph/exact.hpp"
#include "evograph/star_clock.hpp"
#include "evograph/stats.hpp"

using namespace evograph;
using namespace evograph::dynamics;

TEST_CASE("star-clock run projects to a valid Moran trajectory") {
  auto g = make_complete(2);
  Rng rng(11);
  auto run = star_clock_coupled_run(g, 2.0, InitialPolicy::at(0), rng);
  CHECK(run.outcome.result != Result::kCensored);
  CHECK(run.ledger.n == 2);
  CHECK(run.ledger.initial == std::vector<int>{0});
  CHECK_FALSE(run.ledger.triggers.empty());

  std::string why;
  CHECK(check_observation_one(run.ledger, 1e-7, &why));
}

TEST_CASE("first effective event law on K_2 through the coupling") {
  // from {0} with r=2 the first effective event raises the count w.p. 2/3
  auto g = make_complete(2);
  long long up = 0;
  const long long trials = 100000;
  for (long long i = 0; i < trials; ++i) {
    Rng rng(trial_seed(515, i));
    auto run = star_clock_coupled_run(g, 2.0, InitialPolicy::at(0), rng);
    for (const auto& trig : run.ledger.triggers) {
      if (trig.effect == Effect::kNone) continue;
      if (trig.effect == Effect::kGain) ++up;
      break;
    }
  }
  double phat = static_cast<double>(up) / trials;
  double sigma = std::sqrt((2.0 / 3.0) / 3.0 / trials);
  CHECK(std::fabs(phat - 2.0 / 3.0) < 3.5 * sigma);
}

TEST_CASE("coupled fixation frequency matches the exact value on K_3") {
  auto g = make_complete(3);
  long long fix = 0;
  const long long trials = 30000;
  for (long long i = 0; i < trials; ++i) {
    Rng rng(trial_seed(525, i));
    auto run = star_clock_coupled_run(g, 2.0, InitialPolicy::uniform(), rng);
    if (run.outcome.fixated()) ++fix;
  }
  double expect = exact::rho_reg(2.0, 3);
  double phat = static_cast<double>(fix) / trials;
  double sigma = std::sqrt(expect * (1.0 - expect) / trials);
  CHECK(std::fabs(phat - expect) < 3.5 * sigma);
}

TEST_CASE("observation holds on every trigger across many runs") {
  auto g = make_star(3);
  std::string why;
  long long triggers = 0;
  for (long long i = 0; i < 2000; ++i) {
    Rng rng(trial_seed(535, i));
    auto run = star_clock_coupled_run(g, 2.0, InitialPolicy::uniform(), rng);
    REQUIRE_MESSAGE(check_observation_one(run.ledger, 1e-7, &why), why);
    triggers += static_cast<long long>(run.ledger.triggers.size());
  }
  CHECK(triggers > 10000);
}

TEST_CASE("a vertex that is never a mutant contributes no mutant spawns") {
  auto g = make_star(3);
  for (long long i = 0; i < 500; ++i) {
    Rng rng(trial_seed(545, i));
    auto run = star_clock_coupled_run(g, 2.0, InitialPolicy::at(1), rng);
    if (run.outcome.result != Result::kExtinction) continue;

    // replay to find vertices that were never mutants
    std::vector<char> ever(g.n(), 0);
    for (int v : run.ledger.initial) ever[v] = 1;
    for (const auto& trig : run.ledger.triggers)
      if (trig.effect == Effect::kGain) ever[trig.target] = 1;

    for (const auto& trig : run.ledger.triggers) {
      if (ever[trig.source]) continue;
      // never-mutant source: its mutant-parity star-clocks never run
      CHECK(trig.stream != StarStream::kMutStar);
      CHECK(trig.stream != StarStream::kNonBarStar);
      bool counted_spawn = trig.stream == StarStream::kMutBarStar &&
                           trig.effect != Effect::kNone;
      CHECK_FALSE(counted_spawn);
    }
  }
}

TEST_CASE("ledger tampering is detected") {
  auto g = make_complete(3);
  Rng rng(21);
  auto run = star_clock_coupled_run(g, 2.0, InitialPolicy::at(0), rng);
  REQUIRE(run.ledger.triggers.size() >= 2);

  auto broken = run.ledger;
  broken.triggers[1].local_time += 0.5;
  CHECK_FALSE(check_observation_one(broken));

  auto swapped = run.ledger;
  swapped.triggers[0].source_was_mutant = !swapped.triggers[0].source_was_mutant;
  CHECK_FALSE(check_observation_one(swapped));
}
