#pragma once

#include <array>
#include <cstdint>

#include "qit/measurement.hpp"
#include "qit/qmath.hpp"
#include "qit/random.hpp"

namespace qit::localrealism {

using measurement::Direction;

// Deterministic local assignment: each party fixes an outcome per setting
// before any measurement happens.
struct LocalStrategy {
  int alice_a;
  int alice_a_prime;
  int bob_b;
  int bob_b_prime;

  LocalStrategy(int alice_a, int alice_a_prime, int bob_b, int bob_b_prime);
};

// S = a*b + a*b' + a'*b - a'*b', evaluated in integer arithmetic.
double strategy_chsh(const LocalStrategy& s);

std::array<LocalStrategy, 16> all_deterministic_strategies();

// max |S| over all 16 deterministic strategies; exactly 2.
double lhv_bound();

struct ChshAngles {
  Direction a;
  Direction a_prime;
  Direction b;
  Direction b_prime;
};

// Planar settings maximizing S on the (|01>+|10>)/sqrt(2) state, certified
// by the grid-search oracle in the test suite rather than trusted here.
ChshAngles optimal_epr_angles();

// S from exact correlators on a two-system state.
double quantum_chsh_ideal(const StateVector& s, const ChshAngles& dirs);

enum class MeasureOrder { alice_first, bob_first };

struct ChshStats {
  // counts[pair][cell]: pair = 2 * alice_setting + bob_setting (0 = unprimed),
  // cell = 2 * (alice outcome < 0) + (bob outcome < 0).
  std::array<std::array<std::int64_t, 4>, 4> counts{};
  std::array<double, 4> correlators{};  // E(a,b), E(a,b'), E(a',b), E(a',b')
  double s_value = 0;
  double std_error = 0;  // per-correlator binomial errors combined in quadrature
  std::int64_t n_trials = 0;
};

// Sampled CHSH experiment. Settings and outcomes use separate derived
// streams, each further split per trial, so any partition of trials across
// jobs reproduces the sequential run bit for bit.
ChshStats run_chsh_trials(const StateVector& s, const ChshAngles& dirs, std::int64_t n_trials,
                          RandomSource& rng, int jobs = 1,
                          MeasureOrder order = MeasureOrder::alice_first);

}  // namespace qit::localrealism
