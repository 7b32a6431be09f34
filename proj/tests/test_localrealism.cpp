#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qit/localrealism.hpp"
#include "qit/random.hpp"
#include "support/oracles.hpp"

using qit::RandomSource;
using qit::StateVector;
using qit::localrealism::ChshAngles;
using qit::localrealism::ChshStats;
using qit::localrealism::LocalStrategy;
using qit::localrealism::MeasureOrder;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTsirelson = 2.8284271247461900976;  // 2 sqrt(2)

StateVector epr_pair() { return qit::make_state({{0, 0}, {1, 0}, {1, 0}, {0, 0}}); }

}  // namespace

TEST_CASE("local strategies are confined to integer combinations of size two") {
  CHECK_THROWS_AS(LocalStrategy(0, 1, 1, 1), qit::Error);
  CHECK_THROWS_AS(LocalStrategy(1, 1, 1, 2), qit::Error);

  const auto all = qit::localrealism::all_deterministic_strategies();
  double best = 0;
  for (const auto& s : all) {
    const double v = qit::localrealism::strategy_chsh(s);
    CHECK(std::abs(v) <= 2.0);
    CHECK(std::abs(v) == 2.0);  // every deterministic assignment saturates
    best = std::max(best, std::abs(v));
  }
  CHECK(best == 2.0);
  CHECK(qit::localrealism::lhv_bound() == 2.0);

  // Spot checks: S = ab + ab' + a'b - a'b'.
  CHECK(qit::localrealism::strategy_chsh(LocalStrategy(1, 1, 1, 1)) == 2.0);
  CHECK(qit::localrealism::strategy_chsh(LocalStrategy(1, -1, 1, -1)) == -2.0);
  CHECK(qit::localrealism::strategy_chsh(LocalStrategy(1, 1, -1, 1)) == -2.0);
}

TEST_CASE("random mixtures of deterministic strategies stay inside the bound") {
  const auto all = qit::localrealism::all_deterministic_strategies();
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    double weights[16], total = 0;
    for (auto& w : weights) total += (w = u(gen));
    double s = 0;
    for (int i = 0; i < 16; ++i)
      s += weights[i] / total * qit::localrealism::strategy_chsh(all[static_cast<std::size_t>(i)]);
    CHECK(std::abs(s) <= 2.0 + 1e-12);
  }
}

TEST_CASE("frozen analyzer angles reach the quantum maximum") {
  const ChshAngles angles = qit::localrealism::optimal_epr_angles();
  CHECK(angles.a.polar == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(angles.a_prime.polar == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(angles.b.polar == doctest::Approx(3 * kPi / 4).epsilon(1e-15));
  CHECK(angles.b_prime.polar == doctest::Approx(kPi / 4).epsilon(1e-15));

  const double ideal = qit::localrealism::quantum_chsh_ideal(epr_pair(), angles);
  CHECK(std::abs(ideal - kTsirelson) < 1e-12);
}

TEST_CASE("an exhaustive planar grid certifies the frozen angles") {
  // 20^4 planar angle combinations: nothing beats the frozen setting, and
  // nothing anywhere exceeds 2 sqrt(2).
  const auto grid = oracle::chsh_grid_search(epr_pair().amplitudes(), 20);
  CHECK(grid.best_s <= kTsirelson + 1e-9);
  CHECK(grid.best_s > 2.7);  // the grid lands close to the maximum
  const double frozen = qit::localrealism::quantum_chsh_ideal(
      epr_pair(), qit::localrealism::optimal_epr_angles());
  CHECK(frozen >= grid.best_s - 1e-12);
}

TEST_CASE("the ideal value degrades smoothly away from the optimum") {
  using qit::measurement::Direction;
  const StateVector s = epr_pair();
  // Perturbing one analyzer by delta moves S below the maximum by O(delta^2).
  for (double delta : {0.05, 0.1, 0.2}) {
    const ChshAngles perturbed{Direction::planar(kPi / 2 + delta), Direction::planar(0.0),
                               Direction::planar(3 * kPi / 4), Direction::planar(kPi / 4)};
    const double v = qit::localrealism::quantum_chsh_ideal(s, perturbed);
    CHECK(v < kTsirelson);
    CHECK(v > kTsirelson - 2 * delta * delta);
  }
}

TEST_CASE("quantum_chsh_ideal needs a two-system state") {
  const ChshAngles angles = qit::localrealism::optimal_epr_angles();
  CHECK_THROWS_AS(qit::localrealism::quantum_chsh_ideal(qit::basis_state(1, 0), angles),
                  qit::Error);
  CHECK_THROWS_AS(qit::localrealism::quantum_chsh_ideal(qit::basis_state(3, 0), angles),
                  qit::Error);
}

TEST_CASE("sampled runs agree with the ideal value within the quoted error") {
  RandomSource rng(404);
  const ChshStats stats = qit::localrealism::run_chsh_trials(
      epr_pair(), qit::localrealism::optimal_epr_angles(), 100000, rng);
  CHECK(stats.n_trials == 100000);
  std::int64_t total = 0;
  for (const auto& pair : stats.counts)
    for (std::int64_t c : pair) total += c;
  CHECK(total == 100000);
  CHECK(std::abs(stats.s_value - kTsirelson) < 4 * stats.std_error);
  CHECK(stats.s_value > 2.0);  // the local-realistic bound is left behind
  CHECK(stats.std_error > 0);
  CHECK(stats.std_error < 0.05);
}

TEST_CASE("identical seeds reproduce identical runs") {
  const ChshAngles angles = qit::localrealism::optimal_epr_angles();
  RandomSource a(7), b(7), c(8);
  const ChshStats ra = qit::localrealism::run_chsh_trials(epr_pair(), angles, 5000, a);
  const ChshStats rb = qit::localrealism::run_chsh_trials(epr_pair(), angles, 5000, b);
  const ChshStats rc = qit::localrealism::run_chsh_trials(epr_pair(), angles, 5000, c);
  CHECK(ra.counts == rb.counts);
  CHECK(ra.s_value == rb.s_value);
  CHECK(ra.counts != rc.counts);
}

TEST_CASE("worker count cannot change the statistics") {
  const ChshAngles angles = qit::localrealism::optimal_epr_angles();
  RandomSource a(11), b(11), c(11);
  const ChshStats seq = qit::localrealism::run_chsh_trials(epr_pair(), angles, 20001, a, 1);
  const ChshStats par4 = qit::localrealism::run_chsh_trials(epr_pair(), angles, 20001, b, 4);
  const ChshStats par7 = qit::localrealism::run_chsh_trials(epr_pair(), angles, 20001, c, 7);
  CHECK(seq.counts == par4.counts);
  CHECK(seq.counts == par7.counts);
  CHECK(seq.s_value == par4.s_value);  // bit-identical, not merely close
  CHECK(seq.std_error == par7.std_error);
}

TEST_CASE("measurement order does not influence the physics") {
  const ChshAngles angles = qit::localrealism::optimal_epr_angles();
  RandomSource a(21), b(21);
  const ChshStats alice_first = qit::localrealism::run_chsh_trials(
      epr_pair(), angles, 60000, a, 1, MeasureOrder::alice_first);
  const ChshStats bob_first = qit::localrealism::run_chsh_trials(
      epr_pair(), angles, 60000, b, 1, MeasureOrder::bob_first);
  // Identical setting draws, so the per-pair totals match exactly; the
  // outcome statistics agree within sampling error.
  for (int pair = 0; pair < 4; ++pair) {
    const auto& ca = alice_first.counts[static_cast<std::size_t>(pair)];
    const auto& cb = bob_first.counts[static_cast<std::size_t>(pair)];
    const std::int64_t na = ca[0] + ca[1] + ca[2] + ca[3];
    const std::int64_t nb = cb[0] + cb[1] + cb[2] + cb[3];
    CHECK(na == nb);
    CHECK(std::abs(alice_first.correlators[static_cast<std::size_t>(pair)] -
                   bob_first.correlators[static_cast<std::size_t>(pair)]) <
          8 / std::sqrt(static_cast<double>(na)));
  }
  CHECK(std::abs(alice_first.s_value - bob_first.s_value) <
        4 * (alice_first.std_error + bob_first.std_error));
}

TEST_CASE("either party's marginal stays unbiased for every setting pair") {
  RandomSource rng(31);
  const ChshStats stats = qit::localrealism::run_chsh_trials(
      epr_pair(), qit::localrealism::optimal_epr_angles(), 80000, rng);
  for (int pair = 0; pair < 4; ++pair) {
    const auto& c = stats.counts[static_cast<std::size_t>(pair)];
    const double n = static_cast<double>(c[0] + c[1] + c[2] + c[3]);
    const double alice_plus = static_cast<double>(c[0] + c[1]) / n;
    const double bob_plus = static_cast<double>(c[0] + c[2]) / n;
    CHECK(std::abs(alice_plus - 0.5) < 4 * std::sqrt(0.25 / n));
    CHECK(std::abs(bob_plus - 0.5) < 4 * std::sqrt(0.25 / n));
  }
}

TEST_CASE("degenerate runs are reported, not hidden") {
  RandomSource rng(41);
  const ChshStats one = qit::localrealism::run_chsh_trials(
      epr_pair(), qit::localrealism::optimal_epr_angles(), 1, rng);
  CHECK(one.n_trials == 1);
  CHECK(std::isinf(one.std_error));  // three empty setting pairs

  RandomSource bad(42);
  CHECK_THROWS_AS(qit::localrealism::run_chsh_trials(
                      epr_pair(), qit::localrealism::optimal_epr_angles(), 0, bad),
                  qit::Error);
  CHECK_THROWS_AS(qit::localrealism::run_chsh_trials(
                      epr_pair(), qit::localrealism::optimal_epr_angles(), 10, bad, 0),
                  qit::Error);
}
