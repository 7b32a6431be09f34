#include "qit/localrealism.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace qit::localrealism {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require_pm1(int v, const char* name) {
  if (v != 1 && v != -1) raise(errc::bad_value, std::string(name) + " must be +1 or -1");
}

}  // namespace

LocalStrategy::LocalStrategy(int alice_a_in, int alice_a_prime_in, int bob_b_in,
                             int bob_b_prime_in)
    : alice_a(alice_a_in),
      alice_a_prime(alice_a_prime_in),
      bob_b(bob_b_in),
      bob_b_prime(bob_b_prime_in) {
  require_pm1(alice_a, "alice_a");
  require_pm1(alice_a_prime, "alice_a_prime");
  require_pm1(bob_b, "bob_b");
  require_pm1(bob_b_prime, "bob_b_prime");
}

double strategy_chsh(const LocalStrategy& s) {
  const int value = s.alice_a * s.bob_b + s.alice_a * s.bob_b_prime +
                    s.alice_a_prime * s.bob_b - s.alice_a_prime * s.bob_b_prime;
  return static_cast<double>(value);
}

std::array<LocalStrategy, 16> all_deterministic_strategies() {
  auto sign = [](int bit) { return bit ? -1 : +1; };
  return {LocalStrategy(sign(0), sign(0), sign(0), sign(0)),
          LocalStrategy(sign(0), sign(0), sign(0), sign(1)),
          LocalStrategy(sign(0), sign(0), sign(1), sign(0)),
          LocalStrategy(sign(0), sign(0), sign(1), sign(1)),
          LocalStrategy(sign(0), sign(1), sign(0), sign(0)),
          LocalStrategy(sign(0), sign(1), sign(0), sign(1)),
          LocalStrategy(sign(0), sign(1), sign(1), sign(0)),
          LocalStrategy(sign(0), sign(1), sign(1), sign(1)),
          LocalStrategy(sign(1), sign(0), sign(0), sign(0)),
          LocalStrategy(sign(1), sign(0), sign(0), sign(1)),
          LocalStrategy(sign(1), sign(0), sign(1), sign(0)),
          LocalStrategy(sign(1), sign(0), sign(1), sign(1)),
          LocalStrategy(sign(1), sign(1), sign(0), sign(0)),
          LocalStrategy(sign(1), sign(1), sign(0), sign(1)),
          LocalStrategy(sign(1), sign(1), sign(1), sign(0)),
          LocalStrategy(sign(1), sign(1), sign(1), sign(1))};
}

double lhv_bound() {
  int best = 0;
  for (const LocalStrategy& s : all_deterministic_strategies()) {
    const int value = s.alice_a * s.bob_b + s.alice_a * s.bob_b_prime +
                      s.alice_a_prime * s.bob_b - s.alice_a_prime * s.bob_b_prime;
    best = std::max(best, std::abs(value));
  }
  return static_cast<double>(best);
}

ChshAngles optimal_epr_angles() {
  return ChshAngles{Direction::planar(kPi / 2), Direction::planar(0.0),
                    Direction::planar(3 * kPi / 4), Direction::planar(kPi / 4)};
}

double quantum_chsh_ideal(const StateVector& s, const ChshAngles& dirs) {
  if (s.num_systems() != 2) raise(errc::dimension_mismatch, "CHSH needs a two-system state");
  const double e_ab = measurement::correlator(s, 0, dirs.a, 1, dirs.b);
  const double e_abp = measurement::correlator(s, 0, dirs.a, 1, dirs.b_prime);
  const double e_apb = measurement::correlator(s, 0, dirs.a_prime, 1, dirs.b);
  const double e_apbp = measurement::correlator(s, 0, dirs.a_prime, 1, dirs.b_prime);
  return e_ab + e_abp + e_apb - e_apbp;
}

ChshStats run_chsh_trials(const StateVector& s, const ChshAngles& dirs, std::int64_t n_trials,
                          RandomSource& rng, int jobs, MeasureOrder order) {
  if (s.num_systems() != 2) raise(errc::dimension_mismatch, "CHSH needs a two-system state");
  if (n_trials < 1) raise(errc::bad_value, "need at least one trial");
  if (jobs < 1) raise(errc::bad_value, "jobs must be positive");

  const RandomSource settings_root = rng.substream(1);
  const RandomSource outcomes_root = rng.substream(2);
  const Direction alice_dirs[2] = {dirs.a, dirs.a_prime};
  const Direction bob_dirs[2] = {dirs.b, dirs.b_prime};

  using Counts = std::array<std::array<std::int64_t, 4>, 4>;
  auto run_range = [&](std::int64_t begin, std::int64_t end, Counts& counts) {
    for (std::int64_t t = begin; t < end; ++t) {
      RandomSource srng = settings_root.substream(static_cast<std::uint64_t>(t));
      const int aset = static_cast<int>(srng.next_below(2));
      const int bset = static_cast<int>(srng.next_below(2));
      RandomSource orng = outcomes_root.substream(static_cast<std::uint64_t>(t));
      int aout, bout;
      if (order == MeasureOrder::alice_first) {
        const auto first = measurement::measure(s, 0, alice_dirs[aset], orng);
        const auto second = measurement::measure(first.post_state, 1, bob_dirs[bset], orng);
        aout = first.value;
        bout = second.value;
      } else {
        const auto first = measurement::measure(s, 1, bob_dirs[bset], orng);
        const auto second = measurement::measure(first.post_state, 0, alice_dirs[aset], orng);
        bout = first.value;
        aout = second.value;
      }
      const int pair = 2 * aset + bset;
      const int cell = 2 * (aout < 0 ? 1 : 0) + (bout < 0 ? 1 : 0);
      ++counts[pair][cell];
    }
  };

  ChshStats stats;
  stats.n_trials = n_trials;
  if (jobs == 1 || n_trials < 2 * jobs) {
    run_range(0, n_trials, stats.counts);
  } else {
    std::vector<Counts> partials(jobs);
    for (auto& c : partials) c = Counts{};
    std::vector<std::thread> workers;
    const std::int64_t chunk = (n_trials + jobs - 1) / jobs;
    for (int w = 0; w < jobs; ++w) {
      const std::int64_t begin = w * chunk;
      const std::int64_t end = std::min<std::int64_t>(n_trials, begin + chunk);
      if (begin >= end) break;
      workers.emplace_back([&, begin, end, w] { run_range(begin, end, partials[w]); });
    }
    for (auto& w : workers) w.join();
    for (const Counts& c : partials)
      for (int p = 0; p < 4; ++p)
        for (int cell = 0; cell < 4; ++cell) stats.counts[p][cell] += c[p][cell];
  }

  double variance_sum = 0;
  for (int pair = 0; pair < 4; ++pair) {
    const auto& c = stats.counts[pair];
    const std::int64_t n = c[0] + c[1] + c[2] + c[3];
    if (n == 0) {
      stats.correlators[pair] = 0;
      variance_sum = std::numeric_limits<double>::infinity();
      continue;
    }
    const double e = static_cast<double>(c[0] - c[1] - c[2] + c[3]) / static_cast<double>(n);
    stats.correlators[pair] = e;
    variance_sum += std::max(0.0, 1.0 - e * e) / static_cast<double>(n);
  }
  stats.s_value = stats.correlators[0] + stats.correlators[1] + stats.correlators[2] -
                  stats.correlators[3];
  stats.std_error = std::sqrt(variance_sum);
  return stats;
}

}  // namespace qit::localrealism
