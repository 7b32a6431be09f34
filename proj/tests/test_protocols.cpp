#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qit/protocols.hpp"
#include "qit/stats.hpp"
#include "support/oracles.hpp"

using qit::cplx;
using qit::RandomSource;
using qit::StateVector;
using qit::measurement::Direction;
using qit::protocols::Channel;
using qit::protocols::Correction;
using qit::protocols::QkdSession;
using qit::protocols::TeleportTranscript;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kInvSqrt2 = 0.7071067811865475244;

const std::array<std::array<cplx, 4>, 4> kBellAmps = {{
    {cplx{kInvSqrt2, 0}, 0, 0, cplx{kInvSqrt2, 0}},
    {cplx{kInvSqrt2, 0}, 0, 0, cplx{-kInvSqrt2, 0}},
    {0, cplx{kInvSqrt2, 0}, cplx{kInvSqrt2, 0}, 0},
    {0, cplx{kInvSqrt2, 0}, cplx{-kInvSqrt2, 0}, 0},
}};

// 2x2 correction applied for each announced outcome, in outcome order.
const std::array<oracle::Mat, 4> kCorrectionMats = {{
    {2, {0, -1, 1, 0}},  // XZ
    {2, {0, 1, 1, 0}},   // X
    {2, {1, 0, 0, -1}},  // Z
    {2, {1, 0, 0, 1}},
}};

StateVector random_qubit(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  return qit::make_state({cplx{g(gen), g(gen)}, cplx{g(gen), g(gen)}});
}

// Fully independent branch computation: project input (x) singlet onto the
// Bell outcome at sites 0,1, read off Bob's conditional state, correct it.
struct BranchOracle {
  double probability;
  std::vector<cplx> bob_corrected;
  oracle::Mat bob_uncorrected_density{2, {}};
};

BranchOracle branch_oracle(const StateVector& input, int k) {
  const std::vector<cplx> singlet = {0, {kInvSqrt2, 0}, {-kInvSqrt2, 0}, 0};
  std::vector<cplx> full(8);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 4; ++j) full[i * 4 + j] = input.amplitudes()[i] * singlet[j];

  oracle::Mat bell_proj{4, std::vector<cplx>(16)};
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c)
      bell_proj.at(r, c) =
          kBellAmps[static_cast<std::size_t>(k)][r] *
          std::conj(kBellAmps[static_cast<std::size_t>(k)][c]);
  const oracle::Mat embedded = oracle::kron(bell_proj, oracle::identity(2));

  auto post = oracle::matvec(embedded, full);
  double p = 0;
  for (const auto& a : post) p += std::norm(a);
  for (auto& a : post) a /= std::sqrt(p);

  BranchOracle result;
  result.probability = p;
  result.bob_uncorrected_density = oracle::reduced_density(post, 3, {2});
  const auto chi = oracle::power_iterate(result.bob_uncorrected_density, 200);
  result.bob_corrected = oracle::matvec(kCorrectionMats[static_cast<std::size_t>(k)], chi);
  return result;
}

}  // namespace

TEST_CASE("the Bell basis is the advertised orthonormal quartet") {
  const auto basis = qit::protocols::bell_basis();
  for (int k = 0; k < 4; ++k) {
    const auto& amps = basis[static_cast<std::size_t>(k)].amplitudes();
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(std::abs(amps[i] - kBellAmps[static_cast<std::size_t>(k)][i]) < 1e-15);
    for (int l = 0; l < 4; ++l) {
      const cplx ip = qit::inner_product(basis[static_cast<std::size_t>(k)],
                                         basis[static_cast<std::size_t>(l)]);
      CHECK(std::abs(ip - (k == l ? cplx{1, 0} : cplx{0, 0})) < 1e-15);
    }
  }
}

TEST_CASE("bell_outcome_probabilities match the overlap squares") {
  const auto basis = qit::protocols::bell_basis();
  for (int k = 0; k < 4; ++k) {
    const auto probs = qit::protocols::bell_outcome_probabilities(
        basis[static_cast<std::size_t>(k)], 0, 1);
    for (int l = 0; l < 4; ++l)
      CHECK(probs[static_cast<std::size_t>(l)] ==
            doctest::Approx(k == l ? 1.0 : 0.0).epsilon(1e-12));
  }

  std::mt19937_64 gen(5);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cplx> raw(4);
  for (auto& x : raw) x = cplx{g(gen), g(gen)};
  const StateVector s = qit::make_state(raw);
  const auto probs = qit::protocols::bell_outcome_probabilities(s, 0, 1);
  double total = 0;
  for (int k = 0; k < 4; ++k) {
    const cplx overlap = oracle::inner(
        std::vector<cplx>(kBellAmps[static_cast<std::size_t>(k)].begin(),
                          kBellAmps[static_cast<std::size_t>(k)].end()),
        s.amplitudes());
    CHECK(probs[static_cast<std::size_t>(k)] ==
          doctest::Approx(std::norm(overlap)).epsilon(1e-10));
    total += probs[static_cast<std::size_t>(k)];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("corrections follow the announced outcome") {
  using qit::protocols::correction_for_outcome;
  CHECK(correction_for_outcome(0) == Correction::pauli_xz);
  CHECK(correction_for_outcome(1) == Correction::pauli_x);
  CHECK(correction_for_outcome(2) == Correction::pauli_z);
  CHECK(correction_for_outcome(3) == Correction::identity);
  CHECK_THROWS_AS(correction_for_outcome(4), qit::Error);
  CHECK_THROWS_AS(correction_for_outcome(-1), qit::Error);

  CHECK(std::string(qit::protocols::to_string(Correction::pauli_xz)) == "XZ");
  CHECK(std::string(qit::protocols::to_string(Correction::identity)) == "identity");

  for (int k = 0; k < 4; ++k) {
    const auto got = qit::protocols::correction_operator(correction_for_outcome(k)).entries();
    const auto& expect = kCorrectionMats[static_cast<std::size_t>(k)].a;
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(got[i] - expect[i]) < 1e-15);
  }
}

TEST_CASE("every branch teleports every input exactly") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const StateVector input = random_qubit(seed);
    for (int k = 0; k < 4; ++k) {
      const TeleportTranscript t = qit::protocols::teleport_branch(input, k);
      CHECK(t.bsm_outcome == k);
      CHECK(t.branch_probability == doctest::Approx(0.25).epsilon(1e-12));
      CHECK(t.fidelity_achieved >= 1.0 - 1e-10);
      CHECK(qit::fidelity(t.bob_state, input) >= 1.0 - 1e-10);

      const BranchOracle expect = branch_oracle(input, k);
      CHECK(t.branch_probability == doctest::Approx(expect.probability).epsilon(1e-10));
      CHECK(oracle::fidelity(t.bob_state.amplitudes(), expect.bob_corrected) ==
            doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("the transcript hangs together as one story") {
  const StateVector input = random_qubit(77);
  const TeleportTranscript t = qit::protocols::teleport_branch(input, 1);
  // The final three-system state holds the Bell pair at sites 0,1 and the
  // restored payload at site 2.
  const qit::DensityMatrix front = qit::partial_trace(t.final_state, {0, 1});
  const auto basis = qit::protocols::bell_basis();
  const qit::DensityMatrix bell = qit::DensityMatrix::pure(basis[1]);
  CHECK(qit::trace_distance(front, bell) < 1e-10);
  const qit::DensityMatrix back = qit::partial_trace(t.final_state, {2});
  CHECK(back.purity() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(qit::trace_distance(back, qit::DensityMatrix::pure(input)) < 1e-10);
}

TEST_CASE("what Bob holds before the call is featureless") {
  for (std::uint64_t seed = 30; seed < 55; ++seed) {
    const StateVector input = random_qubit(seed);
    const TeleportTranscript t = qit::protocols::teleport_branch(input, static_cast<int>(seed % 4));
    CHECK(qit::protocols::nosignaling_audit(t) < 1e-10);
  }
}

TEST_CASE("skipping the correction leaves half the fidelity on average") {
  for (std::uint64_t seed = 60; seed < 70; ++seed) {
    const StateVector input = random_qubit(seed);
    double mean = 0;
    for (int k = 0; k < 4; ++k) {
      const TeleportTranscript t = qit::protocols::teleport_branch(input, k);
      // Undo the correction to recover what Bob held before the message.
      const qit::Operator inverse =
          qit::protocols::correction_operator(t.correction).adjoint();
      const StateVector uncorrected = qit::apply_operator(
          qit::Operator::unitary(inverse.entries()), {0}, t.bob_state);
      mean += t.branch_probability * qit::fidelity(uncorrected, input);
    }
    CHECK(mean == doctest::Approx(0.5).epsilon(1e-10));
  }
}

TEST_CASE("sampled teleportation draws outcomes uniformly") {
  RandomSource rng(88);
  std::array<std::int64_t, 4> histogram{};
  const StateVector input = random_qubit(99);
  for (int t = 0; t < 4000; ++t) {
    const TeleportTranscript tr = qit::protocols::teleport(input, rng);
    ++histogram[static_cast<std::size_t>(tr.bsm_outcome)];
    if (t < 5) CHECK(tr.fidelity_achieved >= 1.0 - 1e-10);
  }
  const double chi2 = qit::stats::chi_square_uniform_statistic(
      std::span<const std::int64_t>(histogram.data(), 4));
  CHECK(qit::stats::chi_square_pvalue(chi2, 3) > 0.01);
}

TEST_CASE("teleport batches are reproducible and worker-count invariant") {
  RandomSource a(5), b(5), c(5);
  const auto seq = qit::protocols::run_teleport_trials(3001, a, 1);
  const auto par = qit::protocols::run_teleport_trials(3001, b, 4);
  const auto par7 = qit::protocols::run_teleport_trials(3001, c, 7);
  CHECK(seq.outcome_counts == par.outcome_counts);
  CHECK(seq.mean_fidelity == par.mean_fidelity);  // bit-identical reduction
  CHECK(seq.min_fidelity == par7.min_fidelity);
  CHECK(seq.max_nosignaling_distance == par7.max_nosignaling_distance);
  CHECK(seq.min_fidelity >= 1.0 - 1e-10);
  CHECK(seq.max_nosignaling_distance < 1e-10);
  CHECK(seq.mean_fidelity_std_error < 1e-10);  // every trial lands at 1
  std::int64_t total = 0;
  for (std::int64_t n : seq.outcome_counts) total += n;
  CHECK(total == 3001);
}

TEST_CASE("teleport rejects malformed requests") {
  CHECK_THROWS_AS(qit::protocols::teleport_branch(random_qubit(1), 4), qit::Error);
  CHECK_THROWS_AS(qit::protocols::teleport_branch(random_qubit(1), -1), qit::Error);
  const StateVector two = qit::basis_state(2, 0);
  CHECK_THROWS_AS(qit::protocols::teleport_branch(two, 0), qit::Error);
  RandomSource rng(2);
  CHECK_THROWS_AS(qit::protocols::teleport(two, rng), qit::Error);
  CHECK_THROWS_AS(qit::protocols::run_teleport_trials(0, rng), qit::Error);
}

TEST_CASE("the two key menus share their axes, the test menu adds diagonals") {
  const auto& alice = qit::protocols::alice_menu();
  const auto& bob = qit::protocols::bob_menu();
  REQUIRE(alice.size() == 2);
  REQUIRE(bob.size() == 4);
  CHECK(alice[0].polar == doctest::Approx(0.0));
  CHECK(alice[1].polar == doctest::Approx(kPi / 2));
  CHECK(bob[0].polar == doctest::Approx(0.0));
  CHECK(bob[1].polar == doctest::Approx(kPi / 2));
  CHECK(bob[2].polar == doctest::Approx(kPi / 4));
  CHECK(bob[3].polar == doctest::Approx(3 * kPi / 4));
  for (const auto& d : bob) CHECK(d.azimuth == doctest::Approx(0.0));
}

TEST_CASE("an undisturbed session distributes a perfect key") {
  RandomSource rng(314);
  const QkdSession s = qit::protocols::e91_run(6000, Channel::ideal(), rng);
  CHECK(s.n_pairs == 6000);
  CHECK_FALSE(s.intercepted);
  CHECK(s.qber == 0.0);  // matched-axis anti-correlation is exact
  CHECK(s.sifted_key_alice == s.sifted_key_bob);
  CHECK(s.sifted_key_alice.size() > 1000);
  CHECK(s.n_test_rounds > 2000);
  CHECK(std::abs(s.s_estimate - 2.8284271247461903) < 4 * s.s_std_error);
  CHECK(s.s_estimate > 2.0);

  // The record is complete and internally consistent.
  CHECK(s.alice_settings.size() == 6000);
  CHECK(s.bob_settings.size() == 6000);
  CHECK(s.alice_outcomes.size() == 6000);
  CHECK(s.bob_outcomes.size() == 6000);
  std::vector<std::int8_t> rebuilt_alice, rebuilt_bob;
  for (std::size_t r = 0; r < 6000; ++r) {
    CHECK((s.alice_outcomes[r] == 1 || s.alice_outcomes[r] == -1));
    if (s.bob_settings[r] < 2 && s.alice_settings[r] == s.bob_settings[r]) {
      rebuilt_alice.push_back(s.alice_outcomes[r] > 0 ? 1 : 0);
      rebuilt_bob.push_back(s.bob_outcomes[r] < 0 ? 1 : 0);
    }
  }
  CHECK(rebuilt_alice == s.sifted_key_alice);
  CHECK(rebuilt_bob == s.sifted_key_bob);
}

TEST_CASE("sessions are reproducible from their seed") {
  RandomSource a(271), b(271), c(272);
  const QkdSession sa = qit::protocols::e91_run(500, Channel::ideal(), a);
  const QkdSession sb = qit::protocols::e91_run(500, Channel::ideal(), b);
  const QkdSession sc = qit::protocols::e91_run(500, Channel::ideal(), c);
  CHECK(sa.sifted_key_alice == sb.sifted_key_alice);
  CHECK(sa.s_estimate == sb.s_estimate);
  CHECK(sa.sifted_key_alice != sc.sifted_key_alice);
}

TEST_CASE("an intercepted line shows errors and a classical test value") {
  RandomSource rng(515);
  const Channel tapped = Channel::intercept_resend(Direction::planar(0.0));
  const QkdSession s = qit::protocols::e91_run(10000, tapped, rng);
  CHECK(s.intercepted);
  CHECK(s.eve_polar == doctest::Approx(0.0));

  // The interception floor for any in-plane tap is exactly one error in four.
  CHECK(oracle::intercept_resend_qber(0.0) == doctest::Approx(0.25).epsilon(1e-15));
  const double n = static_cast<double>(s.sifted_key_alice.size());
  CHECK(std::abs(s.qber - 0.25) < 4 * std::sqrt(0.25 * 0.75 / n));
  CHECK(s.s_estimate < 2.0 + 4 * s.s_std_error);
  // The tap in the key plane specifically drops the test value to sqrt(2).
  CHECK(std::abs(s.s_estimate - 1.4142135623730951) < 4 * s.s_std_error);
}

TEST_CASE("error rates across tap directions follow the overlap arithmetic") {
  // For a tap along Bloch vector n the expected key error rate is
  // (1 + ny^2)/4: flat at 1/4 inside the analyzer plane, growing to 1/2 as
  // the tap leaves it.
  struct GridPoint {
    double polar, azimuth;
  };
  const GridPoint grid[] = {
      {0.0, 0.0},          {kPi / 8, 0.0},      {kPi / 4, 0.0},      {3 * kPi / 8, 0.0},
      {kPi / 2, 0.0},      {kPi / 2, kPi / 8},  {kPi / 2, kPi / 4},  {kPi / 2, 3 * kPi / 8},
      {kPi / 2, kPi / 2},  {kPi / 4, kPi / 2},  {3 * kPi / 8, kPi / 2}, {kPi / 8, kPi / 2},
  };
  int idx = 0;
  double planar_qber = 0, orthogonal_qber = 0;
  for (const auto& g : grid) {
    const Direction eve(g.polar, g.azimuth);
    const double ny = std::sin(g.polar) * std::sin(g.azimuth);
    const double expected = (1 + ny * ny) / 4;
    RandomSource rng(900 + static_cast<std::uint64_t>(idx));
    const QkdSession s =
        qit::protocols::e91_run(3000, Channel::intercept_resend(eve), rng);
    const double n = static_cast<double>(s.sifted_key_alice.size());
    CHECK(std::abs(s.qber - expected) < 4 * std::sqrt(expected * (1 - expected) / n));
    if (idx == 0) planar_qber = s.qber;
    if (idx == 8) orthogonal_qber = s.qber;
    ++idx;
  }
  CHECK(orthogonal_qber - planar_qber > 0.1);  // leaving the plane is worse
}

TEST_CASE("sessions refuse to draw conclusions from too little data") {
  RandomSource rng(1);
  try {
    qit::protocols::e91_run(99, Channel::ideal(), rng);
    FAIL("expected a throw");
  } catch (const qit::Error& e) {
    CHECK(e.code() == qit::errc::insufficient_rounds);
  }
  RandomSource ok(2);
  const QkdSession s = qit::protocols::e91_run(100, Channel::ideal(), ok);
  CHECK(s.n_pairs == 100);
  CHECK_FALSE(s.sifted_key_alice.empty());
}

TEST_CASE("fresh-state bits are balanced, patternless, and reproducible") {
  RandomSource a(42), b(42), c(43);
  const auto bits = qit::protocols::qrng_bits(50000, a);
  const auto again = qit::protocols::qrng_bits(50000, b);
  const auto other = qit::protocols::qrng_bits(50000, c);
  CHECK(bits == again);
  CHECK(bits != other);

  std::int64_t ones = 0;
  for (std::int8_t bit : bits) ones += bit;
  const double frac = static_cast<double>(ones) / 50000.0;
  CHECK(std::abs(frac - 0.5) < 4 * std::sqrt(0.25 / 50000.0));
  CHECK(qit::stats::monobit_pvalue(bits) > 0.01);
  CHECK(qit::stats::runs_pvalue(bits) > 0.01);
  CHECK(std::abs(qit::stats::lag1_autocorrelation(bits)) < 4.0 / std::sqrt(50000.0));

  RandomSource bad(1);
  CHECK_THROWS_AS(qit::protocols::qrng_bits(0, bad), qit::Error);
}
