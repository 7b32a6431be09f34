#include "qit/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

namespace qit::protocols {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

const StateVector& singlet() {
  static const StateVector s = make_state({{0, 0}, {kInvSqrt2, 0}, {-kInvSqrt2, 0}, {0, 0}});
  return s;
}

StateVector state_from_pure_density(const DensityMatrix& rho) {
  if (rho.purity() < 1.0 - kChainedTol) raise(errc::rank_error, "density matrix is not pure");
  const std::size_t d = rho.dim();
  std::size_t best_col = 0;
  double best = -1;
  for (std::size_t col = 0; col < d; ++col) {
    const double diag = rho.entry(col, col).real();
    if (diag > best) {
      best = diag;
      best_col = col;
    }
  }
  std::vector<cplx> amps(d);
  for (std::size_t row = 0; row < d; ++row) amps[row] = rho.entry(row, best_col);
  return make_state(std::move(amps));
}

}  // namespace

std::array<StateVector, 4> bell_basis() {
  return {make_state({{1, 0}, {0, 0}, {0, 0}, {1, 0}}),    // Phi+
          make_state({{1, 0}, {0, 0}, {0, 0}, {-1, 0}}),   // Phi-
          make_state({{0, 0}, {1, 0}, {1, 0}, {0, 0}}),    // Psi+
          make_state({{0, 0}, {1, 0}, {-1, 0}, {0, 0}})};  // Psi-
}

std::array<double, 4> bell_outcome_probabilities(const StateVector& s, int site_a, int site_b) {
  const auto basis = bell_basis();
  std::array<double, 4> probs{};
  for (int k = 0; k < 4; ++k) {
    const Operator p = projector_onto(basis[k]);
    const auto projected =
        detail::apply_matrix(p.entries(), 2, {site_a, site_b}, s.num_systems(), s.amplitudes());
    double norm_sq = 0;
    for (const cplx& a : projected) norm_sq += std::norm(a);
    probs[k] = norm_sq;
  }
  return probs;
}

BsmResult bell_state_measurement(const StateVector& s, int site_a, int site_b,
                                 RandomSource& rng) {
  const auto probs = bell_outcome_probabilities(s, site_a, site_b);
  int outcome = -1;
  for (int k = 0; k < 4; ++k) {
    if (probs[k] >= 1.0 - kCertaintyTol) {
      outcome = k;
      break;
    }
  }
  if (outcome < 0) {
    const double u = rng.next_uniform();
    double cumulative = 0;
    for (int k = 0; k < 4; ++k) {
      cumulative += probs[k];
      if (u < cumulative) {
        outcome = k;
        break;
      }
    }
    if (outcome < 0) outcome = 3;  // guard against rounding at u ~ 1
  }
  const Operator p = projector_onto(bell_basis()[static_cast<std::size_t>(outcome)]);
  StateVector collapsed = apply_operator(p, {site_a, site_b}, s);
  return BsmResult{outcome, std::move(collapsed)};
}

const char* to_string(Correction c) {
  switch (c) {
    case Correction::identity: return "identity";
    case Correction::pauli_x: return "X";
    case Correction::pauli_z: return "Z";
    case Correction::pauli_xz: return "XZ";
  }
  return "unknown";
}

Correction correction_for_outcome(int bell_outcome) {
  switch (bell_outcome) {
    case 0: return Correction::pauli_xz;   // Phi+
    case 1: return Correction::pauli_x;    // Phi-
    case 2: return Correction::pauli_z;    // Psi+
    case 3: return Correction::identity;   // Psi-
  }
  raise(errc::bad_value, "bell outcome must be 0..3");
}

Operator correction_operator(Correction c) {
  switch (c) {
    case Correction::identity: return Operator::identity(1);
    case Correction::pauli_x: return Operator::unitary({{0, 0}, {1, 0}, {1, 0}, {0, 0}});
    case Correction::pauli_z: return Operator::unitary({{1, 0}, {0, 0}, {0, 0}, {-1, 0}});
    case Correction::pauli_xz:
      // X * Z = [[0, -1], [1, 0]]
      return Operator::unitary({{0, 0}, {-1, 0}, {1, 0}, {0, 0}});
  }
  raise(errc::bad_value, "unknown correction");
}

namespace {

TeleportTranscript teleport_impl(const StateVector& input, int outcome) {
  if (input.num_systems() != 1) raise(errc::dimension_mismatch, "teleport takes one system");
  const StateVector full = tensor_product(input, singlet());
  const auto probs = bell_outcome_probabilities(full, 0, 1);

  // Bob's marginal averaged over the unannounced Bell outcomes.
  std::vector<std::pair<double, DensityMatrix>> parts;
  const auto basis = bell_basis();
  for (int k = 0; k < 4; ++k) {
    if (probs[k] < 1e-14) continue;
    const StateVector branch = apply_operator(projector_onto(basis[k]), {0, 1}, full);
    parts.emplace_back(probs[k], partial_trace(branch, {2}));
  }
  DensityMatrix premessage = mixture(parts);

  const StateVector collapsed =
      apply_operator(projector_onto(basis[static_cast<std::size_t>(outcome)]), {0, 1}, full);
  const Correction correction = correction_for_outcome(outcome);
  const StateVector corrected = apply_operator(correction_operator(correction), {2}, collapsed);
  StateVector bob = state_from_pure_density(partial_trace(corrected, {2}));
  const double fid = fidelity(input, bob);
  return TeleportTranscript{input,
                            outcome,
                            probs[static_cast<std::size_t>(outcome)],
                            correction,
                            std::move(bob),
                            fid,
                            std::move(premessage),
                            corrected};
}

}  // namespace

TeleportTranscript teleport(const StateVector& input, RandomSource& rng) {
  if (input.num_systems() != 1) raise(errc::dimension_mismatch, "teleport takes one system");
  const StateVector full = tensor_product(input, singlet());
  // Sample the Bell outcome the way bell_state_measurement does, then reuse
  // the deterministic branch path.
  const BsmResult bsm = bell_state_measurement(full, 0, 1, rng);
  return teleport_impl(input, bsm.outcome);
}

TeleportTranscript teleport_branch(const StateVector& input, int forced_outcome) {
  if (forced_outcome < 0 || forced_outcome > 3)
    raise(errc::bad_value, "bell outcome must be 0..3");
  return teleport_impl(input, forced_outcome);
}

double nosignaling_audit(const TeleportTranscript& t) {
  return trace_distance(t.bob_premessage_reduced, DensityMatrix::maximally_mixed(2));
}

TeleportBatchStats run_teleport_trials(std::int64_t n_trials, RandomSource& rng, int jobs) {
  if (n_trials < 1) raise(errc::bad_value, "need at least one trial");
  if (jobs < 1) raise(errc::bad_value, "jobs must be positive");
  const RandomSource inputs_root = rng.substream(1);
  const RandomSource outcomes_root = rng.substream(2);

  std::vector<double> fidelities(static_cast<std::size_t>(n_trials));
  std::vector<double> distances(static_cast<std::size_t>(n_trials));
  std::vector<std::int8_t> outcomes(static_cast<std::size_t>(n_trials));

  auto run_range = [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t t = begin; t < end; ++t) {
      RandomSource irng = inputs_root.substream(static_cast<std::uint64_t>(t));
      const double polar = std::acos(1.0 - 2.0 * irng.next_uniform());
      const double azimuth = 2.0 * kPi * irng.next_uniform();
      const StateVector input = measurement::prepare_along(Direction(polar, azimuth));
      RandomSource orng = outcomes_root.substream(static_cast<std::uint64_t>(t));
      const TeleportTranscript transcript = teleport(input, orng);
      fidelities[static_cast<std::size_t>(t)] = transcript.fidelity_achieved;
      distances[static_cast<std::size_t>(t)] = nosignaling_audit(transcript);
      outcomes[static_cast<std::size_t>(t)] = static_cast<std::int8_t>(transcript.bsm_outcome);
    }
  };

  if (jobs == 1 || n_trials < 2 * jobs) {
    run_range(0, n_trials);
  } else {
    std::vector<std::thread> workers;
    const std::int64_t chunk = (n_trials + jobs - 1) / jobs;
    for (int w = 0; w < jobs; ++w) {
      const std::int64_t begin = w * chunk;
      const std::int64_t end = std::min<std::int64_t>(n_trials, begin + chunk);
      if (begin >= end) break;
      workers.emplace_back([&, begin, end] { run_range(begin, end); });
    }
    for (auto& w : workers) w.join();
  }

  TeleportBatchStats stats;
  stats.n_trials = n_trials;
  stats.min_fidelity = 1;
  double sum = 0;
  for (std::int64_t t = 0; t < n_trials; ++t) {
    const auto i = static_cast<std::size_t>(t);
    ++stats.outcome_counts[static_cast<std::size_t>(outcomes[i])];
    stats.min_fidelity = std::min(stats.min_fidelity, fidelities[i]);
    sum += fidelities[i];
    stats.max_nosignaling_distance = std::max(stats.max_nosignaling_distance, distances[i]);
  }
  stats.mean_fidelity = sum / static_cast<double>(n_trials);
  if (n_trials > 1) {
    double ss = 0;
    for (std::int64_t t = 0; t < n_trials; ++t) {
      const double d = fidelities[static_cast<std::size_t>(t)] - stats.mean_fidelity;
      ss += d * d;
    }
    stats.mean_fidelity_std_error =
        std::sqrt(ss / static_cast<double>(n_trials - 1) / static_cast<double>(n_trials));
  }
  return stats;
}

const std::vector<Direction>& alice_menu() {
  static const std::vector<Direction> menu = {Direction::planar(0.0),
                                              Direction::planar(kPi / 2)};
  return menu;
}

const std::vector<Direction>& bob_menu() {
  static const std::vector<Direction> menu = {
      Direction::planar(0.0), Direction::planar(kPi / 2), Direction::planar(kPi / 4),
      Direction::planar(3 * kPi / 4)};
  return menu;
}

QkdSession e91_run(std::int64_t n_pairs, const Channel& channel, RandomSource& rng) {
  if (n_pairs < 100) raise(errc::insufficient_rounds, "need at least 100 pairs");

  const RandomSource settings_root = rng.substream(1);
  const RandomSource outcomes_root = rng.substream(2);
  const RandomSource eve_root = rng.substream(3);

  QkdSession session;
  session.n_pairs = n_pairs;
  session.intercepted = channel.eavesdropper.has_value();
  if (session.intercepted) {
    session.eve_polar = channel.eavesdropper->polar;
    session.eve_azimuth = channel.eavesdropper->azimuth;
  }
  session.alice_settings.reserve(static_cast<std::size_t>(n_pairs));
  session.bob_settings.reserve(static_cast<std::size_t>(n_pairs));
  session.alice_outcomes.reserve(static_cast<std::size_t>(n_pairs));
  session.bob_outcomes.reserve(static_cast<std::size_t>(n_pairs));

  // Test-pair correlator counts on anti-correlation-adjusted outcomes,
  // indexed [alice_setting][bob_setting - 2][cell].
  std::int64_t counts[2][2][4] = {};
  std::int64_t mismatches = 0;

  for (std::int64_t r = 0; r < n_pairs; ++r) {
    RandomSource srng = settings_root.substream(static_cast<std::uint64_t>(r));
    const int a_idx = static_cast<int>(srng.next_below(2));
    const int b_idx = static_cast<int>(srng.next_below(4));
    RandomSource orng = outcomes_root.substream(static_cast<std::uint64_t>(r));

    StateVector state = singlet();
    if (channel.eavesdropper) {
      RandomSource erng = eve_root.substream(static_cast<std::uint64_t>(r));
      state = measurement::measure(state, 0, *channel.eavesdropper, erng).post_state;
    }
    const auto alice = measurement::measure(state, 0, alice_menu()[a_idx], orng);
    const auto bob = measurement::measure(alice.post_state, 1, bob_menu()[b_idx], orng);

    session.alice_settings.push_back(static_cast<std::int8_t>(a_idx));
    session.bob_settings.push_back(static_cast<std::int8_t>(b_idx));
    session.alice_outcomes.push_back(static_cast<std::int8_t>(alice.value));
    session.bob_outcomes.push_back(static_cast<std::int8_t>(bob.value));

    if (b_idx < 2 && a_idx == b_idx) {
      // Key round: matched axes, outcomes anti-correlated on the singlet.
      const std::int8_t alice_bit = alice.value > 0 ? 1 : 0;
      const std::int8_t bob_bit = bob.value < 0 ? 1 : 0;
      session.sifted_key_alice.push_back(alice_bit);
      session.sifted_key_bob.push_back(bob_bit);
      if (alice_bit != bob_bit) ++mismatches;
    } else if (b_idx >= 2) {
      // Test round: correlator of (alice, -bob).
      const int adjusted_bob = -bob.value;
      const int cell = 2 * (alice.value < 0 ? 1 : 0) + (adjusted_bob < 0 ? 1 : 0);
      ++counts[a_idx][b_idx - 2][cell];
    }
    // Remaining combinations (z,x) and (x,z) carry neither key nor test data.
  }

  if (session.sifted_key_alice.empty())
    raise(errc::insufficient_rounds, "no key rounds were sifted");

  double correlators[2][2];
  double variance_sum = 0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const auto& c = counts[a][b];
      const std::int64_t n = c[0] + c[1] + c[2] + c[3];
      if (n == 0) raise(errc::insufficient_rounds, "a CHSH test setting pair has no rounds");
      correlators[a][b] = static_cast<double>(c[0] - c[1] - c[2] + c[3]) / static_cast<double>(n);
      variance_sum += std::max(0.0, 1.0 - correlators[a][b] * correlators[a][b]) /
                      static_cast<double>(n);
      session.n_test_rounds += n;
    }
  }
  // CHSH labels: a = Alice x, a' = Alice z, b = Bob pi/4, b' = Bob 3pi/4.
  session.s_estimate =
      correlators[1][0] + correlators[1][1] + correlators[0][0] - correlators[0][1];
  session.s_std_error = std::sqrt(variance_sum);
  session.qber = static_cast<double>(mismatches) /
                 static_cast<double>(session.sifted_key_alice.size());
  return session;
}

std::vector<std::int8_t> qrng_bits(std::int64_t n_bits, RandomSource& rng) {
  if (n_bits < 1) raise(errc::bad_value, "need at least one bit");
  const StateVector up = measurement::prepare_along(Direction::z());
  const Direction axis = Direction::x();
  std::vector<std::int8_t> bits;
  bits.reserve(static_cast<std::size_t>(n_bits));
  for (std::int64_t i = 0; i < n_bits; ++i) {
    const auto outcome = measurement::measure(up, 0, axis, rng);
    bits.push_back(outcome.value > 0 ? 1 : 0);
  }
  return bits;
}

}  // namespace qit::protocols
