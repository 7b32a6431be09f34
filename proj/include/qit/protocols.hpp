#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "qit/measurement.hpp"
#include "qit/qmath.hpp"
#include "qit/random.hpp"

namespace qit::protocols {

using measurement::Direction;

// Bell basis in fixed order: Phi+, Phi-, Psi+, Psi- (indices 0..3).
std::array<StateVector, 4> bell_basis();

// Born probabilities of the four Bell outcomes on sites (site_a, site_b).
std::array<double, 4> bell_outcome_probabilities(const StateVector& s, int site_a, int site_b);

struct BsmResult {
  int outcome;  // Bell index 0..3
  StateVector collapsed;
};

// Joint projective measurement of two sites in the Bell basis.
BsmResult bell_state_measurement(const StateVector& s, int site_a, int site_b,
                                 RandomSource& rng);

enum class Correction { identity, pauli_x, pauli_z, pauli_xz };

const char* to_string(Correction c);

// Bob's fix-up for each Bell outcome, with the Psi- resource pair:
// Psi- -> identity, Psi+ -> Z, Phi- -> X, Phi+ -> XZ (all up to global phase).
Correction correction_for_outcome(int bell_outcome);
Operator correction_operator(Correction c);

struct TeleportTranscript {
  StateVector input_state;
  int bsm_outcome;
  double branch_probability;
  Correction correction;
  StateVector bob_state;
  double fidelity_achieved;
  // Bob's marginal averaged over the four outcomes, i.e. his state before
  // Alice's classical message arrives.
  DensityMatrix bob_premessage_reduced;
  StateVector final_state;  // all three systems, after correction
};

// Teleports a single-system state over a Psi- resource pair; the Bell
// outcome is sampled with Born probabilities.
TeleportTranscript teleport(const StateVector& input, RandomSource& rng);

// Deterministic variant that forces one Bell branch; used to audit all four
// correction paths exhaustively.
TeleportTranscript teleport_branch(const StateVector& input, int forced_outcome);

// trace_distance(bob_premessage_reduced, identity/2); < 1e-10 means Bob's
// side carries no information before the classical message.
double nosignaling_audit(const TeleportTranscript& t);

struct TeleportBatchStats {
  std::int64_t n_trials = 0;
  std::array<std::int64_t, 4> outcome_counts{};
  double min_fidelity = 0;
  double mean_fidelity = 0;
  double mean_fidelity_std_error = 0;
  double max_nosignaling_distance = 0;
};

// Independent teleports of per-trial random input states (uniform on the
// Bloch sphere). Per-trial substreams make any jobs count bit-identical.
TeleportBatchStats run_teleport_trials(std::int64_t n_trials, RandomSource& rng, int jobs = 1);

struct Channel {
  static Channel ideal() { return Channel{std::nullopt}; }
  static Channel intercept_resend(Direction d) { return Channel{d}; }

  std::optional<Direction> eavesdropper;  // measures Alice's particle, forwards the eigenstate
};

// Alice picks uniformly from {z, x}; Bob from {z, x, planar(pi/4), planar(3pi/4)}.
const std::vector<Direction>& alice_menu();
const std::vector<Direction>& bob_menu();

struct QkdSession {
  std::int64_t n_pairs = 0;
  std::vector<std::int8_t> alice_settings;  // menu indices
  std::vector<std::int8_t> bob_settings;
  std::vector<std::int8_t> alice_outcomes;  // +1/-1
  std::vector<std::int8_t> bob_outcomes;
  std::vector<std::int8_t> sifted_key_alice;  // bits
  std::vector<std::int8_t> sifted_key_bob;    // Bob's outcome sign flipped (anti-correlation)
  double qber = 0;
  double s_estimate = 0;     // CHSH over the four test setting pairs
  double s_std_error = 0;
  std::int64_t n_test_rounds = 0;
  bool intercepted = false;
  double eve_polar = 0;
  double eve_azimuth = 0;
};

// Entanglement-based key distribution over singlet pairs. Matching settings
// sift keys; Alice x {Bob pi/4, 3pi/4} rounds estimate CHSH on
// anti-correlation-adjusted outcomes (ideal channel: qber 0, s = 2 sqrt 2).
QkdSession e91_run(std::int64_t n_pairs, const Channel& channel, RandomSource& rng);

// One random bit per measurement of a fresh |+z> along x: +1 -> 1, -1 -> 0.
std::vector<std::int8_t> qrng_bits(std::int64_t n_bits, RandomSource& rng);

}  // namespace qit::protocols
