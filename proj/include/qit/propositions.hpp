#pragma once

#include <string>
#include <vector>

#include "qit/qmath.hpp"

namespace qit::props {

enum class Pauli : char { I = 'I', X = 'X', Y = 'Y', Z = 'Z' };

// A yes/no claim about N systems: a Pauli string plus an asserted eigenvalue,
// truth = true meaning +1 and false meaning -1. At least one letter is non-identity.
struct Proposition {
  std::vector<Pauli> letters;
  bool truth;
  std::string label;

  Proposition(std::vector<Pauli> letters, bool truth, std::string label = "");

  int num_systems() const { return static_cast<int>(letters.size()); }
  int weight() const;  // non-identity letter count
};

struct PropositionSet {
  int num_systems;
  std::vector<Proposition> propositions;
};

struct SetReport {
  enum class Rule { ok, wrong_count, non_commuting_pair, dependent_subset };
  Rule rule = Rule::ok;
  std::vector<int> indices;  // offending proposition indices
  std::string message;

  bool ok() const { return rule == Rule::ok; }
};

// Tensor product of the letters as a 2^N-dimensional Hermitian operator.
Operator proposition_operator(const Proposition& p);

// Validates in order: proposition count and letter lengths equal N, pairwise
// commutation, independence (no nonempty subset whose product is +/-identity).
// Independence is checked exhaustively for N <= 4 and by rank over F2 beyond.
SetReport check_set(const PropositionSet& ps);

// The unique state satisfying a valid set, via the rank-1 projector
// prod_i (identity + t_i S_i) / 2. Throws inconsistent_propositions if the
// set fails check_set, rank_error if the projector is not rank 1.
StateVector state_from_propositions(const PropositionSet& ps);

// Born probability that measuring the proposition's observable yields +1.
double truth_probability(const StateVector& s, const Proposition& p);

enum class SetCategory { individual, joint, mixed };

struct SetClassification {
  SetCategory category;
  bool entangled;
};

// individual: every proposition touches exactly one site; joint: every
// proposition touches two or more; mixed otherwise. entangled: some site of
// the constructed state has single-site purity below 1 - 1e-10.
SetClassification classify_set(const PropositionSet& ps);

// Text form, one proposition per line or comma/semicolon separated:
// "<letters> = <+1|-1>", e.g. "ZZ = -1". Whitespace- and case-insensitive.
PropositionSet parse_propositions(const std::string& text);
std::string to_text(const PropositionSet& ps);

}  // namespace qit::props
