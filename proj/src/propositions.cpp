#include "qit/propositions.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>

namespace qit::props {

namespace {

std::vector<cplx> letter_entries(Pauli p) {
  switch (p) {
    case Pauli::I: return {{1, 0}, {0, 0}, {0, 0}, {1, 0}};
    case Pauli::X: return {{0, 0}, {1, 0}, {1, 0}, {0, 0}};
    case Pauli::Y: return {{0, 0}, {0, -1}, {0, 1}, {0, 0}};
    case Pauli::Z: return {{1, 0}, {0, 0}, {0, 0}, {-1, 0}};
  }
  raise(errc::bad_value, "unknown Pauli letter");
}

// Anti-commutation parity: strings anti-commute iff the number of sites where
// both letters are non-identity and different is odd.
bool commutes(const Proposition& a, const Proposition& b) {
  int clashes = 0;
  for (std::size_t i = 0; i < a.letters.size(); ++i) {
    const Pauli p = a.letters[i];
    const Pauli q = b.letters[i];
    if (p != Pauli::I && q != Pauli::I && p != q) ++clashes;
  }
  return clashes % 2 == 0;
}

// Symplectic F2 encoding: per site, an (x,z) bit pair. The product of a
// subset is proportional to identity iff the XOR of encodings vanishes.
std::uint64_t symplectic_bits(const Proposition& p) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < p.letters.size(); ++i) {
    std::uint64_t x = 0, z = 0;
    switch (p.letters[i]) {
      case Pauli::I: break;
      case Pauli::X: x = 1; break;
      case Pauli::Y: x = 1; z = 1; break;
      case Pauli::Z: z = 1; break;
    }
    bits |= (x << (2 * i)) | (z << (2 * i + 1));
  }
  return bits;
}

std::string prop_name(const Proposition& p, int index) {
  if (!p.label.empty()) return p.label;
  std::string s;
  for (Pauli l : p.letters) s += static_cast<char>(l);
  return s + "#" + std::to_string(index);
}

// Smallest dependent subset by exhaustive scan; feasible for N <= 4.
std::vector<int> dependent_subset_exhaustive(const std::vector<std::uint64_t>& enc) {
  const int m = static_cast<int>(enc.size());
  for (int size = 1; size <= m; ++size) {
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
      if (std::popcount(mask) != size) continue;
      std::uint64_t acc = 0;
      for (int i = 0; i < m; ++i)
        if (mask & (1u << i)) acc ^= enc[i];
      if (acc == 0) {
        std::vector<int> out;
        for (int i = 0; i < m; ++i)
          if (mask & (1u << i)) out.push_back(i);
        return out;
      }
    }
  }
  return {};
}

// Gaussian elimination over F2 with row tracking; returns the members of the
// first dependency found, or empty if the encodings are independent.
std::vector<int> dependent_subset_rank(const std::vector<std::uint64_t>& enc) {
  struct Row {
    std::uint64_t bits;
    std::uint32_t members;  // original indices folded into this row
  };
  std::vector<Row> pivots;  // one row per distinct lowest set bit
  for (std::size_t i = 0; i < enc.size(); ++i) {
    Row r{enc[i], 1u << i};
    while (r.bits != 0) {
      const std::uint64_t low = r.bits & (~r.bits + 1);
      auto hit = std::find_if(pivots.begin(), pivots.end(), [low](const Row& p) {
        return (p.bits & (~p.bits + 1)) == low;
      });
      if (hit == pivots.end()) {
        pivots.push_back(r);
        break;
      }
      r.bits ^= hit->bits;
      r.members ^= hit->members;
    }
    if (r.bits == 0) {
      std::vector<int> out;
      for (int j = 0; j < 32; ++j)
        if (r.members & (1u << j)) out.push_back(j);
      return out;
    }
  }
  return {};
}

}  // namespace

Proposition::Proposition(std::vector<Pauli> letters_in, bool truth_in, std::string label_in)
    : letters(std::move(letters_in)), truth(truth_in), label(std::move(label_in)) {
  if (letters.empty()) raise(errc::bad_length, "proposition with no letters");
  if (static_cast<int>(letters.size()) > kMaxSystems)
    raise(errc::bad_length, "proposition exceeds 12 systems");
  if (weight() == 0) raise(errc::bad_value, "proposition has no non-identity letter");
}

int Proposition::weight() const {
  int w = 0;
  for (Pauli l : letters)
    if (l != Pauli::I) ++w;
  return w;
}

Operator proposition_operator(const Proposition& p) {
  Operator op = Operator::hermitian(letter_entries(p.letters.front()));
  for (std::size_t i = 1; i < p.letters.size(); ++i)
    op = op.tensor(Operator::hermitian(letter_entries(p.letters[i])));
  // Pauli strings are Hermitian involutions; restore the tag lost to tensor().
  return Operator::hermitian(op.entries());
}

SetReport check_set(const PropositionSet& ps) {
  SetReport report;
  if (ps.num_systems < 1 || ps.num_systems > kMaxSystems) {
    report.rule = SetReport::Rule::wrong_count;
    report.message = "system count must be between 1 and 12";
    return report;
  }
  if (static_cast<int>(ps.propositions.size()) != ps.num_systems) {
    report.rule = SetReport::Rule::wrong_count;
    report.message = std::to_string(ps.propositions.size()) + " propositions for " +
                     std::to_string(ps.num_systems) + " systems";
    return report;
  }
  for (int i = 0; i < ps.num_systems; ++i) {
    if (ps.propositions[i].num_systems() != ps.num_systems) {
      report.rule = SetReport::Rule::wrong_count;
      report.indices = {i};
      report.message = "proposition " + prop_name(ps.propositions[i], i) + " has " +
                       std::to_string(ps.propositions[i].num_systems()) + " letters, expected " +
                       std::to_string(ps.num_systems);
      return report;
    }
  }
  for (int i = 0; i < ps.num_systems; ++i) {
    for (int j = i + 1; j < ps.num_systems; ++j) {
      if (!commutes(ps.propositions[i], ps.propositions[j])) {
        report.rule = SetReport::Rule::non_commuting_pair;
        report.indices = {i, j};
        report.message = prop_name(ps.propositions[i], i) + " and " +
                         prop_name(ps.propositions[j], j) + " anti-commute";
        return report;
      }
    }
  }
  std::vector<std::uint64_t> enc(ps.propositions.size());
  for (std::size_t i = 0; i < enc.size(); ++i) enc[i] = symplectic_bits(ps.propositions[i]);
  const std::vector<int> dep =
      ps.num_systems <= 4 ? dependent_subset_exhaustive(enc) : dependent_subset_rank(enc);
  if (!dep.empty()) {
    report.rule = SetReport::Rule::dependent_subset;
    report.indices = dep;
    std::string names;
    for (int i : dep) names += (names.empty() ? "" : ", ") + prop_name(ps.propositions[i], i);
    report.message = "product of {" + names + "} is proportional to identity";
    return report;
  }
  return report;
}

StateVector state_from_propositions(const PropositionSet& ps) {
  const SetReport report = check_set(ps);
  if (!report.ok()) raise(errc::inconsistent_propositions, report.message);
  const std::size_t dim = std::size_t{1} << ps.num_systems;
  Operator projector = Operator::identity(ps.num_systems);
  for (const Proposition& p : ps.propositions) {
    const double t = p.truth ? 1.0 : -1.0;
    const Operator half =
        (Operator::identity(ps.num_systems) + proposition_operator(p).scaled(t)).scaled(0.5);
    projector = projector * half;
  }
  cplx tr{0, 0};
  for (std::size_t i = 0; i < dim; ++i) tr += projector.entry(i, i);
  if (std::abs(tr - cplx{1, 0}) > kChainedTol)
    raise(errc::rank_error, "proposition projector is not rank 1");
  // A rank-1 projector's columns are all proportional to the fixed state;
  // take the largest for numerical headroom.
  std::size_t best_col = 0;
  double best_norm = -1;
  for (std::size_t col = 0; col < dim; ++col) {
    double norm_sq = 0;
    for (std::size_t row = 0; row < dim; ++row) norm_sq += std::norm(projector.entry(row, col));
    if (norm_sq > best_norm) {
      best_norm = norm_sq;
      best_col = col;
    }
  }
  if (best_norm < 1e-16) raise(errc::rank_error, "proposition projector has no nonzero column");
  std::vector<cplx> amps(dim);
  for (std::size_t row = 0; row < dim; ++row) amps[row] = projector.entry(row, best_col);
  return make_state(std::move(amps));
}

double truth_probability(const StateVector& s, const Proposition& p) {
  if (p.num_systems() != s.num_systems())
    raise(errc::dimension_mismatch, "proposition letter count does not match state");
  const Operator op = proposition_operator(p);
  std::vector<int> sites(p.num_systems());
  for (int i = 0; i < p.num_systems(); ++i) sites[i] = i;
  const StateVector acted = apply_operator(op, sites, s);
  const double expectation = inner_product(s, acted).real();
  // P(S = t) for the asserted sign t, not P(S = +1).
  return 0.5 * (1.0 + (p.truth ? expectation : -expectation));
}

SetClassification classify_set(const PropositionSet& ps) {
  const SetReport report = check_set(ps);
  if (!report.ok()) raise(errc::inconsistent_propositions, report.message);
  bool all_individual = true;
  bool all_joint = true;
  for (const Proposition& p : ps.propositions) {
    if (p.weight() == 1)
      all_joint = false;
    else
      all_individual = false;
  }
  SetCategory category = SetCategory::mixed;
  if (all_individual) category = SetCategory::individual;
  else if (all_joint) category = SetCategory::joint;

  const StateVector s = state_from_propositions(ps);
  bool entangled = false;
  for (int site = 0; site < ps.num_systems && !entangled; ++site) {
    if (ps.num_systems == 1) break;  // a single system is never entangled
    const DensityMatrix reduced = partial_trace(s, {site});
    if (reduced.purity() < 1.0 - kChainedTol) entangled = true;
  }
  return SetClassification{category, entangled};
}

PropositionSet parse_propositions(const std::string& text) {
  std::vector<std::string> pieces;
  std::string current;
  for (char c : text) {
    if (c == '\n' || c == ',' || c == ';') {
      pieces.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  pieces.push_back(current);

  std::vector<Proposition> out;
  for (const std::string& piece : pieces) {
    std::string compact;
    for (char c : piece)
      if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
    if (compact.empty()) continue;
    const auto eq = compact.find('=');
    if (eq == std::string::npos)
      raise(errc::bad_config, "proposition '" + piece + "' is missing '='");
    const std::string letters_text = compact.substr(0, eq);
    const std::string value_text = compact.substr(eq + 1);
    if (letters_text.empty()) raise(errc::bad_config, "proposition with no letters");
    bool truth;
    if (value_text == "+1" || value_text == "1") truth = true;
    else if (value_text == "-1") truth = false;
    else raise(errc::bad_config, "proposition value must be +1 or -1, got '" + value_text + "'");
    std::vector<Pauli> letters;
    for (char c : letters_text) {
      switch (std::toupper(static_cast<unsigned char>(c))) {
        case 'I': letters.push_back(Pauli::I); break;
        case 'X': letters.push_back(Pauli::X); break;
        case 'Y': letters.push_back(Pauli::Y); break;
        case 'Z': letters.push_back(Pauli::Z); break;
        default: raise(errc::bad_config, std::string("unknown letter '") + c + "'");
      }
    }
    bool any = false;
    for (Pauli l : letters)
      if (l != Pauli::I) any = true;
    if (!any) raise(errc::bad_config, "proposition '" + compact + "' has no non-identity letter");
    std::string label = letters_text + " = " + (truth ? "+1" : "-1");
    for (char& c : label) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    out.emplace_back(std::move(letters), truth, std::move(label));
  }
  if (out.empty()) raise(errc::bad_config, "no propositions given");
  for (const Proposition& p : out) {
    if (p.num_systems() != out.front().num_systems())
      raise(errc::bad_config, "propositions have different letter counts");
  }
  return PropositionSet{out.front().num_systems(), std::move(out)};
}

std::string to_text(const PropositionSet& ps) {
  std::string out;
  for (const Proposition& p : ps.propositions) {
    if (!out.empty()) out += "\n";
    for (Pauli l : p.letters) out += static_cast<char>(l);
    out += p.truth ? " = +1" : " = -1";
  }
  return out;
}

}  // namespace qit::props
