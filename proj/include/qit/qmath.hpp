#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "qit/error.hpp"

namespace qit {

using cplx = std::complex<double>;

// Tolerances shared across the library.
inline constexpr double kAlgebraTol = 1e-12;    // single algebraic identities
inline constexpr double kChainedTol = 1e-10;    // chained constructions
inline constexpr double kPsdTol = 1e-10;        // eigenvalue floor for density matrices
inline constexpr double kJacobiThreshold = 1e-13;  // off-diagonal convergence target
inline constexpr double kCertaintyTol = 1e-12;  // probabilities this close to 0/1 are certain
inline constexpr int kMaxSystems = 12;

namespace detail {

// Site 0 owns the most significant bit of a basis label.
inline int site_shift(int num_systems, int site) { return num_systems - 1 - site; }

std::vector<double> hermitian_eigenvalues(std::vector<cplx> entries, std::size_t dim);

// op acting on `sites` (first listed site = most significant bit of the
// operator's local index), identity elsewhere. No normalization.
std::vector<cplx> apply_matrix(const std::vector<cplx>& op_entries, int op_sites,
                               const std::vector<int>& sites, int num_systems,
                               const std::vector<cplx>& amps);

}  // namespace detail

class Operator;

// Pure state of num_systems two-level systems. Amplitudes are indexed by
// basis labels whose most significant bit belongs to site 0. Instances are
// normalized: sum |a|^2 = 1 within 1e-12.
class StateVector {
 public:
  int num_systems() const { return num_systems_; }
  std::size_t dim() const { return amps_.size(); }
  const std::vector<cplx>& amplitudes() const { return amps_; }
  cplx amplitude(std::size_t basis) const;
  double norm_squared() const;

 private:
  struct Trusted {};
  StateVector(Trusted, int num_systems, std::vector<cplx> amps)
      : num_systems_(num_systems), amps_(std::move(amps)) {}

  int num_systems_;
  std::vector<cplx> amps_;

  friend StateVector make_state(std::vector<cplx> raw);
  friend StateVector basis_state(int num_systems, std::size_t label);
  friend StateVector tensor_product(const StateVector& a, const StateVector& b);
  friend class Operator;
  friend StateVector apply_operator(const Operator& op, const std::vector<int>& sites,
                                    const StateVector& s);
};

// Square matrix on k two-level systems, tagged with the structural claim its
// factory validated. Arithmetic results carry kind::general; revalidate
// through a factory to restore a stronger tag.
class Operator {
 public:
  enum class Kind { unitary, hermitian, projector, general };

  static Operator unitary(std::vector<cplx> entries);
  static Operator hermitian(std::vector<cplx> entries);
  static Operator projector(std::vector<cplx> entries);
  static Operator general(std::vector<cplx> entries);
  static Operator identity(int num_sites);

  Kind kind() const { return kind_; }
  int num_sites() const { return num_sites_; }
  std::size_t dim() const { return dim_; }
  const std::vector<cplx>& entries() const { return entries_; }
  cplx entry(std::size_t row, std::size_t col) const { return entries_[row * dim_ + col]; }

  Operator adjoint() const;
  Operator operator*(const Operator& rhs) const;  // matrix product
  Operator operator+(const Operator& rhs) const;
  Operator scaled(cplx factor) const;
  Operator tensor(const Operator& rhs) const;

 private:
  Operator(Kind kind, int num_sites, std::vector<cplx> entries)
      : kind_(kind), num_sites_(num_sites), dim_(std::size_t{1} << num_sites),
        entries_(std::move(entries)) {}

  static Operator checked(Kind kind, std::vector<cplx> entries);

  Kind kind_;
  int num_sites_;
  std::size_t dim_;
  std::vector<cplx> entries_;
};

// Mixed state: Hermitian, unit trace, eigenvalues >= -1e-10.
class DensityMatrix {
 public:
  static DensityMatrix from_entries(std::vector<cplx> entries);
  static DensityMatrix pure(const StateVector& s);
  static DensityMatrix maximally_mixed(std::size_t dim);

  std::size_t dim() const { return dim_; }
  const std::vector<cplx>& entries() const { return entries_; }
  cplx entry(std::size_t row, std::size_t col) const { return entries_[row * dim_ + col]; }
  double purity() const;  // tr(rho^2)
  std::vector<double> eigenvalues() const;

 private:
  struct Trusted {};
  DensityMatrix(Trusted, std::size_t dim, std::vector<cplx> entries)
      : dim_(dim), entries_(std::move(entries)) {}

  std::size_t dim_;
  std::vector<cplx> entries_;

  friend DensityMatrix partial_trace(const StateVector& s, const std::vector<int>& keep_sites);
};

// Normalizes raw amplitudes into a state. Length must be a power of two
// >= 2 and at most 2^12; all-zero input is rejected, never silently NaN.
StateVector make_state(std::vector<cplx> raw);

// Computational basis state |label> of num_systems systems.
StateVector basis_state(int num_systems, std::size_t label);

StateVector tensor_product(const StateVector& a, const StateVector& b);

// <a|b>, conjugating a.
cplx inner_product(const StateVector& a, const StateVector& b);

// |<a|b>|^2; insensitive to global phase.
double fidelity(const StateVector& a, const StateVector& b);

// op on the listed sites, identity elsewhere. Projector applications are
// renormalized (zero_norm if the branch has probability zero); other kinds
// are applied linearly as-is.
StateVector apply_operator(const Operator& op, const std::vector<int>& sites,
                           const StateVector& s);

// Reduced state over keep_sites (listed order fixes the reduced bit order).
DensityMatrix partial_trace(const StateVector& s, const std::vector<int>& keep_sites);

// (1/2) tr |r - s|.
double trace_distance(const DensityMatrix& r, const DensityMatrix& s);

// |s><s| tagged as a projector.
Operator projector_onto(const StateVector& s);

// Sum of weight * rho over parts; weights must be a probability vector.
DensityMatrix mixture(const std::vector<std::pair<double, DensityMatrix>>& parts);

}  // namespace qit
