#include "qit/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace qit {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n) {
  int k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

void require_finite(const std::vector<cplx>& v) {
  for (const cplx& a : v) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      raise(errc::bad_value, "non-finite amplitude");
  }
}

std::size_t matrix_dim(const std::vector<cplx>& entries) {
  const auto n = entries.size();
  std::size_t d = 1;
  while (d * d < n) ++d;
  if (d * d != n) raise(errc::bad_length, "matrix entries are not square");
  if (!is_power_of_two(d) || d < 2) raise(errc::bad_length, "matrix dimension must be 2^k, k >= 1");
  return d;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<cplx> matmul(const std::vector<cplx>& a, const std::vector<cplx>& b, std::size_t d) {
  std::vector<cplx> out(d * d, cplx{0, 0});
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      const cplx aik = a[i * d + k];
      if (aik == cplx{0, 0}) continue;
      for (std::size_t j = 0; j < d; ++j) out[i * d + j] += aik * b[k * d + j];
    }
  return out;
}

std::vector<cplx> dagger(const std::vector<cplx>& a, std::size_t d) {
  std::vector<cplx> out(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out[j * d + i] = std::conj(a[i * d + j]);
  return out;
}

std::vector<cplx> identity_entries(std::size_t d) {
  std::vector<cplx> out(d * d, cplx{0, 0});
  for (std::size_t i = 0; i < d; ++i) out[i * d + i] = 1;
  return out;
}

}  // namespace

namespace detail {

// Cyclic Jacobi on a Hermitian matrix; eigenvalues only. 2x2 uses the
// closed form. Convergence target: max off-diagonal modulus <= 1e-13.
std::vector<double> hermitian_eigenvalues(std::vector<cplx> entries, std::size_t dim) {
  if (dim == 1) return {entries[0].real()};
  if (dim == 2) {
    const double a = entries[0].real();
    const double d = entries[3].real();
    const double mean = 0.5 * (a + d);
    const double r = std::hypot(0.5 * (a - d), std::abs(entries[1]));
    return {mean - r, mean + r};
  }
  auto at = [&](std::size_t i, std::size_t j) -> cplx& { return entries[i * dim + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t p = 0; p < dim; ++p)
      for (std::size_t q = p + 1; q < dim; ++q) off = std::max(off, std::abs(at(p, q)));
    if (off <= kJacobiThreshold) break;
    for (std::size_t p = 0; p < dim; ++p) {
      for (std::size_t q = p + 1; q < dim; ++q) {
        const cplx gamma = at(p, q);
        const double g = std::abs(gamma);
        if (g <= kJacobiThreshold) continue;
        const cplx phase = gamma / g;
        const double alpha = at(p, p).real();
        const double beta = at(q, q).real();
        const double tau = (alpha - beta) / (2 * g);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1 + tau * tau));
        const double c = 1 / std::sqrt(1 + t * t);
        const double s = t * c;
        // Unitary G: columns (p,q) -> (c*e_p + s*conj(phase)*e_q, -s*phase*e_p + c*e_q).
        for (std::size_t k = 0; k < dim; ++k) {
          const cplx hkp = at(k, p);
          const cplx hkq = at(k, q);
          at(k, p) = c * hkp + s * std::conj(phase) * hkq;
          at(k, q) = -s * phase * hkp + c * hkq;
        }
        for (std::size_t k = 0; k < dim; ++k) {
          const cplx hpk = at(p, k);
          const cplx hqk = at(q, k);
          at(p, k) = c * hpk + s * phase * hqk;
          at(q, k) = -s * std::conj(phase) * hpk + c * hqk;
        }
        at(p, q) = 0;
        at(q, p) = 0;
      }
    }
  }
  std::vector<double> eigs(dim);
  for (std::size_t i = 0; i < dim; ++i) eigs[i] = at(i, i).real();
  std::sort(eigs.begin(), eigs.end());
  return eigs;
}

std::vector<cplx> apply_matrix(const std::vector<cplx>& op_entries, int op_sites,
                               const std::vector<int>& sites, int num_systems,
                               const std::vector<cplx>& amps) {
  const std::size_t dim = amps.size();
  const std::size_t op_dim = std::size_t{1} << op_sites;
  std::uint64_t target_mask = 0;
  std::vector<int> shifts(sites.size());
  for (std::size_t j = 0; j < sites.size(); ++j) {
    shifts[j] = site_shift(num_systems, sites[j]);
    target_mask |= std::uint64_t{1} << shifts[j];
  }
  // Scatter a local label's bits into the full index (local MSB = first site).
  auto scatter = [&](std::size_t local) {
    std::uint64_t out = 0;
    for (std::size_t j = 0; j < shifts.size(); ++j) {
      const std::uint64_t bit = (local >> (op_sites - 1 - static_cast<int>(j))) & 1u;
      out |= bit << shifts[j];
    }
    return out;
  };
  std::vector<std::uint64_t> offsets(op_dim);
  for (std::size_t a = 0; a < op_dim; ++a) offsets[a] = scatter(a);

  std::vector<cplx> out(dim, cplx{0, 0});
  std::vector<cplx> local(op_dim);
  for (std::uint64_t base = 0; base < dim; ++base) {
    if (base & target_mask) continue;
    for (std::size_t b = 0; b < op_dim; ++b) local[b] = amps[base | offsets[b]];
    for (std::size_t a = 0; a < op_dim; ++a) {
      cplx acc{0, 0};
      const cplx* row = &op_entries[a * op_dim];
      for (std::size_t b = 0; b < op_dim; ++b) acc += row[b] * local[b];
      out[base | offsets[a]] = acc;
    }
  }
  return out;
}

}  // namespace detail

cplx StateVector::amplitude(std::size_t basis) const {
  if (basis >= amps_.size()) raise(errc::bad_value, "basis label out of range");
  return amps_[basis];
}

double StateVector::norm_squared() const {
  double n = 0;
  for (const cplx& a : amps_) n += std::norm(a);
  return n;
}

StateVector make_state(std::vector<cplx> raw) {
  if (raw.size() < 2 || !is_power_of_two(raw.size()))
    raise(errc::bad_length, "amplitude count must be a power of two >= 2");
  const int n = log2_exact(raw.size());
  if (n > kMaxSystems) raise(errc::bad_length, "more than 12 systems");
  require_finite(raw);
  double norm_sq = 0;
  for (const cplx& a : raw) norm_sq += std::norm(a);
  if (norm_sq <= 1e-24) raise(errc::zero_norm, "all amplitudes vanish");
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (cplx& a : raw) a *= inv;
  return StateVector(StateVector::Trusted{}, n, std::move(raw));
}

StateVector basis_state(int num_systems, std::size_t label) {
  if (num_systems < 1 || num_systems > kMaxSystems)
    raise(errc::bad_length, "system count out of range");
  const std::size_t dim = std::size_t{1} << num_systems;
  if (label >= dim) raise(errc::bad_value, "basis label out of range");
  std::vector<cplx> amps(dim, cplx{0, 0});
  amps[label] = 1;
  return StateVector(StateVector::Trusted{}, num_systems, std::move(amps));
}

StateVector tensor_product(const StateVector& a, const StateVector& b) {
  const int n = a.num_systems() + b.num_systems();
  if (n > kMaxSystems) raise(errc::bad_length, "tensor product exceeds 12 systems");
  std::vector<cplx> amps(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j)
      amps[i * b.dim() + j] = a.amplitudes()[i] * b.amplitudes()[j];
  return StateVector(StateVector::Trusted{}, n, std::move(amps));
}

cplx inner_product(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) raise(errc::dimension_mismatch, "inner product dimensions differ");
  cplx acc{0, 0};
  for (std::size_t i = 0; i < a.dim(); ++i)
    acc += std::conj(a.amplitudes()[i]) * b.amplitudes()[i];
  return acc;
}

double fidelity(const StateVector& a, const StateVector& b) {
  return std::norm(inner_product(a, b));
}

StateVector apply_operator(const Operator& op, const std::vector<int>& sites,
                           const StateVector& s) {
  if (sites.empty()) raise(errc::bad_sites, "no target sites");
  if (static_cast<std::size_t>(op.num_sites()) != sites.size())
    raise(errc::dimension_mismatch, "operator size does not match target count");
  std::vector<bool> seen(s.num_systems(), false);
  for (int site : sites) {
    if (site < 0 || site >= s.num_systems()) raise(errc::bad_sites, "site out of range");
    if (seen[site]) raise(errc::bad_sites, "duplicate target site");
    seen[site] = true;
  }
  std::vector<cplx> out = detail::apply_matrix(op.entries(), op.num_sites(), sites,
                                               s.num_systems(), s.amplitudes());
  if (op.kind() == Operator::Kind::projector) {
    double norm_sq = 0;
    for (const cplx& a : out) norm_sq += std::norm(a);
    if (norm_sq <= 1e-24) raise(errc::zero_norm, "projector annihilated the state");
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (cplx& a : out) a *= inv;
  }
  return StateVector(StateVector::Trusted{}, s.num_systems(), std::move(out));
}

Operator Operator::checked(Kind kind, std::vector<cplx> entries) {
  const std::size_t d = matrix_dim(entries);
  require_finite(entries);
  switch (kind) {
    case Kind::unitary: {
      const auto prod = matmul(dagger(entries, d), entries, d);
      if (max_abs_diff(prod, identity_entries(d)) > kAlgebraTol)
        raise(errc::bad_value, "matrix is not unitary");
      break;
    }
    case Kind::hermitian: {
      if (max_abs_diff(entries, dagger(entries, d)) > kAlgebraTol)
        raise(errc::bad_value, "matrix is not hermitian");
      break;
    }
    case Kind::projector: {
      if (max_abs_diff(entries, dagger(entries, d)) > kAlgebraTol)
        raise(errc::bad_value, "projector is not hermitian");
      if (max_abs_diff(matmul(entries, entries, d), entries) > kAlgebraTol)
        raise(errc::bad_value, "projector is not idempotent");
      break;
    }
    case Kind::general:
      break;
  }
  return Operator(kind, log2_exact(d), std::move(entries));
}

Operator Operator::unitary(std::vector<cplx> entries) {
  return checked(Kind::unitary, std::move(entries));
}
Operator Operator::hermitian(std::vector<cplx> entries) {
  return checked(Kind::hermitian, std::move(entries));
}
Operator Operator::projector(std::vector<cplx> entries) {
  return checked(Kind::projector, std::move(entries));
}
Operator Operator::general(std::vector<cplx> entries) {
  return checked(Kind::general, std::move(entries));
}

Operator Operator::identity(int num_sites) {
  if (num_sites < 1 || num_sites > kMaxSystems) raise(errc::bad_length, "site count out of range");
  return Operator(Kind::unitary, num_sites, identity_entries(std::size_t{1} << num_sites));
}

Operator Operator::adjoint() const {
  return Operator(Kind::general, num_sites_, dagger(entries_, dim_));
}

Operator Operator::operator*(const Operator& rhs) const {
  if (dim_ != rhs.dim_) raise(errc::dimension_mismatch, "operator product dimensions differ");
  return Operator(Kind::general, num_sites_, matmul(entries_, rhs.entries_, dim_));
}

Operator Operator::operator+(const Operator& rhs) const {
  if (dim_ != rhs.dim_) raise(errc::dimension_mismatch, "operator sum dimensions differ");
  std::vector<cplx> out(entries_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += rhs.entries_[i];
  return Operator(Kind::general, num_sites_, std::move(out));
}

Operator Operator::scaled(cplx factor) const {
  std::vector<cplx> out(entries_);
  for (cplx& e : out) e *= factor;
  return Operator(Kind::general, num_sites_, std::move(out));
}

Operator Operator::tensor(const Operator& rhs) const {
  const int n = num_sites_ + rhs.num_sites_;
  if (n > kMaxSystems) raise(errc::bad_length, "tensor product exceeds 12 sites");
  const std::size_t d = dim_ * rhs.dim_;
  std::vector<cplx> out(d * d);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j)
      for (std::size_t k = 0; k < rhs.dim_; ++k)
        for (std::size_t l = 0; l < rhs.dim_; ++l)
          out[(i * rhs.dim_ + k) * d + (j * rhs.dim_ + l)] =
              entries_[i * dim_ + j] * rhs.entries_[k * rhs.dim_ + l];
  return Operator(Kind::general, n, std::move(out));
}

DensityMatrix DensityMatrix::from_entries(std::vector<cplx> entries) {
  const std::size_t d = matrix_dim(entries);
  require_finite(entries);
  if (max_abs_diff(entries, dagger(entries, d)) > kAlgebraTol)
    raise(errc::bad_value, "density matrix is not hermitian");
  cplx tr{0, 0};
  for (std::size_t i = 0; i < d; ++i) tr += entries[i * d + i];
  if (std::abs(tr - cplx{1, 0}) > kAlgebraTol) raise(errc::bad_value, "trace is not 1");
  const auto eigs = detail::hermitian_eigenvalues(entries, d);
  if (eigs.front() < -kPsdTol) raise(errc::bad_value, "negative eigenvalue");
  return DensityMatrix(Trusted{}, d, std::move(entries));
}

DensityMatrix DensityMatrix::pure(const StateVector& s) {
  const std::size_t d = s.dim();
  std::vector<cplx> entries(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      entries[i * d + j] = s.amplitudes()[i] * std::conj(s.amplitudes()[j]);
  return DensityMatrix(Trusted{}, d, std::move(entries));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  if (!is_power_of_two(dim) || dim < 2) raise(errc::bad_length, "dimension must be 2^k, k >= 1");
  std::vector<cplx> entries(dim * dim, cplx{0, 0});
  for (std::size_t i = 0; i < dim; ++i) entries[i * dim + i] = 1.0 / static_cast<double>(dim);
  return DensityMatrix(Trusted{}, dim, std::move(entries));
}

double DensityMatrix::purity() const {
  double p = 0;
  for (const cplx& e : entries_) p += std::norm(e);
  return p;
}

std::vector<double> DensityMatrix::eigenvalues() const {
  return detail::hermitian_eigenvalues(entries_, dim_);
}

DensityMatrix partial_trace(const StateVector& s, const std::vector<int>& keep_sites) {
  if (keep_sites.empty()) raise(errc::bad_sites, "keep_sites is empty");
  const int n = s.num_systems();
  std::vector<bool> kept(n, false);
  for (int site : keep_sites) {
    if (site < 0 || site >= n) raise(errc::bad_sites, "site out of range");
    if (kept[site]) raise(errc::bad_sites, "duplicate site");
    kept[site] = true;
  }
  const int k = static_cast<int>(keep_sites.size());
  std::vector<int> keep_shifts(k);
  for (int j = 0; j < k; ++j) keep_shifts[j] = detail::site_shift(n, keep_sites[j]);
  std::vector<int> rest_shifts;
  for (int site = 0; site < n; ++site)
    if (!kept[site]) rest_shifts.push_back(detail::site_shift(n, site));

  auto scatter = [](const std::vector<int>& shifts, std::size_t label) {
    std::uint64_t out = 0;
    const int m = static_cast<int>(shifts.size());
    for (int j = 0; j < m; ++j) out |= ((label >> (m - 1 - j)) & 1u) << shifts[j];
    return out;
  };

  const std::size_t rdim = std::size_t{1} << k;
  const std::size_t rest_dim = std::size_t{1} << rest_shifts.size();
  std::vector<std::uint64_t> keep_offsets(rdim), rest_offsets(rest_dim);
  for (std::size_t a = 0; a < rdim; ++a) keep_offsets[a] = scatter(keep_shifts, a);
  for (std::size_t r = 0; r < rest_dim; ++r) rest_offsets[r] = scatter(rest_shifts, r);

  std::vector<cplx> entries(rdim * rdim, cplx{0, 0});
  const auto& amps = s.amplitudes();
  for (std::size_t a = 0; a < rdim; ++a)
    for (std::size_t b = 0; b < rdim; ++b) {
      cplx acc{0, 0};
      for (std::size_t r = 0; r < rest_dim; ++r)
        acc += amps[keep_offsets[a] | rest_offsets[r]] *
               std::conj(amps[keep_offsets[b] | rest_offsets[r]]);
      entries[a * rdim + b] = acc;
    }
  return DensityMatrix(DensityMatrix::Trusted{}, rdim, std::move(entries));
}

double trace_distance(const DensityMatrix& r, const DensityMatrix& s) {
  if (r.dim() != s.dim()) raise(errc::dimension_mismatch, "trace distance dimensions differ");
  std::vector<cplx> diff(r.entries());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= s.entries()[i];
  const auto eigs = detail::hermitian_eigenvalues(std::move(diff), r.dim());
  double sum = 0;
  for (double e : eigs) sum += std::abs(e);
  return 0.5 * sum;
}

Operator projector_onto(const StateVector& s) {
  const std::size_t d = s.dim();
  std::vector<cplx> entries(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      entries[i * d + j] = s.amplitudes()[i] * std::conj(s.amplitudes()[j]);
  return Operator::projector(std::move(entries));
}

DensityMatrix mixture(const std::vector<std::pair<double, DensityMatrix>>& parts) {
  if (parts.empty()) raise(errc::bad_length, "mixture of nothing");
  const std::size_t d = parts.front().second.dim();
  double total = 0;
  std::vector<cplx> entries(d * d, cplx{0, 0});
  for (const auto& [w, rho] : parts) {
    if (rho.dim() != d) raise(errc::dimension_mismatch, "mixture dimensions differ");
    if (w < -kAlgebraTol) raise(errc::bad_value, "negative mixture weight");
    total += w;
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i] += w * rho.entries()[i];
  }
  if (std::abs(total - 1.0) > kChainedTol) raise(errc::bad_value, "mixture weights do not sum to 1");
  return DensityMatrix::from_entries(std::move(entries));
}

}  // namespace qit
