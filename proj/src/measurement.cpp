#include "qit/measurement.hpp"

#include <cmath>

namespace qit::measurement {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2 * kPi;

Operator half_projector(const Direction& d, int value) {
  // (I + value * n.sigma) / 2
  const auto n = d.bloch_vector();
  const double v = value;
  std::vector<cplx> e{
      {0.5 * (1 + v * n[2]), 0},
      {0.5 * v * n[0], -0.5 * v * n[1]},
      {0.5 * v * n[0], 0.5 * v * n[1]},
      {0.5 * (1 - v * n[2]), 0},
  };
  return Operator::projector(std::move(e));
}

void require_value(int value) {
  if (value != 1 && value != -1) raise(errc::bad_value, "outcome value must be +1 or -1");
}

void require_site(const StateVector& s, int site) {
  if (site < 0 || site >= s.num_systems()) raise(errc::bad_site, "site out of range");
}

}  // namespace

Direction::Direction(double polar_in, double azimuth_in) : polar(polar_in), azimuth(azimuth_in) {
  if (!std::isfinite(polar) || !std::isfinite(azimuth))
    raise(errc::bad_value, "non-finite direction angle");
  if (polar < -1e-9 || polar > kPi + 1e-9)
    raise(errc::bad_value, "polar angle outside [0, pi]");
  polar = std::min(std::max(polar, 0.0), kPi);
  azimuth = std::fmod(azimuth, kTwoPi);
  if (azimuth < 0) azimuth += kTwoPi;
}

Direction Direction::planar(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0) a += kTwoPi;
  if (a <= kPi) return Direction(a, 0.0);
  return Direction(kTwoPi - a, kPi);
}

std::array<double, 3> Direction::bloch_vector() const {
  return {std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth),
          std::cos(polar)};
}

Direction Direction::antipode() const { return Direction(kPi - polar, azimuth + kPi); }

StateVector prepare_along(const Direction& d) {
  const double half = 0.5 * d.polar;
  const cplx phase{std::cos(d.azimuth), std::sin(d.azimuth)};
  return make_state({cplx{std::cos(half), 0}, phase * std::sin(half)});
}

Operator spin_operator(const Direction& d) {
  const auto n = d.bloch_vector();
  return Operator::hermitian({
      {n[2], 0},
      {n[0], -n[1]},
      {n[0], n[1]},
      {-n[2], 0},
  });
}

double outcome_probability(const StateVector& s, int site, const Direction& d, int value) {
  require_site(s, site);
  require_value(value);
  const Operator p = half_projector(d, value);
  const auto projected =
      detail::apply_matrix(p.entries(), 1, {site}, s.num_systems(), s.amplitudes());
  double prob = 0;
  for (const cplx& a : projected) prob += std::norm(a);
  return prob;
}

MeasurementOutcome measure(const StateVector& s, int site, const Direction& d,
                           RandomSource& rng) {
  require_site(s, site);
  const double p_plus = outcome_probability(s, site, d, +1);
  int value;
  if (p_plus >= 1.0 - kCertaintyTol) {
    value = +1;
  } else if (p_plus <= kCertaintyTol) {
    value = -1;
  } else {
    value = rng.next_uniform() < p_plus ? +1 : -1;
  }
  StateVector post = apply_operator(half_projector(d, value), {site}, s);
  const double prob = value > 0 ? p_plus : 1.0 - p_plus;
  return MeasurementOutcome{value, std::move(post), prob};
}

double correlator(const StateVector& s, int site_a, const Direction& da, int site_b,
                  const Direction& db) {
  require_site(s, site_a);
  require_site(s, site_b);
  if (site_a == site_b) raise(errc::bad_site, "correlator sites must differ");
  const StateVector acted =
      apply_operator(spin_operator(db), {site_b}, apply_operator(spin_operator(da), {site_a}, s));
  return inner_product(s, acted).real();
}

}  // namespace qit::measurement
