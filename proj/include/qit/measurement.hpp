#pragma once

#include <array>

#include "qit/qmath.hpp"
#include "qit/random.hpp"

namespace qit::measurement {

// Measurement axis on the unit sphere: polar in [0, pi], azimuth in [0, 2*pi).
struct Direction {
  double polar;
  double azimuth;

  explicit Direction(double polar, double azimuth = 0.0);

  static Direction z() { return Direction(0.0); }
  static Direction x() { return Direction(1.5707963267948966); }
  static Direction y() { return Direction(1.5707963267948966, 1.5707963267948966); }

  // Axis in the x-z plane at a signed angle from +z (positive toward +x);
  // angles outside [0, pi] wrap onto azimuth pi.
  static Direction planar(double angle);

  std::array<double, 3> bloch_vector() const;
  Direction antipode() const;
};

struct MeasurementOutcome {
  int value;                    // +1 or -1
  StateVector post_state;       // renormalized projection
  double probability_of_value;  // Born probability of the realized value
};

// Single system pointing along d: (cos(polar/2), e^{i azimuth} sin(polar/2)).
StateVector prepare_along(const Direction& d);

// n-hat dot sigma: Hermitian, unitary, eigenvalues +1/-1.
Operator spin_operator(const Direction& d);

// Born probability of outcome `value` when measuring `site` along d,
// via the explicit projector (identity +/- n.sigma)/2.
double outcome_probability(const StateVector& s, int site, const Direction& d, int value);

// Projective measurement with collapse. Draws one uniform; +1 iff u < p(+1).
// Probabilities within 1e-12 of 0 or 1 are treated as certain and skip the draw.
MeasurementOutcome measure(const StateVector& s, int site, const Direction& d,
                           RandomSource& rng);

// <s| (na.sigma)_a (nb.sigma)_b |s> for distinct sites.
double correlator(const StateVector& s, int site_a, const Direction& da, int site_b,
                  const Direction& db);

}  // namespace qit::measurement
