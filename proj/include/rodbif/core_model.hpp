#pragma once

// Closed-form layer for the buckling problem of a compressed elastic rod
// resting on a nonlinear foundation.  Everything in this header is exact
// arithmetic on the model data: no grids, no linear algebra.
//
// The equilibrium equation on [-r, r] is
//
//     x'''' + alpha x'' + beta x - f(x, x', x'', x''', x'''') = 0,
//     f = gamma x^3 + 3 x''^3 + 12 x' x'' x''' + 3 x'^2 (x'''' - (alpha/2) x''),
//
// with boundary conditions x'(-r) = x'''(-r) = 0 and x(r) = x''(r) = 0.
// The straight state x == 0 solves it for every parameter value; the rays
// and double points below locate where nontrivial branches can split off.

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "rodbif/errors.hpp"

namespace rodbif {

/// Model parameters.  alpha is the compressive load, beta and gamma the
/// linear and cubic foundation coefficients, r the half-length of the rod.
template <class Real = double>
struct Params {
  Real alpha;
  Real beta;
  Real gamma;
  Real r;

  Params(Real alpha_, Real beta_, Real gamma_, Real r_)
      : alpha(alpha_), beta(beta_), gamma(gamma_), r(r_) {
    if (!(alpha > Real(0))) throw domain_error("Params: alpha must be > 0");
    if (!(beta > Real(0))) throw domain_error("Params: beta must be > 0");
    if (!(gamma >= Real(0))) throw domain_error("Params: gamma must be >= 0");
    if (!(r > Real(0))) throw domain_error("Params: r must be > 0");
  }
};

/// Frequency of the m-th boundary-compatible cosine mode,
/// omega_m = (pi/r) (2m-1)/4.
template <class Real>
Real mode_frequency(int m, Real r) {
  if (m < 1) throw domain_error("mode_frequency: mode index must be >= 1");
  if (!(r > Real(0))) throw domain_error("mode_frequency: half-length must be > 0");
  return std::numbers::pi_v<Real> / r * (Real(2 * m - 1) / Real(4));
}

/// Spectral coefficient c_m = -omega_m^2 = -(pi/r)^2 ((2m-1)/4)^2.
/// Always negative, strictly decreasing in m.
template <class Real>
Real mode_coefficient(int m, Real r) {
  const Real w = mode_frequency(m, r);
  return -w * w;
}

/// A single linear mode: index, spectral coefficient and half-length.
template <class Real = double>
struct Mode {
  int m;
  Real c;
  Real r;
};

template <class Real>
Mode<Real> make_mode(int m, Real r) {
  return Mode<Real>{m, mode_coefficient(m, r), r};
}

/// Height of the ray l_m over a given load:  beta = -c_m alpha - c_m^2.
/// Along l_m the linearization x'''' + alpha x'' + beta x has the one-mode
/// kernel span{e_m}; the value can be negative (the physical ray is beta > 0).
template <class Real>
Real ray_beta(int m, Real alpha, Real r) {
  const Real c = mode_coefficient(m, r);
  return -c * alpha - c * c;
}

/// Intersection of rays l_m1 and l_m2 (a kernel-dimension-2 point):
///   alpha0 = -(c_m1 + c_m2),  beta0 = c_m1 c_m2.
template <class Real = double>
struct DoublePoint {
  int m1;  ///< lower mode index
  int m2;  ///< higher mode index
  Real alpha0;
  Real beta0;
};

template <class Real>
DoublePoint<Real> double_point(int m1, int m2, Real r) {
  if (m1 == m2) throw domain_error("double_point: mode indices must be distinct");
  if (m1 > m2) std::swap(m1, m2);
  const Real c1 = mode_coefficient(m1, r);
  const Real c2 = mode_coefficient(m2, r);
  return DoublePoint<Real>{m1, m2, -(c1 + c2), c1 * c2};
}

/// Unit-norm kernel mode  e_m(s) = sqrt(2) cos(omega_m (s + r)).
/// Normalized so that <e_m, e_m> = 1 in the averaged inner product
/// <g, h> = (1/2r) integral of g h over [-r, r].
template <class Real>
Real eigenfunction(int m, Real r, Real s) {
  if (s < -r || s > r) throw domain_error("eigenfunction: s outside [-r, r]");
  const Real w = mode_frequency(m, r);
  return std::numbers::sqrt2_v<Real> * std::cos(w * (s + r));
}

/// k-th derivative of e_m, 0 <= k <= 4, in closed form.  The derivatives
/// cycle cos -> -sin -> -cos -> sin with a factor omega_m per order, so
/// e_m'' = c_m e_m and e_m'''' = c_m^2 e_m.
template <class Real>
Real eigenfunction_derivative(int m, Real r, Real s, int k) {
  if (k < 0 || k > 4) throw domain_error("eigenfunction_derivative: order must be in [0, 4]");
  if (s < -r || s > r) throw domain_error("eigenfunction_derivative: s outside [-r, r]");
  const Real w = mode_frequency(m, r);
  const Real t = w * (s + r);
  Real scale = Real(1);
  for (int i = 0; i < k; ++i) scale *= w;
  scale *= std::numbers::sqrt2_v<Real>;
  switch (k % 4) {
    case 0: return scale * std::cos(t);
    case 1: return -scale * std::sin(t);
    case 2: return -scale * std::cos(t);
    default: return scale * std::sin(t);
  }
}

/// Indices m <= m_max whose ray l_m passes through (alpha, beta) within
/// |beta + c_m alpha + c_m^2| <= tol.  Empty result means the linearization
/// at that parameter point is (up to tol) boundedly invertible.
template <class Real>
std::vector<int> classify_rays_through(Real alpha, Real beta, Real r, int m_max, Real tol) {
  if (m_max < 1) throw domain_error("classify_rays_through: m_max must be >= 1");
  if (!(tol > Real(0))) throw domain_error("classify_rays_through: tol must be > 0");
  std::vector<int> hits;
  for (int m = 1; m <= m_max; ++m) {
    const Real c = mode_coefficient(m, r);
    if (std::abs(beta + c * alpha + c * c) <= tol) hits.push_back(m);
  }
  return hits;
}

/// Pointwise nonlinearity
///   f = gamma x^3 + 3 d2^3 + 12 d1 d2 d3 + 3 d1^2 (d4 - (alpha/2) d2),
/// where d1..d4 are the first four derivatives of x at the same point.
template <class Real>
Real nonlinearity_pointwise(Real x, Real d1, Real d2, Real d3, Real d4, Real alpha, Real gamma) {
  return gamma * x * x * x + Real(3) * d2 * d2 * d2 + Real(12) * d1 * d2 * d3 +
         Real(3) * d1 * d1 * (d4 - alpha / Real(2) * d2);
}

/// Partial derivatives of the pointwise nonlinearity with respect to
/// (x, d1, d2, d3, d4); the coefficient pattern the Jacobian assembly needs.
template <class Real = double>
struct NonlinearityPartials {
  Real fx;   ///< gamma 3 x^2
  Real fd1;  ///< 12 d2 d3 + 6 d1 (d4 - (alpha/2) d2)
  Real fd2;  ///< 9 d2^2 + 12 d1 d3 - (3 alpha/2) d1^2
  Real fd3;  ///< 12 d1 d2
  Real fd4;  ///< 3 d1^2
};

template <class Real>
NonlinearityPartials<Real> nonlinearity_partials(Real x, Real d1, Real d2, Real d3, Real d4,
                                                 Real alpha, Real gamma) {
  NonlinearityPartials<Real> p;
  p.fx = Real(3) * gamma * x * x;
  p.fd1 = Real(12) * d2 * d3 + Real(6) * d1 * (d4 - alpha / Real(2) * d2);
  p.fd2 = Real(9) * d2 * d2 + Real(12) * d1 * d3 - Real(3) * alpha / Real(2) * d1 * d1;
  p.fd3 = Real(12) * d1 * d2;
  p.fd4 = Real(3) * d1 * d1;
  return p;
}

/// Diagonal of the reduced 2x2 Jacobian of the branching system at a
/// parameter point near the (m1, m2) double point, in closed form:
///
///   entry_k = (c_k^2 + alpha c_k + beta) / (c_k^2 + alpha c_k + beta - 1).
///
/// The numerator vanishes exactly on l_mk, so the sign pattern of the two
/// entries (equivalently the sign of their product) encodes on which side
/// of each ray the point lies.
template <class Real = double>
struct ReducedJacobianClosedForm {
  std::array<Real, 2> diagonal;
  Real det;
};

template <class Real>
ReducedJacobianClosedForm<Real> reduced_jacobian_closed_form(Real alpha, Real beta, int m1, int m2,
                                                             Real r) {
  if (m1 == m2) throw domain_error("reduced_jacobian_closed_form: mode indices must be distinct");
  ReducedJacobianClosedForm<Real> out;
  const int ms[2] = {m1, m2};
  for (int k = 0; k < 2; ++k) {
    const Real c = mode_coefficient(ms[k], r);
    const Real num = c * c + alpha * c + beta;
    const Real den = num - Real(1);
    if (std::abs(den) < Real(1e-12))
      throw singular_error(
          "reduced_jacobian_closed_form: vanishing denominator for mode " + std::to_string(ms[k]),
          ms[k]);
    out.diagonal[k] = num / den;
  }
  out.det = out.diagonal[0] * out.diagonal[1];
  return out;
}

/// Sign of the Brouwer degree carried by a small circle around the double
/// point, probed along the line beta - beta0 = slope (alpha - alpha0).
enum class DegreeSign {
  plus_one,   ///< slope outside (-c_m1, -c_m2): reduced Jacobian preserves orientation
  minus_one,  ///< slope strictly inside (-c_m1, -c_m2): one entry flips sign
  boundary    ///< slope equals -c_m1 or -c_m2 exactly: degenerate direction
};

template <class Real>
DegreeSign degree_sign_classification(Real slope, int m1, int m2, Real r) {
  if (m1 >= m2) throw domain_error("degree_sign_classification: need m1 < m2");
  const Real lo = -mode_coefficient(m1, r);
  const Real hi = -mode_coefficient(m2, r);
  if (slope == lo || slope == hi) return DegreeSign::boundary;
  if (slope > lo && slope < hi) return DegreeSign::minus_one;
  return DegreeSign::plus_one;
}

}  // namespace rodbif
