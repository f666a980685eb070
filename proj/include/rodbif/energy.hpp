#pragma once

// Energy functionals for the rod.
//
// The working (truncated) energy, averaged over the rod, is
//
//   E(x) = (1/4r) int [ x''^2 - 3 x'^2 x''^2 - alpha x'^2 - (alpha/4) x'^4
//                       + beta x^2 - (gamma/2) x^4 ] ds,
//
// whose variational gradient in <g, h> = (1/2r) int g h is exactly the
// residual of discretization.hpp: E'(x) h = <F(x), h>.  The untruncated
// physical energy keeps the full curvature and work expressions
//
//   E_t = (EI/2) int kappa^2 ds - lambda int (1 - sqrt(1 - x'^2)) ds
//         + int (mu x^2/2 - nu x^4/4) ds,      kappa = x''/(1 + x'^2)^{3/2},
//
// and agrees with 2r EI E(x) up to o(amplitude^4) under
// lambda = alpha EI, mu = beta EI, nu = gamma EI.

#include <cmath>
#include <string>

#include "rodbif/core_model.hpp"
#include "rodbif/discretization.hpp"
#include "rodbif/errors.hpp"

namespace rodbif {

/// Parameters of the physical energy; youngs_times_inertia is the bending
/// stiffness EI that scales the curvature term.
template <class Real = double>
struct PhysicalParams {
  Real lambda;
  Real mu;
  Real nu;
  Real youngs_times_inertia;
};

/// Dimensionless parameters from physical ones (divide through by EI).
template <class Real>
Params<Real> to_params(const PhysicalParams<Real>& q, Real r) {
  const Real ei = q.youngs_times_inertia;
  if (!(ei > Real(0))) throw domain_error("to_params: bending stiffness must be > 0");
  return Params<Real>(q.lambda / ei, q.mu / ei, q.nu / ei, r);
}

/// Physical parameters realizing given dimensionless ones at stiffness ei.
template <class Real>
PhysicalParams<Real> from_params(const Params<Real>& p, Real ei) {
  if (!(ei > Real(0))) throw domain_error("from_params: bending stiffness must be > 0");
  return PhysicalParams<Real>{p.alpha * ei, p.beta * ei, p.gamma * ei, ei};
}

/// Truncated averaged energy by Simpson quadrature on the nodal derivatives.
template <class Real>
Real total_energy(const SampledFunction<Real>& x, const Params<Real>& p) {
  const detail::NodalDerivatives<Real> d = detail::derivatives_with_bcs(x);
  const std::vector<Real> w = simpson_weights(x.grid);
  Real acc = Real(0);
  for (size_t i = 0; i < w.size(); ++i) {
    const Real v = x.values[i];
    const Real d1 = d.d1[i];
    const Real d2 = d.d2[i];
    const Real integrand = d2 * d2 - Real(3) * d1 * d1 * d2 * d2 - p.alpha * d1 * d1 -
                           p.alpha / Real(4) * d1 * d1 * d1 * d1 + p.beta * v * v -
                           p.gamma / Real(2) * v * v * v * v;
    acc += w[i] * integrand;
  }
  return acc / (Real(4) * x.grid.r);
}

/// Untruncated physical energy (not averaged).  Requires |x'| < 1 at every
/// node; the work term is undefined beyond that.
template <class Real>
Real exact_total_energy(const SampledFunction<Real>& x, const PhysicalParams<Real>& q) {
  using std::sqrt;
  const detail::NodalDerivatives<Real> d = detail::derivatives_with_bcs(x);
  const std::vector<Real> w = simpson_weights(x.grid);
  Real bend = Real(0), work = Real(0), found = Real(0);
  for (size_t i = 0; i < w.size(); ++i) {
    const Real v = x.values[i];
    const Real d1 = d.d1[i];
    const Real d2 = d.d2[i];
    if (!(std::abs(d1) < Real(1)))
      throw domain_error("exact_total_energy: |x'| >= 1 at node " + std::to_string(i));
    const Real g = Real(1) + d1 * d1;
    const Real kappa = d2 / (g * sqrt(g));
    bend += w[i] * kappa * kappa;
    work += w[i] * (Real(1) - sqrt(Real(1) - d1 * d1));
    found += w[i] * (q.mu * v * v / Real(2) - q.nu * v * v * v * v / Real(4));
  }
  return q.youngs_times_inertia / Real(2) * bend - q.lambda * work + found;
}

/// |central difference of E along h  -  <F(x), h>|; the discrete form of
/// the statement that F is the gradient of E.
template <class Real>
Real gradient_pairing_check(const SampledFunction<Real>& x, const SampledFunction<Real>& h,
                            const Params<Real>& p, Real eps) {
  if (!(eps > Real(0))) throw domain_error("gradient_pairing_check: eps must be > 0");
  detail::require_same_grid(x.grid, h.grid, "gradient_pairing_check");
  const Real eplus = total_energy(x + eps * h, p);
  const Real eminus = total_energy(x - eps * h, p);
  const Real directional = (eplus - eminus) / (Real(2) * eps);
  const Real paired = inner_product(residual(x, p), h);
  return std::abs(directional - paired);
}

/// Mixed second derivatives of the energy along mode m at the parameter
/// point p, the two transversality coefficients of the branching analysis:
///
///   d_alpha = d/dalpha d^2/dt^2 E(t e_m)|_{t=0}  ->  c_m   (< 0)
///   d_beta  = d/dbeta  d^2/dt^2 E(t e_m)|_{t=0}  ->  1     (> 0)
///
/// computed by nested central differences; gamma never enters (it only
/// multiplies quartic terms).
template <class Real = double>
struct TransversalityCoefficients {
  Real d_alpha;
  Real d_beta;
};

template <class Real>
TransversalityCoefficients<Real> crandall_rabinowitz_coefficients(int m, const Params<Real>& p,
                                                                  const Grid<Real>& g,
                                                                  Real amplitude_step = Real(1e-3),
                                                                  Real param_step = Real(1e-4)) {
  const SampledFunction<Real> e = sample_eigenfunction(m, g);
  // E is even in t and E(0) = 0, so the second t-difference is 2 E(t)/t^2.
  const auto curvature = [&](Real alpha, Real beta) {
    const Params<Real> q(alpha, beta, p.gamma, p.r);
    return Real(2) * total_energy(amplitude_step * e, q) / (amplitude_step * amplitude_step);
  };
  TransversalityCoefficients<Real> out;
  out.d_alpha =
      (curvature(p.alpha + param_step, p.beta) - curvature(p.alpha - param_step, p.beta)) /
      (Real(2) * param_step);
  out.d_beta =
      (curvature(p.alpha, p.beta + param_step) - curvature(p.alpha, p.beta - param_step)) /
      (Real(2) * param_step);
  return out;
}

}  // namespace rodbif
