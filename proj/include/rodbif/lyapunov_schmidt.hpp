#pragma once

// Finite-dimensional reduction near a double point.
//
// With e_1, e_2 the kernel modes at the (m1, m2) double point, the extended
// map
//
//   G(x; xi, alpha, beta) = F(x; alpha, beta, gamma0)
//                           + sum_i (xi_i - <x, e_i>) e_i
//
// has an invertible Jacobian near (0; 0, alpha0, beta0), so Newton realizes
// the implicit solution xtilde(xi, alpha, beta).  The reduced map
//
//   phi_i(xi) = xi_i - <xtilde, e_i>
//
// vanishes exactly on reduction images of equilibria; its winding number on
// a small circle |xi| = radius is the Brouwer degree whose jumps across the
// rays force bifurcation.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rodbif/core_model.hpp"
#include "rodbif/detail/parallel.hpp"
#include "rodbif/discretization.hpp"
#include "rodbif/errors.hpp"

namespace rodbif {

template <class Real = double>
struct NewtonConfig {
  Real residual_tol = Real(1e-10);
  int max_iter = 25;
};

/// Frozen data of one reduction: the double point, the foundation cubic
/// coefficient gamma0, the kernel modes sampled on the working grid, and
/// the validity box in parameter and amplitude space.
template <class Real = double>
struct ReductionContext {
  DoublePoint<Real> dp;
  Real gamma0 = Real(0);
  Grid<Real> grid;
  SampledFunction<Real> e1, e2;
  VecX<Real> q1, q2;  ///< quadrature projectors: q_i . x_free = <x, e_i>
  NewtonConfig<Real> newton;
  Real param_box_halfwidth = Real(0.2);
  Real xi_radius = Real(0.1);
};

template <class Real>
ReductionContext<Real> make_reduction_context(int m1, int m2, Real r, Real gamma0,
                                              const Grid<Real>& g,
                                              NewtonConfig<Real> newton = {}) {
  if (!(gamma0 >= Real(0))) throw domain_error("make_reduction_context: gamma0 must be >= 0");
  if (!(g.r == r))
    throw config_error("make_reduction_context: grid half-length does not match r");
  ReductionContext<Real> ctx;
  ctx.dp = double_point(m1, m2, r);
  ctx.gamma0 = gamma0;
  ctx.grid = g;
  ctx.newton = newton;
  ctx.e1 = sample_eigenfunction(ctx.dp.m1, g);
  ctx.e2 = sample_eigenfunction(ctx.dp.m2, g);

  const Real o11 = inner_product(ctx.e1, ctx.e1);
  const Real o22 = inner_product(ctx.e2, ctx.e2);
  const Real o12 = inner_product(ctx.e1, ctx.e2);
  if (std::abs(o11 - Real(1)) > Real(1e-8) || std::abs(o22 - Real(1)) > Real(1e-8) ||
      std::abs(o12) > Real(1e-8))
    throw config_error("make_reduction_context: sampled modes not orthonormal on this grid");

  const int nf = g.n - 1;
  const std::vector<Real> w = simpson_weights(g);
  ctx.q1.resize(nf);
  ctx.q2.resize(nf);
  for (int i = 0; i < nf; ++i) {
    const Real wi = w[static_cast<size_t>(i)] / (Real(2) * g.r);
    ctx.q1[i] = wi * ctx.e1.values[static_cast<size_t>(i)];
    ctx.q2[i] = wi * ctx.e2.values[static_cast<size_t>(i)];
  }
  return ctx;
}

/// One converged evaluation of the implicit function.
template <class Real = double>
struct ReducedPoint {
  std::array<Real, 2> xi{};
  Real alpha = Real(0);
  Real beta = Real(0);
  SampledFunction<Real> xtilde;
  std::array<Real, 2> phi{};
  int iterations = 0;
  Real residual_norm = Real(0);
};

namespace detail {
template <class Real>
void check_reduction_box(const ReductionContext<Real>& ctx, const std::array<Real, 2>& xi,
                         Real alpha, Real beta) {
  if (std::abs(alpha - ctx.dp.alpha0) > ctx.param_box_halfwidth ||
      std::abs(beta - ctx.dp.beta0) > ctx.param_box_halfwidth)
    throw domain_error("reduction: (alpha, beta) outside the validity box around the double point");
  if (std::hypot(xi[0], xi[1]) > ctx.xi_radius)
    throw domain_error("reduction: |xi| exceeds the amplitude radius");
}
}  // namespace detail

/// Newton solution of G = 0 at fixed (xi, alpha, beta).  The residual check
/// runs before each correction, so the count reports 1 when the initial
/// guess already satisfies the tolerance (xi = 0 converges that way).
template <class Real>
ReducedPoint<Real> solve_xtilde(const std::array<Real, 2>& xi, Real alpha, Real beta,
                                const ReductionContext<Real>& ctx,
                                const SampledFunction<Real>* initial_guess = nullptr) {
  detail::check_reduction_box(ctx, xi, alpha, beta);
  const Params<Real> p(alpha, beta, ctx.gamma0, ctx.grid.r);
  const int nf = ctx.grid.n - 1;

  SampledFunction<Real> x =
      initial_guess ? *initial_guess : (xi[0] * ctx.e1 + xi[1] * ctx.e2);
  detail::require_same_grid(x.grid, ctx.grid, "solve_xtilde");
  x.values[static_cast<size_t>(ctx.grid.n - 1)] = Real(0);

  std::vector<double> history;
  for (int iter = 1; iter <= ctx.newton.max_iter; ++iter) {
    VecX<Real> xf(nf);
    for (int i = 0; i < nf; ++i) xf[i] = x.values[static_cast<size_t>(i)];
    const Real proj1 = ctx.q1.dot(xf);
    const Real proj2 = ctx.q2.dot(xf);

    const SampledFunction<Real> F = residual(x, p);
    VecX<Real> G(nf);
    for (int i = 0; i < nf; ++i)
      G[i] = F.values[static_cast<size_t>(i)] +
             (xi[0] - proj1) * ctx.e1.values[static_cast<size_t>(i)] +
             (xi[1] - proj2) * ctx.e2.values[static_cast<size_t>(i)];

    const Real res = G.template lpNorm<Eigen::Infinity>();
    history.push_back(static_cast<double>(res));
    if (res <= ctx.newton.residual_tol) {
      ReducedPoint<Real> out;
      out.xi = xi;
      out.alpha = alpha;
      out.beta = beta;
      out.xtilde = x;
      out.phi = {xi[0] - proj1, xi[1] - proj2};
      out.iterations = iter;
      out.residual_norm = res;
      return out;
    }

    MatX<Real> J = jacobian(x, p).matrix();
    VecX<Real> e1f(nf), e2f(nf);
    for (int i = 0; i < nf; ++i) {
      e1f[i] = ctx.e1.values[static_cast<size_t>(i)];
      e2f[i] = ctx.e2.values[static_cast<size_t>(i)];
    }
    J.noalias() -= e1f * ctx.q1.transpose();
    J.noalias() -= e2f * ctx.q2.transpose();

    const VecX<Real> step = J.partialPivLu().solve(G);
    for (int i = 0; i < nf; ++i) x.values[static_cast<size_t>(i)] -= step[i];
  }
  throw newton_error("solve_xtilde: no convergence within max_iter", std::move(history));
}

/// The reduced map at one amplitude pair.
template <class Real>
std::array<Real, 2> reduced_map(const std::array<Real, 2>& xi, Real alpha, Real beta,
                                const ReductionContext<Real>& ctx) {
  return solve_xtilde(xi, alpha, beta, ctx).phi;
}

/// Central-difference Jacobian of the reduced map at xi = 0.
template <class Real>
Eigen::Matrix<Real, 2, 2> reduced_jacobian_numeric(Real alpha, Real beta,
                                                   const ReductionContext<Real>& ctx,
                                                   Real step = Real(1e-4)) {
  if (!(step > Real(0))) throw domain_error("reduced_jacobian_numeric: step must be > 0");
  Eigen::Matrix<Real, 2, 2> J;
  for (int j = 0; j < 2; ++j) {
    std::array<Real, 2> plus{}, minus{};
    plus[static_cast<size_t>(j)] = step;
    minus[static_cast<size_t>(j)] = -step;
    const std::array<Real, 2> fp = reduced_map(plus, alpha, beta, ctx);
    const std::array<Real, 2> fm = reduced_map(minus, alpha, beta, ctx);
    for (int i = 0; i < 2; ++i) J(i, j) = (fp[static_cast<size_t>(i)] - fm[static_cast<size_t>(i)]) / (Real(2) * step);
  }
  return J;
}

/// Brouwer degree of the reduced map on the circle |xi| = radius, by angle
/// accumulation.  Sampling is refined (doubled, up to three times) whenever
/// a step turns the image by more than pi/2; a loop that cannot be resolved
/// or that passes within the noise floor of zero raises degree_error rather
/// than guessing.
template <class Real>
int winding_degree(Real alpha, Real beta, const ReductionContext<Real>& ctx,
                   Real radius = Real(1e-3), int samples = 256) {
  if (samples < 64) throw config_error("winding_degree: need at least 64 samples");
  if (!(radius > Real(0)) || radius > ctx.xi_radius)
    throw domain_error("winding_degree: radius must lie in (0, xi_radius]");

  const Real noise_floor = Real(10) * ctx.newton.residual_tol;
  const Real pi = std::numbers::pi_v<Real>;

  for (int attempt = 0; attempt < 4; ++attempt, samples *= 2) {
    std::vector<std::array<Real, 2>> phis(static_cast<size_t>(samples));
    detail::parallel_for(0, samples, [&](int k) {
      const Real theta = Real(2) * pi * Real(k) / Real(samples);
      const std::array<Real, 2> xi{radius * std::cos(theta), radius * std::sin(theta)};
      phis[static_cast<size_t>(k)] = reduced_map(xi, alpha, beta, ctx);
    });

    Real min_mag = std::numeric_limits<Real>::max();
    for (const std::array<Real, 2>& f : phis) min_mag = std::min(min_mag, std::hypot(f[0], f[1]));
    if (min_mag < Real(10) * noise_floor)
      throw degree_error("winding_degree: reduced map indistinguishable from zero on the circle");

    Real total = Real(0);
    bool coarse = false;
    for (int k = 0; k < samples; ++k) {
      const std::array<Real, 2>& a = phis[static_cast<size_t>(k)];
      const std::array<Real, 2>& b = phis[static_cast<size_t>((k + 1) % samples)];
      Real d = std::atan2(b[1], b[0]) - std::atan2(a[1], a[0]);
      if (d > pi) d -= Real(2) * pi;
      if (d <= -pi) d += Real(2) * pi;
      if (std::abs(d) > pi / Real(2)) {
        coarse = true;
        break;
      }
      total += d;
    }
    if (coarse) continue;

    const Real turns = total / (Real(2) * pi);
    const Real rounded = std::round(turns);
    if (std::abs(turns - rounded) > Real(0.25))
      throw degree_error("winding_degree: accumulated angle is not an integer number of turns");
    return static_cast<int>(rounded);
  }
  throw degree_error("winding_degree: loop stayed under-resolved after sample refinement");
}

/// Outcome of one probe line through the double point.
enum class ProbeStatus { ok, boundary };

template <class Real = double>
struct ProbeReport {
  Real alpha = Real(0);
  Real beta = Real(0);
  Real offset = Real(0);
  Real slope = Real(0);
  ProbeStatus status = ProbeStatus::ok;
  Real det_closed_form = Real(0);
  std::optional<Real> det_numeric;
  std::optional<int> winding;
};

/// Probe the double point along beta - beta0 = slope (alpha - alpha0) at a
/// given parameter offset: closed-form determinant, numeric determinant and
/// winding number.  Boundary slopes report status boundary and skip the
/// numeric work (the reduced Jacobian is singular there by construction).
template <class Real>
ProbeReport<Real> run_probe(const ReductionContext<Real>& ctx, Real offset, Real slope,
                            Real radius = Real(1e-3), int samples = 256,
                            Real fd_step = Real(1e-4)) {
  ProbeReport<Real> rep;
  rep.offset = offset;
  rep.slope = slope;
  rep.alpha = ctx.dp.alpha0 + offset;
  rep.beta = ctx.dp.beta0 + slope * offset;

  const DegreeSign cls = degree_sign_classification(slope, ctx.dp.m1, ctx.dp.m2, ctx.grid.r);
  const ReducedJacobianClosedForm<Real> closed =
      reduced_jacobian_closed_form(rep.alpha, rep.beta, ctx.dp.m1, ctx.dp.m2, ctx.grid.r);
  rep.det_closed_form = closed.det;
  if (cls == DegreeSign::boundary) {
    rep.status = ProbeStatus::boundary;
    return rep;
  }
  rep.det_numeric = reduced_jacobian_numeric(rep.alpha, rep.beta, ctx, fd_step).determinant();
  rep.winding = winding_degree(rep.alpha, rep.beta, ctx, radius, samples);
  return rep;
}

}  // namespace rodbif
