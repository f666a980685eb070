#pragma once

// Branch detection and amplitude continuation.
//
// Crossings of the trivial family are located by tracking the signed
// smallest-magnitude eigenvalue of the symmetrized linearization along a
// parameter segment and bisecting its sign changes.  Emanating branches are
// parametrized by the kernel-mode amplitude t = <x, e_m> and traced by an
// augmented Newton iteration in (x, parameter):
//
//     F(x; parameter) = 0,     <x, e_m> = t,
//
// with one of alpha, beta freed while the other stays fixed.  A pitchfork
// in this parametrization shows up as parameter(t) - parameter(0) = O(t^2).

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "rodbif/core_model.hpp"
#include "rodbif/discretization.hpp"
#include "rodbif/errors.hpp"
#include "rodbif/linear_analysis.hpp"
#include "rodbif/lyapunov_schmidt.hpp"

namespace rodbif {

enum class FreeParameter { alpha, beta };

/// The continuation problem: which mode bifurcates, which parameter is
/// freed, and the frozen remaining data.
template <class Real = double>
struct BranchProblem {
  int mode = 1;
  FreeParameter free = FreeParameter::alpha;
  Real fixed_value = Real(0);  ///< the parameter that stays constant
  Real gamma = Real(0);
  Real r = Real(0);
};

template <class Real>
Params<Real> params_for(const BranchProblem<Real>& prob, Real free_value) {
  if (prob.free == FreeParameter::alpha)
    return Params<Real>(free_value, prob.fixed_value, prob.gamma, prob.r);
  return Params<Real>(prob.fixed_value, free_value, prob.gamma, prob.r);
}

/// Closed-form value of the free parameter at which the l_mode ray crosses
/// the problem's fixed line; the continuation's t = 0 point.
template <class Real>
Real ray_crossing_value(const BranchProblem<Real>& prob) {
  if (prob.mode < 1) throw domain_error("ray_crossing_value: mode must be >= 1");
  const Real c = mode_coefficient(prob.mode, prob.r);
  Real v;
  if (prob.free == FreeParameter::beta) {
    v = ray_beta(prob.mode, prob.fixed_value, prob.r);
  } else {
    v = -(prob.fixed_value + c * c) / c;
  }
  if (!(v > Real(0)))
    throw domain_error("ray_crossing_value: the crossing lies outside the physical quadrant");
  return v;
}

/// One accepted branch point.
template <class Real = double>
struct BranchPoint {
  Real t = Real(0);
  Real param = Real(0);
  SampledFunction<Real> x;
  Real residual_norm = Real(0);
};

enum class BranchStatus { complete, early_stop };

template <class Real = double>
struct Branch {
  BranchProblem<Real> problem;
  Grid<Real> grid;
  int direction = 1;
  BranchStatus status = BranchStatus::complete;
  std::vector<BranchPoint<Real>> points;  ///< starts at the t = 0 trivial point
};

/// A straight segment through parameter space along which the trivial
/// family is examined, (alpha(u), beta(u)) linear in u over [0, 1].
template <class Real = double>
struct ParamPath {
  Real alpha_start, beta_start;
  Real alpha_end, beta_end;
};

/// One located crossing of the trivial family.
template <class Real = double>
struct Crossing {
  Real u = Real(0);
  Real alpha = Real(0);
  Real beta = Real(0);
  int mode = 0;       ///< best-matching closed-form mode
  Real lambda = Real(0);  ///< eigenvalue remnant at the bisected point
};

/// Sample the signed smallest-magnitude eigenvalue at steps+1 points of the
/// path and bisect every sign change to |du| <= 1e-8.  A sign change whose
/// bisected eigenvalue is not small (the minimizer jumped between two modes
/// of opposite sign away from zero) is discarded as spurious.  Two crossings
/// inside one sampling interval cancel and are missed; raise steps to
/// separate them.
template <class Real>
std::vector<Crossing<Real>> detect_bifurcation_on_trivial_branch(const ParamPath<Real>& path,
                                                                 const Grid<Real>& g,
                                                                 int steps = 16) {
  if (steps < 8) throw config_error("detect_bifurcation_on_trivial_branch: steps must be >= 8");
  if (!(path.alpha_start > Real(0)) || !(path.alpha_end > Real(0)) ||
      !(path.beta_start > Real(0)) || !(path.beta_end > Real(0)))
    throw config_error("detect_bifurcation_on_trivial_branch: path must stay in the positive quadrant");

  const auto at = [&](Real u) {
    return std::pair<Real, Real>{path.alpha_start + u * (path.alpha_end - path.alpha_start),
                                 path.beta_start + u * (path.beta_end - path.beta_start)};
  };
  const auto lambda_at = [&](Real u) {
    const auto [a, b] = at(u);
    return smallest_eigenpair(a, b, g).lambda;
  };

  std::vector<Real> us(static_cast<size_t>(steps + 1));
  std::vector<Real> ls(static_cast<size_t>(steps + 1));
  for (int k = 0; k <= steps; ++k) {
    us[static_cast<size_t>(k)] = Real(k) / Real(steps);
    ls[static_cast<size_t>(k)] = lambda_at(us[static_cast<size_t>(k)]);
  }

  std::vector<Crossing<Real>> found;
  for (int k = 0; k < steps; ++k) {
    Real lo = us[static_cast<size_t>(k)], hi = us[static_cast<size_t>(k + 1)];
    Real flo = ls[static_cast<size_t>(k)], fhi = ls[static_cast<size_t>(k + 1)];
    if ((flo < Real(0)) == (fhi < Real(0))) continue;
    while (hi - lo > Real(1e-8)) {
      const Real mid = (lo + hi) / Real(2);
      const Real fmid = lambda_at(mid);
      if ((fmid < Real(0)) == (flo < Real(0))) {
        lo = mid;
        flo = fmid;
      } else {
        hi = mid;
        fhi = fmid;
      }
    }
    const Real u = (lo + hi) / Real(2);
    const auto [a, b] = at(u);
    const SignedEigenpair<Real> pair = smallest_eigenpair(a, b, g);
    if (std::abs(pair.lambda) > default_kernel_threshold(a, b, g)) continue;

    Crossing<Real> c;
    c.u = u;
    c.alpha = a;
    c.beta = b;
    c.lambda = pair.lambda;
    c.mode = pair.mode;
    found.push_back(std::move(c));
  }
  return found;
}

namespace detail {

/// Augmented Newton solve of { F(x; p) = 0, <x, e> = t } in (x, p).
template <class Real>
struct AmplitudeSolve {
  SampledFunction<Real> x;
  Real param = Real(0);
  Real residual_norm = Real(0);
  int iterations = 0;
};

template <class Real>
AmplitudeSolve<Real> solve_at_amplitude(const BranchProblem<Real>& prob, const Grid<Real>& g,
                                        const VecX<Real>& q, SampledFunction<Real> x, Real param,
                                        Real t, const NewtonConfig<Real>& cfg) {
  const int nf = g.n - 1;
  std::vector<double> history;
  x.values[static_cast<size_t>(g.n - 1)] = Real(0);
  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    if (!(param > Real(0)))
      throw newton_error("solve_at_amplitude: free parameter left the physical quadrant",
                         std::move(history));
    const Params<Real> p = params_for(prob, param);
    const SampledFunction<Real> F = residual(x, p);
    VecX<Real> xf(nf);
    for (int i = 0; i < nf; ++i) xf[i] = x.values[static_cast<size_t>(i)];
    const Real constraint = q.dot(xf) - t;

    Real res = std::abs(constraint);
    for (int i = 0; i < nf; ++i) res = std::max(res, std::abs(F.values[static_cast<size_t>(i)]));
    history.push_back(static_cast<double>(res));
    if (res <= cfg.residual_tol) {
      AmplitudeSolve<Real> out;
      out.x = std::move(x);
      out.param = param;
      out.residual_norm = res;
      out.iterations = iter;
      return out;
    }

    const SampledFunction<Real> dFdp =
        prob.free == FreeParameter::alpha ? residual_dalpha(x) : residual_dbeta(x);
    MatX<Real> J(nf + 1, nf + 1);
    J.topLeftCorner(nf, nf) = jacobian(x, p).matrix();
    for (int i = 0; i < nf; ++i) {
      J(i, nf) = dFdp.values[static_cast<size_t>(i)];
      J(nf, i) = q[i];
    }
    J(nf, nf) = Real(0);

    VecX<Real> rhs(nf + 1);
    for (int i = 0; i < nf; ++i) rhs[i] = F.values[static_cast<size_t>(i)];
    rhs[nf] = constraint;
    const VecX<Real> step = J.partialPivLu().solve(rhs);
    for (int i = 0; i < nf; ++i) x.values[static_cast<size_t>(i)] -= step[i];
    param -= step[nf];
  }
  throw newton_error("solve_at_amplitude: no convergence within max_iter", std::move(history));
}

}  // namespace detail

/// Everything continue_branch needs to walk away from a crossing.
template <class Real = double>
struct BranchSeed {
  BranchProblem<Real> problem;
  Grid<Real> grid;
  int direction = 1;
  Real t0 = Real(0);
  Real param_at_zero = Real(0);
  BranchPoint<Real> point;
  NewtonConfig<Real> newton;
};

/// Step off the trivial family at a simple crossing: solve the augmented
/// system at amplitude t = direction t0 starting from the kernel-mode
/// predictor x = t e_mode, parameter seeded at the crossing value.
template <class Real>
BranchSeed<Real> branch_switch(Real bif_value, const BranchProblem<Real>& prob,
                               const Grid<Real>& g, int direction, Real t0,
                               NewtonConfig<Real> cfg = NewtonConfig<Real>{Real(1e-9), 30}) {
  if (!(t0 > Real(0)) || t0 > Real(0.1))
    throw domain_error("branch_switch: t0 must lie in (0, 0.1]");
  if (direction != 1 && direction != -1)
    throw domain_error("branch_switch: direction must be +1 or -1");
  if (!(bif_value > Real(0))) throw domain_error("branch_switch: bif_value must be > 0");

  const SampledFunction<Real> e = sample_eigenfunction(prob.mode, g);
  const std::vector<Real> w = simpson_weights(g);
  VecX<Real> q(g.n - 1);
  for (int i = 0; i < g.n - 1; ++i)
    q[i] = w[static_cast<size_t>(i)] / (Real(2) * g.r) * e.values[static_cast<size_t>(i)];

  const Real t = Real(direction) * t0;
  detail::AmplitudeSolve<Real> sol =
      detail::solve_at_amplitude(prob, g, q, t * e, bif_value, t, cfg);

  BranchSeed<Real> seed;
  seed.problem = prob;
  seed.grid = g;
  seed.direction = direction;
  seed.t0 = t0;
  seed.param_at_zero = bif_value;
  seed.point = BranchPoint<Real>{t, sol.param, std::move(sol.x), sol.residual_norm};
  seed.newton = cfg;
  return seed;
}

/// Walk the branch to amplitude |t| = t0 + n_steps dt.  The amplitude
/// predictor rescales the previous profile; the parameter predictor is the
/// secant through the last two accepted points.  A Newton failure stops the
/// walk early and marks the returned branch, keeping every accepted point.
template <class Real>
Branch<Real> continue_branch(const BranchSeed<Real>& seed, int n_steps, Real dt) {
  if (n_steps < 0) throw config_error("continue_branch: n_steps must be >= 0");
  if (!(dt > Real(0)) || dt > Real(0.05))
    throw config_error("continue_branch: dt must lie in (0, 0.05]");

  const Grid<Real>& g = seed.grid;
  const SampledFunction<Real> e = sample_eigenfunction(seed.problem.mode, g);
  const std::vector<Real> w = simpson_weights(g);
  VecX<Real> q(g.n - 1);
  for (int i = 0; i < g.n - 1; ++i)
    q[i] = w[static_cast<size_t>(i)] / (Real(2) * g.r) * e.values[static_cast<size_t>(i)];

  Branch<Real> branch;
  branch.problem = seed.problem;
  branch.grid = g;
  branch.direction = seed.direction;
  branch.points.push_back(
      BranchPoint<Real>{Real(0), seed.param_at_zero, make_zero(g), Real(0)});
  branch.points.push_back(seed.point);

  for (int k = 1; k <= n_steps; ++k) {
    const BranchPoint<Real>& prev = branch.points[branch.points.size() - 1];
    const BranchPoint<Real>& prev2 = branch.points[branch.points.size() - 2];
    const Real t = Real(seed.direction) * (seed.t0 + Real(k) * dt);

    SampledFunction<Real> x_pred = (t / prev.t) * prev.x;
    Real p_pred = prev.param;
    if (prev.t != prev2.t)
      p_pred += (prev.param - prev2.param) * (t - prev.t) / (prev.t - prev2.t);

    try {
      detail::AmplitudeSolve<Real> sol = detail::solve_at_amplitude(
          seed.problem, g, q, std::move(x_pred), p_pred, t, seed.newton);
      branch.points.push_back(BranchPoint<Real>{t, sol.param, std::move(sol.x), sol.residual_norm});
    } catch (const newton_error&) {
      branch.status = BranchStatus::early_stop;
      break;
    }
  }
  return branch;
}

}  // namespace rodbif
