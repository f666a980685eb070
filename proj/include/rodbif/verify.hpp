#pragma once

// Acceptance checks: end-to-end numerical claims the build must satisfy,
// each with a frozen tolerance.  `quick` runs the fast subset (no grid
// refinement studies, one foundation coefficient); `full` runs everything.
// Workhorse settings: r = pi, n = 201 unless a check states otherwise.

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "rodbif/continuation.hpp"
#include "rodbif/core_model.hpp"
#include "rodbif/detail/fitting.hpp"
#include "rodbif/discretization.hpp"
#include "rodbif/energy.hpp"
#include "rodbif/io.hpp"
#include "rodbif/linear_analysis.hpp"
#include "rodbif/lyapunov_schmidt.hpp"

namespace rodbif {

enum class VerifyLevel { quick, full };
enum class CheckStatus { pass, fail, skip };

struct CheckResult {
  std::string id;
  std::string name;
  CheckStatus status = CheckStatus::pass;
  std::string details;
};

namespace detail {

inline void expect(CheckResult& r, bool cond, const std::string& what) {
  if (!cond) {
    r.status = CheckStatus::fail;
    r.details += " [failed: " + what + "]";
  }
}

template <class F>
CheckResult guarded_check(const std::string& id, const std::string& name, F&& f) {
  CheckResult r{id, name, CheckStatus::pass, ""};
  try {
    f(r);
  } catch (const std::exception& e) {
    r.status = CheckStatus::fail;
    r.details += std::string(" [exception: ") + e.what() + "]";
  }
  return r;
}

/// A quartic satisfying all four boundary conditions but none of the mode
/// symmetries; sup-normalized.  Generic test material for pairing checks.
template <class Real>
SampledFunction<Real> boundary_compatible_quartic(const Grid<Real>& g) {
  const Real r = g.r;
  SampledFunction<Real> q = sample(g, [&](Real s) {
    return (s - r) * (s * s * s + Real(5) * r * s * s - Real(13) * r * r * s -
                      Real(57) * r * r * r);
  });
  const Real m = sup_norm(q);
  for (Real& v : q.values) v /= m;
  return q;
}

}  // namespace detail

inline CheckResult check_kernel_trichotomy() {
  return detail::guarded_check("A1", "kernel trichotomy at off-ray / ray / double point", [](CheckResult& r) {
    const double pi = std::numbers::pi;
    const Grid<double> g = build_grid(201, pi);
    std::ostringstream d;

    const KernelReport<double> r0 = kernel_analysis(1.0, 0.2, g);
    detail::expect(r, r0.dim == 0, "off-ray point must report dim 0");
    detail::expect(r, r0.gap_factor >= 10.0, "off-ray gap_factor >= 10");

    const KernelReport<double> r1 = kernel_analysis(1.0, ray_beta(1, 1.0, pi), g);
    detail::expect(r, r1.dim == 1, "ray point must report dim 1");
    detail::expect(r, r1.matched_modes == std::vector<int>{1}, "ray kernel must match mode 1");
    detail::expect(r, !r1.similarities.empty() && r1.similarities[0] >= 0.999,
                   "mode-1 cosine similarity >= 0.999");
    detail::expect(r, r1.gap_factor >= 10.0, "ray gap_factor >= 10");

    const DoublePoint<double> dp = double_point(1, 2, pi);
    const KernelReport<double> r2 = kernel_analysis(dp.alpha0, dp.beta0, g);
    detail::expect(r, r2.dim == 2, "double point must report dim 2");
    detail::expect(r, (r2.matched_modes == std::vector<int>{1, 2}),
                   "double-point kernel must match modes 1 and 2");
    detail::expect(r, r2.gap_factor >= 10.0, "double-point gap_factor >= 10");

    d << "dims=(" << r0.dim << "," << r1.dim << "," << r2.dim << ")"
      << " sims=(" << format_real(r1.similarities.empty() ? 0.0 : r1.similarities[0]) << ")"
      << " gaps=(" << format_real(r0.gap_factor) << "," << format_real(r1.gap_factor) << ","
      << format_real(r2.gap_factor) << ")";
    r.details = d.str() + r.details;
  });
}

inline CheckResult check_operator_convergence_order(VerifyLevel level) {
  if (level == VerifyLevel::quick)
    return CheckResult{"A2", "operator convergence order (grid refinement)", CheckStatus::skip,
                       "refinement study runs at level full"};
  return detail::guarded_check("A2", "operator convergence order (grid refinement)", [](CheckResult& r) {
    // Extended precision: at n = 401 the h^2 truncation signal of the
    // five-point stencil sits near the double-precision cancellation floor,
    // which would corrupt the fitted order.
    using Real = long double;
    const Real pi = std::numbers::pi_v<Real>;
    const Real alpha = 1.0L, beta = 0.2L;
    std::ostringstream d;
    for (int m = 1; m <= 2; ++m) {
      const Real mu = [&] {
        const Real c = mode_coefficient(m, pi);
        return c * c + alpha * c + beta;
      }();
      std::vector<Real> hs, errs;
      for (int n : {101, 201, 401}) {
        const Grid<Real> g = build_grid(n, pi);
        const SampledFunction<Real> e = sample_eigenfunction(m, g);
        const SampledFunction<Real> le = assemble_linearized(alpha, beta, g).apply(e);
        Real err = 0;
        for (int i = 0; i < g.n - 1; ++i)
          err = std::max(err, std::abs(le.values[static_cast<size_t>(i)] -
                                       mu * e.values[static_cast<size_t>(i)]));
        hs.push_back(g.h);
        errs.push_back(err);
      }
      const Real order = rodbif::detail::log_log_slope(hs, errs);
      d << "mode" << m << "_order=" << format_real(static_cast<double>(order)) << " ";
      detail::expect(r, order >= 1.9L, "fitted order >= 1.9 for mode " + std::to_string(m));
    }
    r.details = d.str() + r.details;
  });
}

inline CheckResult check_gradient_pairing(VerifyLevel level) {
  return detail::guarded_check("A3", "energy gradient pairs with the residual", [level](CheckResult& r) {
    const double pi = std::numbers::pi;
    const Params<double> p(1.0, 0.2, 1.0, pi);
    const auto discrepancy = [&](int n) {
      const Grid<double> g = build_grid(n, pi);
      const SampledFunction<double> x = 0.05 * sample_eigenfunction(1, g);
      const SampledFunction<double> h = sample_eigenfunction(2, g);
      return gradient_pairing_check(x, h, p, 1e-5);
    };
    const double d201 = discrepancy(201);
    std::ostringstream d;
    d << "d201=" << format_real(d201);
    detail::expect(r, d201 <= 1e-6, "discrepancy at n=201 <= 1e-6");
    if (level == VerifyLevel::full) {
      const double d401 = discrepancy(401);
      d << " d401=" << format_real(d401) << " ratio=" << format_real(d201 / d401);
      detail::expect(r, d201 / d401 >= 2.5,
                     "refinement shrinks the discrepancy by at least ~4x (allowing >= 2.5x)");
    }
    r.details = d.str() + r.details;
  });
}

inline CheckResult check_discrete_self_adjointness(VerifyLevel level) {
  if (level == VerifyLevel::quick)
    return CheckResult{"A4", "discrete self-adjointness decays at rate h^2", CheckStatus::skip,
                       "refinement study runs at level full"};
  return detail::guarded_check("A4", "discrete self-adjointness decays at rate h^2", [](CheckResult& r) {
    const double pi = std::numbers::pi;
    const double alpha = 1.0, beta = 0.2;
    std::ostringstream d;
    // Five pairs of smooth boundary-compatible functions; the quartic keeps
    // each pair generic (pure mode pairs are superconvergent by symmetry).
    for (int pair_id = 0; pair_id < 5; ++pair_id) {
      std::vector<double> hs, asyms;
      for (int n : {101, 201, 401}) {
        const Grid<double> g = build_grid(n, pi);
        const SampledFunction<double> q = detail::boundary_compatible_quartic(g);
        SampledFunction<double> gfun = q;
        SampledFunction<double> hfun = q;
        switch (pair_id) {
          case 0: hfun = sample_eigenfunction(1, g); break;
          case 1: hfun = sample_eigenfunction(2, g); break;
          case 2: hfun = sample_eigenfunction(1, g) + 0.5 * sample_eigenfunction(3, g); break;
          case 3:
            gfun = q + 0.3 * sample_eigenfunction(2, g);
            hfun = sample_eigenfunction(1, g);
            break;
          default: hfun = sample_eigenfunction(4, g); break;
        }
        const DiscreteOperator<double> L = assemble_linearized(alpha, beta, g);
        const double asym =
            std::abs(inner_product(L.apply(hfun), gfun) - inner_product(hfun, L.apply(gfun)));
        hs.push_back(g.h);
        asyms.push_back(asym);
      }
      const double order = rodbif::detail::log_log_slope(hs, asyms);
      d << "pair" << pair_id << "_order=" << format_real(order) << " ";
      detail::expect(r, order >= 1.9,
                     "pairing asymmetry order >= 1.9 for pair " + std::to_string(pair_id));
    }
    r.details = d.str() + r.details;
  });
}

inline CheckResult check_transversality_coefficients() {
  return detail::guarded_check("A5", "transversality coefficients match closed form", [](CheckResult& r) {
    const double pi = std::numbers::pi;
    const Grid<double> g = build_grid(201, pi);
    const Params<double> p(1.0, 0.2, 1.0, pi);
    const TransversalityCoefficients<double> tc = crandall_rabinowitz_coefficients(1, p, g);
    const double c1 = mode_coefficient(1, pi);
    std::ostringstream d;
    d << "d_alpha=" << format_real(tc.d_alpha) << " d_beta=" << format_real(tc.d_beta);
    detail::expect(r, std::abs(tc.d_alpha - c1) <= 0.01 * std::abs(c1),
                   "d_alpha within 1% of c_1 = -0.0625");
    detail::expect(r, std::abs(tc.d_beta - 1.0) <= 0.01, "d_beta within 1% of 1");
    detail::expect(r, tc.d_alpha < 0.0 && tc.d_beta > 0.0, "signs d_alpha < 0 < d_beta");
    r.details = d.str() + r.details;
  });
}

inline CheckResult check_reduced_jacobian_agreement() {
  return detail::guarded_check("A6", "numeric reduced Jacobian matches closed form", [](CheckResult& r) {
    const double pi = std::numbers::pi;
    const Grid<double> g = build_grid(201, pi);
    const ReductionContext<double> ctx = make_reduction_context(1, 2, pi, 1.0, g);
    const double targets[2] = {-6.22e-4, 4.73e-3};
    const double slopes[2] = {0.3, 1.0};
    std::ostringstream d;
    for (int k = 0; k < 2; ++k) {
      const double alpha = ctx.dp.alpha0 + 0.1;
      const double beta = ctx.dp.beta0 + slopes[k] * 0.1;
      const ReducedJacobianClosedForm<double> closed =
          reduced_jacobian_closed_form(alpha, beta, 1, 2, pi);
      const Eigen::Matrix2d num = reduced_jacobian_numeric(alpha, beta, ctx);
      d << "slope=" << format_real(slopes[k]) << " det_cf=" << format_real(closed.det)
        << " det_num=" << format_real(num.determinant()) << " ";
      detail::expect(r, std::abs(num(0, 1)) <= 1e-4 && std::abs(num(1, 0)) <= 1e-4,
                     "off-diagonal entries <= 1e-4");
      for (int i = 0; i < 2; ++i)
        detail::expect(r,
                       std::abs(num(i, i) - closed.diagonal[static_cast<size_t>(i)]) <=
                           0.02 * std::abs(closed.diagonal[static_cast<size_t>(i)]),
                       "diagonal entry within 2% of closed form");
      detail::expect(r, std::abs(closed.det - targets[k]) <= 1e-3 * std::abs(targets[k]),
                     "closed-form determinant within 0.1% of its reference value");
    }
    r.details = d.str() + r.details;
  });
}

inline CheckResult check_degree_flip(VerifyLevel level) {
  return detail::guarded_check("A7", "winding number flips across the cone", [level](CheckResult& r) {
    const double pi = std::numbers::pi;
    const Grid<double> g = build_grid(201, pi);
    std::ostringstream d;
    const std::vector<double> gammas =
        level == VerifyLevel::full ? std::vector<double>{0.0, 1.0} : std::vector<double>{1.0};
    for (double gamma0 : gammas) {
      const ReductionContext<double> ctx = make_reduction_context(1, 2, pi, gamma0, g);
      const int w_in = winding_degree(ctx.dp.alpha0 + 1e-2, ctx.dp.beta0 + 0.3 * 1e-2, ctx);
      const int w_out = winding_degree(ctx.dp.alpha0 + 1e-2, ctx.dp.beta0 + 1.0 * 1e-2, ctx);
      d << "gamma0=" << format_real(gamma0) << " w(0.3)=" << w_in << " w(1.0)=" << w_out << " ";
      detail::expect(r, w_in == -1, "slope 0.3 (inside the cone) must wind -1");
      detail::expect(r, w_out == 1, "slope 1.0 (outside the cone) must wind +1");
    }
    r.details = d.str() + r.details;
  });
}

inline CheckResult check_pitchfork_branches() {
  return detail::guarded_check("A8", "pitchfork branches in both parameters", [](CheckResult& r) {
    const double pi = std::numbers::pi;
    const Grid<double> g = build_grid(201, pi);
    std::ostringstream d;
    for (int which = 0; which < 2; ++which) {
      BranchProblem<double> prob;
      prob.mode = 1;
      prob.gamma = 1.0;
      prob.r = pi;
      if (which == 0) {
        prob.free = FreeParameter::alpha;
        prob.fixed_value = ray_beta(1, 1.0, pi);
      } else {
        prob.free = FreeParameter::beta;
        prob.fixed_value = 1.0;
      }
      const double bif = ray_crossing_value(prob);
      const BranchSeed<double> seed = branch_switch(bif, prob, g, 1, 1e-3);
      const Branch<double> branch = continue_branch(seed, 18, 5.5e-3);

      detail::expect(r, branch.status == BranchStatus::complete, "branch completes its steps");
      double max_res = 0.0;
      for (const BranchPoint<double>& pt : branch.points) max_res = std::max(max_res, pt.residual_norm);
      detail::expect(r, max_res <= 1e-9, "all residual norms <= 1e-9");
      detail::expect(r, std::abs(branch.points.back().t) >= 0.1 - 1e-12, "branch reaches t = 0.1");

      std::vector<double> ts, dps;
      for (const BranchPoint<double>& pt : branch.points) {
        if (pt.t <= 0.0) continue;
        ts.push_back(pt.t);
        dps.push_back(std::abs(pt.param - branch.points.front().param));
      }
      const double order = rodbif::detail::log_log_slope(ts, dps);
      detail::expect(r, order >= 1.9, "parameter shift fits t^p with p >= 1.9");

      const SampledFunction<double> e = sample_eigenfunction(1, g);
      const SampledFunction<double>& xs = seed.point.x;
      const double sim = std::abs(inner_product(xs, e)) / l2_norm(xs);
      detail::expect(r, sim >= 0.999, "seed profile aligns with the kernel mode");

      const BranchSeed<double> seed_neg = branch_switch(bif, prob, g, -1, 1e-3);
      const Branch<double> mirror = continue_branch(seed_neg, 18, 5.5e-3);
      detail::expect(r, mirror.points.size() == branch.points.size(), "mirror branch has equal length");
      double max_diff = 0.0;
      for (size_t k = 0; k < std::min(mirror.points.size(), branch.points.size()); ++k) {
        const SampledFunction<double> sum = mirror.points[k].x + branch.points[k].x;
        max_diff = std::max(max_diff, sup_norm(sum));
      }
      detail::expect(r, max_diff <= 1e-8, "direction-negated branch is the pointwise negation");

      d << (which == 0 ? "alpha" : "beta") << ": order=" << format_real(order)
        << " max_res=" << format_real(max_res) << " mirror_diff=" << format_real(max_diff) << " ";
    }
    r.details = d.str() + r.details;
  });
}

inline CheckResult check_gamma_invariance() {
  return detail::guarded_check("A9", "linear stage and degrees invariant under gamma", [](CheckResult& r) {
    const double pi = std::numbers::pi;
    const Grid<double> g = build_grid(201, pi);
    const DoublePoint<double> dp = double_point(1, 2, pi);
    const double points[3][2] = {{1.0, 0.2}, {1.0, ray_beta(1, 1.0, pi)}, {dp.alpha0, dp.beta0}};
    std::ostringstream d;
    for (const auto& pt : points) {
      const DiscreteOperator<double> L = assemble_linearized(pt[0], pt[1], g);
      for (double gamma : {0.0, 1.0, 10.0}) {
        const Params<double> p(pt[0], pt[1], gamma, pi);
        const SampledFunction<double> zero = make_zero(g);
        const double diff = (jacobian(zero, p).matrix() - L.matrix()).cwiseAbs().maxCoeff();
        detail::expect(r, diff == 0.0,
                       "linearization at the trivial state is gamma-independent, entry for entry");
      }
    }
    // The kernel reports consume only that matrix, so they are identical
    // across gamma; the degrees must agree as well even though the Newton
    // iterates behind them differ.
    std::vector<int> w_in, w_out;
    for (double gamma : {0.0, 1.0, 10.0}) {
      const ReductionContext<double> ctx = make_reduction_context(1, 2, pi, gamma, g);
      w_in.push_back(winding_degree(ctx.dp.alpha0 + 1e-2, ctx.dp.beta0 + 0.3 * 1e-2, ctx));
      w_out.push_back(winding_degree(ctx.dp.alpha0 + 1e-2, ctx.dp.beta0 + 1.0 * 1e-2, ctx));
    }
    d << "w_in=(" << w_in[0] << "," << w_in[1] << "," << w_in[2] << ")"
      << " w_out=(" << w_out[0] << "," << w_out[1] << "," << w_out[2] << ")";
    detail::expect(r, w_in[0] == w_in[1] && w_in[1] == w_in[2], "inside-cone winding gamma-invariant");
    detail::expect(r, w_out[0] == w_out[1] && w_out[1] == w_out[2], "outside-cone winding gamma-invariant");
    r.details = d.str() + r.details;
  });
}

inline CheckResult check_energy_truncation_order() {
  return detail::guarded_check("A10", "physical energy matches truncation to order > 4", [](CheckResult& r) {
    const double pi = std::numbers::pi;
    const Grid<double> g = build_grid(201, pi);
    const Params<double> p(1.0, 0.2, 1.0, pi);
    const PhysicalParams<double> q = from_params(p, 2.5);
    const SampledFunction<double> e = sample_eigenfunction(1, g);
    std::vector<double> ts, ds;
    for (double t : {0.02, 0.04, 0.08}) {
      const SampledFunction<double> x = t * e;
      const double exact = exact_total_energy(x, q) / (2.0 * pi * q.youngs_times_inertia);
      const double truncated = total_energy(x, p);
      ts.push_back(t);
      ds.push_back(std::abs(exact - truncated));
    }
    const double order = rodbif::detail::log_log_slope(ts, ds);
    std::ostringstream d;
    d << "order=" << format_real(order) << " d=(" << format_real(ds[0]) << "," << format_real(ds[1])
      << "," << format_real(ds[2]) << ")";
    detail::expect(r, order >= 5.5, "difference fits t^p with p >= 5.5");
    r.details = d.str() + r.details;
  });
}

inline std::vector<CheckResult> run_acceptance_checks(VerifyLevel level) {
  std::vector<CheckResult> out;
  out.push_back(check_kernel_trichotomy());
  out.push_back(check_operator_convergence_order(level));
  out.push_back(check_gradient_pairing(level));
  out.push_back(check_discrete_self_adjointness(level));
  out.push_back(check_transversality_coefficients());
  out.push_back(check_reduced_jacobian_agreement());
  out.push_back(check_degree_flip(level));
  out.push_back(check_pitchfork_branches());
  out.push_back(check_gamma_invariance());
  out.push_back(check_energy_truncation_order());
  return out;
}

}  // namespace rodbif
