// Averaged energy, its exact (non-truncated) counterpart, the variational
// pairing with the residual, and the transversality coefficients.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "rodbif/detail/fitting.hpp"
#include "rodbif/energy.hpp"

using namespace rodbif;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("physical and dimensionless parameters round-trip") {
  const Params<double> p(1.0, 0.2, 0.7, pi);
  const PhysicalParams<double> q = from_params(p, 2.5);
  CHECK(q.lambda == Catch::Approx(2.5).epsilon(1e-15));
  CHECK(q.mu == Catch::Approx(0.5).epsilon(1e-15));
  const Params<double> back = to_params(q, pi);
  CHECK(back.alpha == Catch::Approx(p.alpha).epsilon(1e-15));
  CHECK(back.beta == Catch::Approx(p.beta).epsilon(1e-15));
  CHECK(back.gamma == Catch::Approx(p.gamma).epsilon(1e-15));

  CHECK_THROWS_AS(from_params(p, 0.0), domain_error);
  CHECK_THROWS_AS(to_params(PhysicalParams<double>{1.0, 0.2, 0.0, -1.0}, pi), domain_error);
}

TEST_CASE("energy vanishes on the trivial family") {
  const Grid<double> g = build_grid(101, pi);
  const Params<double> p(1.0, 0.2, 1.0, pi);
  CHECK(total_energy(make_zero(g), p) == 0.0);
}

TEST_CASE("energy curvature along mode one at an off-ray point") {
  const Grid<double> g = build_grid(201, pi);
  const Params<double> p(1.0, 0.2, 1.0, pi);
  const SampledFunction<double> e = sample_eigenfunction(1, g);
  const double t = 1e-3;
  // quadratic coefficient (c^2 + alpha c + beta) / 2 = 0.070703125 at mode 1
  CHECK(total_energy(t * e, p) / (t * t) == Catch::Approx(0.070703125).margin(1e-4));
}

TEST_CASE("on the ray the quadratic term dies and the energy is quartic") {
  const double alpha = 1.0;
  const Params<double> p(alpha, ray_beta(1, alpha, pi), 1.0, pi);
  const Grid<double> g = build_grid(201, pi);
  const SampledFunction<double> e = sample_eigenfunction(1, g);

  const std::vector<double> ts{0.05, 0.1};
  std::vector<double> es;
  for (double t : ts) es.push_back(std::abs(total_energy(t * e, p)));
  const double order = detail::log_log_slope(ts, es);
  INFO("on-ray energy order " << order);
  CHECK(order >= 3.8);
  CHECK(order <= 4.2);
}

TEST_CASE("exact energy rejects profiles at or beyond unit slope") {
  const Grid<double> g = build_grid(21, 1.0);
  SampledFunction<double> x = make_zero(g);
  for (int i = 0; i < g.n; ++i) x.values[static_cast<size_t>(i)] = 1.2 * g.node(i);
  x.values[static_cast<size_t>(g.n - 1)] = 0.0;
  const PhysicalParams<double> q{1.0, 0.2, 0.0, 1.0};
  CHECK_THROWS_AS(exact_total_energy(x, q), domain_error);
  CHECK_THROWS_WITH(exact_total_energy(x, q), Catch::Matchers::ContainsSubstring("node"));
}

TEST_CASE("truncated energy agrees with the exact one to sixth order in amplitude") {
  const double ei = 2.5;
  const Params<double> p(1.0, 0.2, 1.0, pi);
  const PhysicalParams<double> q = from_params(p, ei);
  const Grid<double> g = build_grid(201, pi);
  const SampledFunction<double> e = sample_eigenfunction(1, g);

  const std::vector<double> ts{0.02, 0.04, 0.08};
  std::vector<double> ds;
  for (double t : ts) {
    const SampledFunction<double> x = t * e;
    const double coarse = total_energy(x, p);
    const double fine = exact_total_energy(x, q) / (2.0 * pi * ei);
    ds.push_back(std::abs(fine - coarse));
  }
  const double order = detail::log_log_slope(ts, ds);
  INFO("truncation order " << order << " at diffs " << ds[0] << " " << ds[1] << " " << ds[2]);
  CHECK(order >= 5.5);
}

TEST_CASE("residual is the averaged-product gradient of the energy") {
  const Grid<double> g = build_grid(201, pi);
  const Params<double> p(1.0, 0.2, 1.0, pi);
  const SampledFunction<double> e1 = sample_eigenfunction(1, g);
  const SampledFunction<double> e2 = sample_eigenfunction(2, g);

  CHECK(gradient_pairing_check(0.05 * e1, e2, p, 1e-5) <= 1e-6);
  CHECK(gradient_pairing_check(0.05 * e1 + 0.02 * e2, e1, p, 1e-5) <= 1e-6);

  // the large mode-2 state carries the biggest pairing defect; it is
  // consistency error, so it must shrink about 4x per grid doubling
  const double d201 = gradient_pairing_check(0.1 * e2, e2, p, 1e-5);
  CHECK(d201 <= 2e-5);
  const Grid<double> g4 = build_grid(401, pi);
  const double d401 = gradient_pairing_check(0.1 * sample_eigenfunction(2, g4),
                                             sample_eigenfunction(2, g4), p, 1e-5);
  CHECK(d201 / d401 >= 3.0);

  CHECK_THROWS_AS(gradient_pairing_check(0.05 * e1, e2, p, 0.0), domain_error);
}

TEST_CASE("transversality coefficients match the closed forms") {
  const Grid<double> g = build_grid(201, pi);

  for (int m : {1, 2}) {
    const Params<double> p(1.0, 0.2, 1.0, pi);
    const TransversalityCoefficients<double> tc = crandall_rabinowitz_coefficients(m, p, g);
    const double cm = mode_coefficient(m, pi);
    INFO("mode " << m << " d_alpha " << tc.d_alpha << " d_beta " << tc.d_beta);
    CHECK(std::abs(tc.d_alpha - cm) <= 0.01 * std::abs(cm));
    CHECK(std::abs(tc.d_beta - 1.0) <= 0.01);
    CHECK(tc.d_alpha < 0.0);
    CHECK(tc.d_beta > 0.0);
  }

  // the coefficients describe the quadratic form only; gamma cannot move them
  const Params<double> p0(1.0, 0.2, 0.0, pi);
  const Params<double> p10(1.0, 0.2, 10.0, pi);
  const TransversalityCoefficients<double> a = crandall_rabinowitz_coefficients(1, p0, g);
  const TransversalityCoefficients<double> b = crandall_rabinowitz_coefficients(1, p10, g);
  CHECK(std::abs(a.d_alpha - b.d_alpha) <= 1e-9);
  CHECK(std::abs(a.d_beta - b.d_beta) <= 1e-9);

  // still nondegenerate on the ray itself, where the branch actually crosses
  const Params<double> on(1.0, ray_beta(1, 1.0, pi), 1.0, pi);
  const TransversalityCoefficients<double> tcr = crandall_rabinowitz_coefficients(1, on, g);
  CHECK(tcr.d_alpha < 0.0);
  CHECK(tcr.d_beta > 0.0);
}
