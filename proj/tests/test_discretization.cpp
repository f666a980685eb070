// Grid, quadrature, ghost-point elimination, discrete operator, residual
// and Jacobian.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "rodbif/detail/fitting.hpp"
#include "rodbif/discretization.hpp"

using namespace rodbif;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("grid construction") {
  const Grid<double> g = build_grid(11, 1.0);
  CHECK(g.n == 11);
  CHECK(g.h == 0.2);
  CHECK(g.node(0) == -1.0);
  CHECK(g.node(10) == 1.0);
  CHECK(g.node(5) == 0.0);

  CHECK_THROWS_AS(build_grid(9, 1.0), config_error);
  CHECK_THROWS_AS(build_grid(12, 1.0), config_error);
  CHECK_THROWS_AS(build_grid(11, 0.0), config_error);
}

TEST_CASE("composite Simpson weights integrate cubics exactly") {
  for (double r : {1.0, pi}) {
    const Grid<double> g = build_grid(41, r);
    const std::vector<double> w = simpson_weights(g);
    REQUIRE(static_cast<int>(w.size()) == g.n);

    double total = 0.0, quad = 0.0, cubic = 0.0;
    for (int i = 0; i < g.n; ++i) {
      const double s = g.node(i);
      total += w[static_cast<size_t>(i)];
      quad += w[static_cast<size_t>(i)] * s * s;
      cubic += w[static_cast<size_t>(i)] * s * s * s;
    }
    CHECK(total == Catch::Approx(2.0 * r).epsilon(1e-14));
    CHECK(quad == Catch::Approx(2.0 * r * r * r / 3.0).epsilon(1e-13));
    CHECK(std::abs(cubic) <= 1e-13 * r * r * r * r);
  }
}

TEST_CASE("sampled kernel modes are near-orthonormal in the averaged product") {
  const Grid<double> g = build_grid(201, pi);
  for (int m = 1; m <= 4; ++m) {
    const SampledFunction<double> e = sample_eigenfunction(m, g);
    CHECK(inner_product(e, e) == Catch::Approx(1.0).margin(1e-8));
  }
  const SampledFunction<double> e1 = sample_eigenfunction(1, g);
  const SampledFunction<double> e2 = sample_eigenfunction(2, g);
  CHECK(std::abs(inner_product(e1, e2)) <= 1e-8);
}

TEST_CASE("mismatched grids are rejected") {
  const Grid<double> a = build_grid(21, 1.0);
  const Grid<double> b = build_grid(23, 1.0);
  const SampledFunction<double> xa = make_zero(a);
  const SampledFunction<double> xb = make_zero(b);
  CHECK_THROWS_AS(xa + xb, shape_error);
  CHECK_THROWS_AS(inner_product(xa, xb), shape_error);
}

TEST_CASE("ghost elimination enforces the left symmetry conditions exactly") {
  const Grid<double> g = build_grid(31, 2.0);
  SampledFunction<double> x = make_zero(g);
  for (int i = 0; i < g.n; ++i)
    x.values[static_cast<size_t>(i)] = std::sin(1.7 * g.node(i)) + 0.3 * g.node(i) * g.node(i);
  x.values[static_cast<size_t>(g.n - 1)] = 0.0;

  const auto d = detail::derivatives_with_bcs(x);
  CHECK(d.d1[0] == 0.0);  // (x_1 - x_{-1}) / 2h with the reflected ghost
  CHECK(d.d3[0] == 0.0);
}

TEST_CASE("linearized operator stencil rows carry the expected coefficients") {
  const double alpha = 1.0, beta = 0.2;
  const Grid<double> g = build_grid(51, pi);
  const DiscreteOperator<double> L = assemble_linearized(alpha, beta, g);
  const double h2 = g.h * g.h, h4 = h2 * h2;
  const int mid = (g.n - 1) / 2;

  CHECK(L.matrix()(mid, mid + 2) * h4 == Catch::Approx(1.0).margin(1e-12));
  CHECK(L.matrix()(mid, mid - 2) * h4 == Catch::Approx(1.0).margin(1e-12));
  CHECK(L.matrix()(mid, mid + 1) * h4 == Catch::Approx(-4.0 + alpha * h2).margin(1e-12));
  CHECK(L.matrix()(mid, mid) * h4 == Catch::Approx(6.0 - 2.0 * alpha * h2 + beta * h4).margin(1e-12));
}

TEST_CASE("linearized operator reproduces its eigenvalues at second order") {
  const double alpha = 1.0, beta = 0.2;
  for (int m : {1, 2}) {
    std::vector<double> hs, errs;
    for (int n : {51, 101, 201}) {
      const Grid<double> g = build_grid(n, pi);
      const DiscreteOperator<double> L = assemble_linearized(alpha, beta, g);
      const SampledFunction<double> e = sample_eigenfunction(m, g);
      const double c = mode_coefficient(m, pi);
      const double mu = c * c + alpha * c + beta;
      const SampledFunction<double> le = L.apply(e);
      double err = 0.0;
      for (int i = 0; i < g.n - 1; ++i)
        err = std::max(err, std::abs(le.values[static_cast<size_t>(i)] -
                                     mu * e.values[static_cast<size_t>(i)]));
      hs.push_back(g.h);
      errs.push_back(err);
    }
    const double order = detail::log_log_slope(hs, errs);
    INFO("mode " << m << " fitted order " << order);
    CHECK(order >= 1.9);
    CHECK(order <= 2.5);
  }
}

TEST_CASE("residual vanishes on the trivial family and is odd") {
  const Params<double> p(1.0, 0.2, 1.0, pi);
  const Grid<double> g = build_grid(101, pi);

  const SampledFunction<double> zero = make_zero(g);
  const SampledFunction<double> rz = residual(zero, p);
  for (double v : rz.values) CHECK(v == 0.0);

  SampledFunction<double> x = make_zero(g);
  for (int i = 0; i < g.n - 1; ++i)
    x.values[static_cast<size_t>(i)] =
        0.1 * std::cos(0.25 * (g.node(i) + pi)) + 0.03 * std::cos(0.75 * (g.node(i) + pi));
  const SampledFunction<double> rp = residual(x, p);
  const SampledFunction<double> rm = residual(-1.0 * x, p);
  for (size_t i = 0; i < rp.values.size(); ++i) CHECK(rm.values[i] == -rp.values[i]);
}

TEST_CASE("residual of a small on-ray kernel perturbation is small") {
  const double alpha = 1.0;
  const double beta = ray_beta(1, alpha, pi);
  const Params<double> p(alpha, beta, 1.0, pi);
  const Grid<double> g = build_grid(201, pi);
  const SampledFunction<double> e = sample_eigenfunction(1, g);
  const double t = 1e-3;
  const SampledFunction<double> res = residual(t * e, p);
  CHECK(sup_norm(res) <= 1e-7);
}

TEST_CASE("Jacobian matches directional differences of the residual") {
  const Params<double> p(1.0, 0.2, 1.0, pi);
  const Grid<double> g = build_grid(101, pi);
  SampledFunction<double> x = 0.05 * sample_eigenfunction(1, g) + 0.02 * sample_eigenfunction(2, g);
  const SampledFunction<double> v = sample_eigenfunction(2, g);
  const DiscreteOperator<double> J = jacobian(x, p);

  const int nf = g.n - 1;
  VecX<double> jv(nf);
  {
    VecX<double> vf(nf);
    for (int i = 0; i < nf; ++i) vf[i] = v.values[static_cast<size_t>(i)];
    jv = J.matrix() * vf;
  }

  const auto diff_at = [&](double eps) {
    const SampledFunction<double> fp = residual(x + eps * v, p);
    const SampledFunction<double> fm = residual(x + (-eps) * v, p);
    double worst = 0.0;
    for (int i = 0; i < nf; ++i) {
      const size_t k = static_cast<size_t>(i);
      worst = std::max(worst, std::abs((fp.values[k] - fm.values[k]) / (2.0 * eps) - jv[i]));
    }
    return worst;
  };

  CHECK(diff_at(1e-3) <= 1e-4);

  const std::vector<double> eps{3e-2, 3e-3};
  const std::vector<double> errs{diff_at(eps[0]), diff_at(eps[1])};
  const double order = detail::log_log_slope(eps, errs);
  INFO("directional difference order " << order);
  CHECK(order >= 1.9);
  CHECK(order <= 2.5);
}

TEST_CASE("Jacobian at the trivial state is the linearized operator, bitwise") {
  for (double gamma : {0.0, 1.0, 7.0}) {
    const Params<double> p(1.0, 0.2, gamma, pi);
    const Grid<double> g = build_grid(51, pi);
    const DiscreteOperator<double> J = jacobian(make_zero(g), p);
    const DiscreteOperator<double> L = assemble_linearized(p.alpha, p.beta, g);
    CHECK((J.matrix() - L.matrix()).cwiseAbs().maxCoeff() == 0.0);
  }
}
