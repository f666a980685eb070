#pragma once

// Finite-difference discretization on a uniform grid over [-r, r].
//
// Unknowns live at nodes s_i = -r + i h, i = 0..n-1, h = 2r/(n-1), n odd.
// Second-order central stencils are used for all four derivatives.  The
// boundary conditions are eliminated through ghost nodes:
//
//   x'(-r) = 0, x'''(-r) = 0   ->   x_{-1} = x_1,  x_{-2} = x_2
//   x(r) = 0                   ->   node n-1 is dropped from the unknowns
//   x''(r) = 0                 ->   x_n = 2 x_{n-1} - x_{n-2}
//
// so operators act on the n-1 free values x_0..x_{n-2}.  Integrals use
// composite Simpson weights and the averaged pairing
// <g, h> = (1/2r) integral of g h.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "rodbif/core_model.hpp"
#include "rodbif/errors.hpp"

namespace rodbif {

template <class Real = double>
using MatX = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real = double>
using VecX = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Uniform grid on [-r, r] with an odd number of nodes (Simpson needs an
/// even number of intervals; n >= 11 keeps all five-point stencils apart
/// from both ends).
template <class Real = double>
struct Grid {
  int n = 0;
  Real r = Real(0);
  Real h = Real(0);

  /// Node location; the form r (2i - (n-1))/(n-1) hits -r, 0, r exactly.
  Real node(int i) const { return r * Real(2 * i - (n - 1)) / Real(n - 1); }

  bool operator==(const Grid& o) const { return n == o.n && r == o.r; }
};

template <class Real>
Grid<Real> build_grid(int n, Real r) {
  if (!(r > Real(0))) throw config_error("build_grid: r must be > 0");
  if (n < 11 || n % 2 == 0) throw config_error("build_grid: n must be odd and >= 11");
  return Grid<Real>{n, r, Real(2) * r / Real(n - 1)};
}

/// Nodal values of a function on a grid.
template <class Real = double>
struct SampledFunction {
  Grid<Real> grid;
  std::vector<Real> values;
};

template <class Real>
SampledFunction<Real> make_zero(const Grid<Real>& g) {
  return SampledFunction<Real>{g, std::vector<Real>(static_cast<size_t>(g.n), Real(0))};
}

template <class Real, class F>
SampledFunction<Real> sample(const Grid<Real>& g, F&& f) {
  SampledFunction<Real> out = make_zero(g);
  for (int i = 0; i < g.n; ++i) out.values[static_cast<size_t>(i)] = f(g.node(i));
  return out;
}

template <class Real>
SampledFunction<Real> sample_eigenfunction(int m, const Grid<Real>& g) {
  return sample(g, [&](Real s) { return eigenfunction(m, g.r, s); });
}

namespace detail {
template <class Real>
void require_same_grid(const Grid<Real>& a, const Grid<Real>& b, const char* where) {
  if (!(a == b)) throw shape_error(std::string(where) + ": grid mismatch");
}
}  // namespace detail

template <class Real>
SampledFunction<Real> operator+(const SampledFunction<Real>& a, const SampledFunction<Real>& b) {
  detail::require_same_grid(a.grid, b.grid, "operator+");
  SampledFunction<Real> out = a;
  for (size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
  return out;
}

template <class Real>
SampledFunction<Real> operator-(const SampledFunction<Real>& a, const SampledFunction<Real>& b) {
  detail::require_same_grid(a.grid, b.grid, "operator-");
  SampledFunction<Real> out = a;
  for (size_t i = 0; i < out.values.size(); ++i) out.values[i] -= b.values[i];
  return out;
}

template <class Real>
SampledFunction<Real> operator*(Real c, const SampledFunction<Real>& a) {
  SampledFunction<Real> out = a;
  for (Real& v : out.values) v *= c;
  return out;
}

template <class Real>
SampledFunction<Real> operator-(const SampledFunction<Real>& a) {
  SampledFunction<Real> out = a;
  for (Real& v : out.values) v = -v;
  return out;
}

/// Composite Simpson weights; they sum to 2r.
template <class Real>
std::vector<Real> simpson_weights(const Grid<Real>& g) {
  std::vector<Real> w(static_cast<size_t>(g.n), Real(0));
  const Real third = g.h / Real(3);
  w.front() = third;
  w.back() = third;
  for (int i = 1; i < g.n - 1; ++i) w[static_cast<size_t>(i)] = (i % 2 == 1 ? Real(4) : Real(2)) * third;
  return w;
}

/// Averaged pairing <g, h> = (1/2r) integral g h, by composite Simpson.
/// Exact for cubic integrands, fourth-order accurate for smooth ones.
template <class Real>
Real inner_product(const SampledFunction<Real>& g, const SampledFunction<Real>& h) {
  detail::require_same_grid(g.grid, h.grid, "inner_product");
  const std::vector<Real> w = simpson_weights(g.grid);
  Real acc = Real(0);
  for (size_t i = 0; i < w.size(); ++i) acc += w[i] * g.values[i] * h.values[i];
  return acc / (Real(2) * g.grid.r);
}

template <class Real>
Real l2_norm(const SampledFunction<Real>& g) {
  using std::sqrt;
  return sqrt(inner_product(g, g));
}

template <class Real>
Real sup_norm(const SampledFunction<Real>& g) {
  Real m = Real(0);
  for (Real v : g.values) m = std::max(m, std::abs(v));
  return m;
}

namespace detail {

/// Scatter one stencil row into a matrix on the free unknowns, applying the
/// ghost substitutions.  `node` may range over [-2, n]; column `n-1` (the
/// Dirichlet node) is dropped, node n folds back as -x_{n-2} because the
/// x''(r) = 0 ghost formula is applied to vectors with x_{n-1} = 0.
template <class Real>
void scatter_stencil(MatX<Real>& M, int row, int node, Real coeff) {
  const int nfree = static_cast<int>(M.cols());
  if (node == -1) {
    M(row, 1) += coeff;
  } else if (node == -2) {
    M(row, 2) += coeff;
  } else if (node == nfree) {
    // x(r) = 0
  } else if (node == nfree + 1) {
    M(row, nfree - 1) -= coeff;
  } else {
    M(row, node) += coeff;
  }
}

/// Dense matrix of the k-th central-difference derivative (k = 1..4) on the
/// free unknowns, boundary conditions eliminated.
template <class Real>
MatX<Real> derivative_matrix(const Grid<Real>& g, int order) {
  const int nfree = g.n - 1;
  MatX<Real> M = MatX<Real>::Zero(nfree, nfree);
  const Real h = g.h;
  switch (order) {
    case 1: {
      const Real c = Real(1) / (Real(2) * h);
      for (int i = 0; i < nfree; ++i) {
        scatter_stencil(M, i, i - 1, -c);
        scatter_stencil(M, i, i + 1, c);
      }
      break;
    }
    case 2: {
      const Real c = Real(1) / (h * h);
      for (int i = 0; i < nfree; ++i) {
        scatter_stencil(M, i, i - 1, c);
        scatter_stencil(M, i, i, Real(-2) * c);
        scatter_stencil(M, i, i + 1, c);
      }
      break;
    }
    case 3: {
      const Real c = Real(1) / (Real(2) * h * h * h);
      for (int i = 0; i < nfree; ++i) {
        scatter_stencil(M, i, i - 2, -c);
        scatter_stencil(M, i, i - 1, Real(2) * c);
        scatter_stencil(M, i, i + 1, Real(-2) * c);
        scatter_stencil(M, i, i + 2, c);
      }
      break;
    }
    case 4: {
      const Real c = Real(1) / (h * h * h * h);
      for (int i = 0; i < nfree; ++i) {
        scatter_stencil(M, i, i - 2, c);
        scatter_stencil(M, i, i - 1, Real(-4) * c);
        scatter_stencil(M, i, i, Real(6) * c);
        scatter_stencil(M, i, i + 1, Real(-4) * c);
        scatter_stencil(M, i, i + 2, c);
      }
      break;
    }
    default:
      throw config_error("derivative_matrix: order must be 1..4");
  }
  return M;
}

/// Shared row assembler: row i receives
///   s4_i D4row + s2_i D2row + s1_i D1row + s3_i D3row + s0_i e_i^T.
/// Both the trivial-state linearization and the nonlinear Jacobian are
/// produced here, with identical scatter order, so the former is the exact
/// entry-for-entry special case of the latter.
template <class Real>
MatX<Real> assemble_rows(const Grid<Real>& g, const VecX<Real>& s0, const VecX<Real>& s1,
                         const VecX<Real>& s2, const VecX<Real>& s3, const VecX<Real>& s4) {
  const int nf = g.n - 1;
  MatX<Real> M = MatX<Real>::Zero(nf, nf);
  const Real h = g.h;
  const Real c1 = Real(1) / (Real(2) * h);
  const Real c2 = Real(1) / (h * h);
  const Real c3 = Real(1) / (Real(2) * h * h * h);
  const Real c4 = Real(1) / (h * h * h * h);
  const int o1[2] = {-1, 1};
  const Real k1[2] = {-c1, c1};
  const int o2[3] = {-1, 0, 1};
  const Real k2[3] = {c2, Real(-2) * c2, c2};
  const int o3[4] = {-2, -1, 1, 2};
  const Real k3[4] = {-c3, Real(2) * c3, Real(-2) * c3, c3};
  const int o4[5] = {-2, -1, 0, 1, 2};
  const Real k4[5] = {c4, Real(-4) * c4, Real(6) * c4, Real(-4) * c4, c4};
  for (int i = 0; i < nf; ++i) {
    for (int k = 0; k < 5; ++k) scatter_stencil(M, i, i + o4[k], s4[i] * k4[k]);
    for (int k = 0; k < 3; ++k) scatter_stencil(M, i, i + o2[k], s2[i] * k2[k]);
    for (int k = 0; k < 2; ++k) scatter_stencil(M, i, i + o1[k], s1[i] * k1[k]);
    for (int k = 0; k < 4; ++k) scatter_stencil(M, i, i + o3[k], s3[i] * k3[k]);
    M(i, i) += s0[i];
  }
  return M;
}

/// First four central-difference derivatives of a sampled function at every
/// node, ghost rules applied to the actual nodal values.  d3 and d4 are not
/// defined at the last node (it is the Dirichlet node) and are stored as 0.
template <class Real>
struct NodalDerivatives {
  std::vector<Real> d1, d2, d3, d4;
};

template <class Real>
NodalDerivatives<Real> derivatives_with_bcs(const SampledFunction<Real>& x) {
  const int n = x.grid.n;
  const Real h = x.grid.h;
  const std::vector<Real>& v = x.values;
  // Padded copy: p[k + 2] holds x_k for k = -2..n.
  std::vector<Real> p(static_cast<size_t>(n + 3), Real(0));
  for (int k = 0; k < n; ++k) p[static_cast<size_t>(k + 2)] = v[static_cast<size_t>(k)];
  p[1] = v[1];                                           // x_{-1} = x_1
  p[0] = v[2];                                           // x_{-2} = x_2
  p[static_cast<size_t>(n + 2)] =
      Real(2) * v[static_cast<size_t>(n - 1)] - v[static_cast<size_t>(n - 2)];  // x_n

  NodalDerivatives<Real> d;
  d.d1.assign(static_cast<size_t>(n), Real(0));
  d.d2.assign(static_cast<size_t>(n), Real(0));
  d.d3.assign(static_cast<size_t>(n), Real(0));
  d.d4.assign(static_cast<size_t>(n), Real(0));
  const Real i2h = Real(1) / (Real(2) * h);
  const Real ih2 = Real(1) / (h * h);
  const Real i2h3 = Real(1) / (Real(2) * h * h * h);
  const Real ih4 = Real(1) / (h * h * h * h);
  for (int i = 0; i < n; ++i) {
    const size_t c = static_cast<size_t>(i + 2);
    d.d1[static_cast<size_t>(i)] = (p[c + 1] - p[c - 1]) * i2h;
    d.d2[static_cast<size_t>(i)] = (p[c + 1] - Real(2) * p[c] + p[c - 1]) * ih2;
    if (i < n - 1) {
      // paired differences so both odd stencils vanish exactly at the
      // reflection node
      d.d3[static_cast<size_t>(i)] =
          ((p[c + 2] - p[c - 2]) - Real(2) * (p[c + 1] - p[c - 1])) * i2h3;
      d.d4[static_cast<size_t>(i)] = (p[c - 2] - Real(4) * p[c - 1] + Real(6) * p[c] - Real(4) * p[c + 1] + p[c + 2]) * ih4;
    }
  }
  return d;
}

}  // namespace detail

/// A dense linear operator on the free nodal values.  Input functions carry
/// all n nodes; the Dirichlet node n-1 is treated as constrained to zero,
/// and the output keeps a zero there so results pair directly with
/// inner_product.
template <class Real = double>
class DiscreteOperator {
 public:
  DiscreteOperator(const Grid<Real>& g, MatX<Real> m) : grid_(g), m_(std::move(m)) {
    if (m_.rows() != g.n - 1 || m_.cols() != g.n - 1)
      throw shape_error("DiscreteOperator: matrix must be (n-1) x (n-1)");
  }

  const Grid<Real>& grid() const { return grid_; }
  const MatX<Real>& matrix() const { return m_; }
  int free_count() const { return grid_.n - 1; }

  SampledFunction<Real> apply(const SampledFunction<Real>& x) const {
    detail::require_same_grid(grid_, x.grid, "DiscreteOperator::apply");
    const int nf = free_count();
    VecX<Real> xv(nf);
    for (int i = 0; i < nf; ++i) xv[i] = x.values[static_cast<size_t>(i)];
    VecX<Real> yv = m_ * xv;
    SampledFunction<Real> y = make_zero(grid_);
    for (int i = 0; i < nf; ++i) y.values[static_cast<size_t>(i)] = yv[i];
    return y;
  }

 private:
  Grid<Real> grid_;
  MatX<Real> m_;
};

/// Linearization about the straight state:  L = D4 + alpha D2 + beta I.
/// gamma never enters; the cubic terms have zero derivative at x == 0.
template <class Real>
DiscreteOperator<Real> assemble_linearized(Real alpha, Real beta, const Grid<Real>& g) {
  const int nf = g.n - 1;
  const VecX<Real> zero = VecX<Real>::Zero(nf);
  const VecX<Real> s0 = VecX<Real>::Constant(nf, beta);
  const VecX<Real> s2 = VecX<Real>::Constant(nf, alpha);
  const VecX<Real> s4 = VecX<Real>::Constant(nf, Real(1));
  return DiscreteOperator<Real>(g, detail::assemble_rows(g, s0, zero, s2, zero, s4));
}

/// Full nonlinear residual F(x) = x'''' + alpha x'' + beta x - f(...) at the
/// free nodes; the entry at the Dirichlet node is 0 by convention.  Odd in x.
template <class Real>
SampledFunction<Real> residual(const SampledFunction<Real>& x, const Params<Real>& p) {
  const detail::NodalDerivatives<Real> d = detail::derivatives_with_bcs(x);
  SampledFunction<Real> out = make_zero(x.grid);
  for (int i = 0; i < x.grid.n - 1; ++i) {
    const size_t k = static_cast<size_t>(i);
    out.values[k] = d.d4[k] + p.alpha * d.d2[k] + p.beta * x.values[k] -
                    nonlinearity_pointwise(x.values[k], d.d1[k], d.d2[k], d.d3[k], d.d4[k],
                                           p.alpha, p.gamma);
  }
  return out;
}

/// Jacobian of the residual at x:
///   J = D4 + alpha D2 + beta I
///       - diag(f_x) - diag(f_d1) D1 - diag(f_d2) D2 - diag(f_d3) D3 - diag(f_d4) D4,
/// with the nonlinearity partials evaluated at the nodal derivatives of x.
/// At x == 0 every partial vanishes and J reproduces assemble_linearized
/// exactly, entry for entry.
template <class Real>
DiscreteOperator<Real> jacobian(const SampledFunction<Real>& x, const Params<Real>& p) {
  const Grid<Real>& g = x.grid;
  const int nf = g.n - 1;
  const detail::NodalDerivatives<Real> d = detail::derivatives_with_bcs(x);

  VecX<Real> s0(nf), s1(nf), s2(nf), s3(nf), s4(nf);
  for (int i = 0; i < nf; ++i) {
    const size_t k = static_cast<size_t>(i);
    const NonlinearityPartials<Real> q = nonlinearity_partials(
        x.values[k], d.d1[k], d.d2[k], d.d3[k], d.d4[k], p.alpha, p.gamma);
    s0[i] = p.beta - q.fx;
    s1[i] = -q.fd1;
    s2[i] = p.alpha - q.fd2;
    s3[i] = -q.fd3;
    s4[i] = Real(1) - q.fd4;
  }
  return DiscreteOperator<Real>(g, detail::assemble_rows(g, s0, s1, s2, s3, s4));
}

/// Sensitivity of the residual to the load:  dF/dalpha = x'' + (3/2) x'^2 x''.
template <class Real>
SampledFunction<Real> residual_dalpha(const SampledFunction<Real>& x) {
  const detail::NodalDerivatives<Real> d = detail::derivatives_with_bcs(x);
  SampledFunction<Real> out = make_zero(x.grid);
  for (int i = 0; i < x.grid.n - 1; ++i) {
    const size_t k = static_cast<size_t>(i);
    out.values[k] = d.d2[k] + Real(3) / Real(2) * d.d1[k] * d.d1[k] * d.d2[k];
  }
  return out;
}

/// Sensitivity to the foundation coefficient:  dF/dbeta = x.
template <class Real>
SampledFunction<Real> residual_dbeta(const SampledFunction<Real>& x) {
  SampledFunction<Real> out = x;
  out.values[static_cast<size_t>(x.grid.n - 1)] = Real(0);
  return out;
}

}  // namespace rodbif
