#pragma once

// Spectral diagnostics of the linearization L = D4 + alpha D2 + beta I.
//
// The kernel dimension at a parameter point is estimated from the smallest
// singular values of the discretized operator.  The detection threshold
// scales like h^2 because on-ray singular values of the discrete operator
// are O(h^2) truncation residue, not exact zeros.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "rodbif/core_model.hpp"
#include "rodbif/detail/parallel.hpp"
#include "rodbif/discretization.hpp"
#include "rodbif/errors.hpp"

namespace rodbif {

/// Kernel diagnosis at one parameter point.
///
/// dim counts singular values below threshold; basis holds that many
/// vectors, re-orthonormalized in the averaged inner product; matched_modes
/// lists the closed-form mode index each basis vector aligns with (cosine
/// similarity >= 0.99), and similarities the corresponding alignments.
/// gap_factor = sigma_{dim+1} / max(sigma_dim, noise_floor) measures how
/// cleanly the spectrum separates; a report with gap_factor < 10 is flagged
/// borderline and should not be trusted without refining the grid.
template <class Real = double>
struct KernelReport {
  int dim = 0;
  std::array<Real, 3> singular_values{};  ///< three smallest, ascending
  std::vector<SampledFunction<Real>> basis;
  std::vector<int> matched_modes;
  std::vector<Real> similarities;
  Real noise_floor = Real(0);
  Real threshold = Real(0);
  Real gap_factor = Real(0);
  bool borderline = false;
};

/// Default kernel threshold: 10 h^2 scale with scale = max(1, alpha + beta),
/// an O(1) magnitude estimate of the low modes the threshold must separate.
template <class Real>
Real default_kernel_threshold(Real alpha, Real beta, const Grid<Real>& g) {
  const Real scale = std::max(Real(1), alpha + beta);
  return Real(10) * g.h * g.h * scale;
}

template <class Real>
KernelReport<Real> kernel_analysis(Real alpha, Real beta, const Grid<Real>& g,
                                   Real threshold = Real(0)) {
  if (threshold < Real(0)) throw config_error("kernel_analysis: threshold must be >= 0");
  KernelReport<Real> rep;
  rep.noise_floor = g.h * g.h * std::max(Real(1), alpha + beta);
  rep.threshold = threshold > Real(0) ? threshold : default_kernel_threshold(alpha, beta, g);

  const DiscreteOperator<Real> lin = assemble_linearized(alpha, beta, g);
  Eigen::BDCSVD<MatX<Real>> svd(lin.matrix(), Eigen::ComputeThinV);
  const VecX<Real>& sv = svd.singularValues();  // descending
  const int nf = static_cast<int>(sv.size());

  for (int k = 0; k < 3 && k < nf; ++k)
    rep.singular_values[static_cast<size_t>(k)] = sv[nf - 1 - k];

  int dim = 0;
  while (dim < nf && sv[nf - 1 - dim] < rep.threshold) ++dim;
  rep.dim = dim;

  const Real sigma_dim = dim > 0 ? sv[nf - dim] : Real(0);
  const Real sigma_next = dim < nf ? sv[nf - 1 - dim] : Real(0);
  rep.gap_factor = sigma_next / std::max(sigma_dim, rep.noise_floor);
  rep.borderline = rep.gap_factor < Real(10);

  // Kernel basis: smallest right singular vectors, Gram-Schmidt
  // re-orthonormalized under <.,.> (Euclidean orthonormality of the SVD
  // does not pair with Simpson weights).
  for (int k = 0; k < dim && k < 2; ++k) {
    SampledFunction<Real> v = make_zero(g);
    for (int i = 0; i < nf; ++i) v.values[static_cast<size_t>(i)] = svd.matrixV()(i, nf - 1 - k);
    for (const SampledFunction<Real>& b : rep.basis) v = v - inner_product(v, b) * b;
    const Real nv = l2_norm(v);
    if (nv > Real(0)) v = (Real(1) / nv) * v;
    rep.basis.push_back(std::move(v));
  }

  for (const SampledFunction<Real>& b : rep.basis) {
    Real best = Real(0);
    int best_m = 0;
    for (int m = 1; m <= 10; ++m) {
      const Real sim = std::abs(inner_product(b, sample_eigenfunction(m, g)));
      if (sim > best) {
        best = sim;
        best_m = m;
      }
    }
    rep.similarities.push_back(best);
    if (best >= Real(0.99)) rep.matched_modes.push_back(best_m);
  }
  std::sort(rep.matched_modes.begin(), rep.matched_modes.end());
  return rep;
}

/// Rectangle in the (alpha, beta) quadrant.
template <class Real = double>
struct ParamWindow {
  Real alpha_min, alpha_max;
  Real beta_min, beta_max;
};

/// One lattice point of a parameter scan.
template <class Real = double>
struct ScanCell {
  Real alpha;
  Real beta;
  Real sigma_min;
  Real sigma_2;
  int dim;
};

template <class Real = double>
struct BifurcationScan {
  ParamWindow<Real> window;
  int resolution = 0;
  std::vector<ScanCell<Real>> cells;  ///< beta-major: index = j * resolution + i
};

/// Evaluate (sigma_min, sigma_2, dim estimate) on a resolution^2 lattice
/// spanning the window inclusively.  Cells are independent, so the scan is
/// evaluated in parallel; results do not depend on the thread count.
template <class Real>
BifurcationScan<Real> scan_bifurcation_set(const ParamWindow<Real>& w, int resolution,
                                           const Grid<Real>& g) {
  if (resolution < 16) throw config_error("scan_bifurcation_set: resolution must be >= 16");
  if (!(w.alpha_min > Real(0)) || !(w.beta_min > Real(0)) || !(w.alpha_max > w.alpha_min) ||
      !(w.beta_max > w.beta_min))
    throw config_error("scan_bifurcation_set: window must be ordered and positive");

  BifurcationScan<Real> scan;
  scan.window = w;
  scan.resolution = resolution;
  scan.cells.resize(static_cast<size_t>(resolution) * static_cast<size_t>(resolution));

  const Real da = (w.alpha_max - w.alpha_min) / Real(resolution - 1);
  const Real db = (w.beta_max - w.beta_min) / Real(resolution - 1);
  detail::parallel_for(0, resolution * resolution, [&](int idx) {
    const int j = idx / resolution;
    const int i = idx % resolution;
    const Real alpha = w.alpha_min + Real(i) * da;
    const Real beta = w.beta_min + Real(j) * db;
    const DiscreteOperator<Real> lin = assemble_linearized(alpha, beta, g);
    Eigen::BDCSVD<MatX<Real>> svd(lin.matrix());
    const VecX<Real>& sv = svd.singularValues();
    const int nf = static_cast<int>(sv.size());
    const Real threshold = default_kernel_threshold(alpha, beta, g);
    int dim = 0;
    while (dim < nf && sv[nf - 1 - dim] < threshold) ++dim;
    scan.cells[static_cast<size_t>(idx)] =
        ScanCell<Real>{alpha, beta, sv[nf - 1], sv[nf - 2], dim};
  });
  return scan;
}

/// Eigenvalue of the discrete linearization closest to zero, signed, with
/// its eigenfunction normalized to <v, v> = 1.
///
/// The ghost rules reproduce each sampled mode's reflection symmetries
/// exactly, so the assembled operator is diagonalized by the sampled mode
/// family: the full spectrum is mu_k = c_k^2 + alpha c_k + beta with
/// c_k = -(4/h^2) sin^2(omega_k h / 2) for k = 1..n-1, and the pair
/// minimizing |mu_k| is returned in closed form.  lambda passes through
/// zero continuously when a parameter path crosses the selected mode's
/// ray; it jumps (without a zero) where the minimizer switches modes.
template <class Real = double>
struct SignedEigenpair {
  Real lambda = Real(0);
  int mode = 0;
  SampledFunction<Real> vector;
};

template <class Real>
Real discrete_mode_coefficient(int k, const Grid<Real>& g) {
  using std::sin;
  const Real sh = sin(mode_frequency(k, g.r) * g.h / Real(2));
  return -Real(4) / (g.h * g.h) * sh * sh;
}

template <class Real>
SignedEigenpair<Real> smallest_eigenpair(Real alpha, Real beta, const Grid<Real>& g) {
  int best = 1;
  Real best_mu = Real(0);
  for (int k = 1; k <= g.n - 1; ++k) {
    const Real ck = discrete_mode_coefficient(k, g);
    const Real mu = ck * ck + alpha * ck + beta;
    if (k == 1 || std::abs(mu) < std::abs(best_mu)) {
      best = k;
      best_mu = mu;
    }
  }
  SignedEigenpair<Real> out;
  out.lambda = best_mu;
  out.mode = best;
  out.vector = sample_eigenfunction(best, g);
  return out;
}

}  // namespace rodbif
