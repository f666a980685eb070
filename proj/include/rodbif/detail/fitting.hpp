#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "rodbif/errors.hpp"

namespace rodbif::detail {

/// Least-squares slope of log(y) against log(x); the empirical convergence
/// or smallness order of y ~ C x^p.  All inputs must be positive.
template <class Real>
Real log_log_slope(const std::vector<Real>& x, const std::vector<Real>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw config_error("log_log_slope: need two or more matched samples");
  const size_t n = x.size();
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    if (!(x[i] > Real(0)) || !(y[i] > Real(0)))
      throw domain_error("log_log_slope: samples must be positive");
    const Real lx = std::log(x[i]);
    const Real ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const Real nn = Real(n);
  return (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
}

}  // namespace rodbif::detail
