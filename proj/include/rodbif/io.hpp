#pragma once

// Deterministic text output.  Floats are printed with 17 significant
// digits (%.17g), enough for exact double round-trips, so identical inputs
// produce byte-identical files.  CSV follows RFC-4180 conventions: header
// row, comma separators, CRLF line endings.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "rodbif/continuation.hpp"
#include "rodbif/linear_analysis.hpp"

namespace rodbif {

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string json_number_array(const std::vector<double>& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_real(v[i]);
  }
  out += "]";
  return out;
}

inline std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ",";
    out += fields[i];
  }
  out += "\r\n";
  return out;
}

/// One JSON object per line:
/// {"t": ..., "param_name": ..., "param_value": ..., "residual_norm": ..., "x": [...]}
/// x_stride downsamples the profile (every stride-th node starting at the
/// left end); stride 0 omits the profile entirely.
inline void write_branch_json_lines(const Branch<double>& branch, std::ostream& os,
                                    int x_stride = 1) {
  if (x_stride < 0) throw config_error("write_branch_json_lines: x_stride must be >= 0");
  const char* name = branch.problem.free == FreeParameter::alpha ? "alpha" : "beta";
  for (const BranchPoint<double>& pt : branch.points) {
    os << "{\"t\":" << format_real(pt.t) << ",\"param_name\":\"" << name
       << "\",\"param_value\":" << format_real(pt.param)
       << ",\"residual_norm\":" << format_real(pt.residual_norm);
    if (x_stride > 0) {
      os << ",\"x\":[";
      bool first = true;
      for (size_t i = 0; i < pt.x.values.size(); i += static_cast<size_t>(x_stride)) {
        if (!first) os << ",";
        first = false;
        os << format_real(pt.x.values[i]);
      }
      os << "]";
    }
    os << "}\n";
  }
}

/// Scan lattice as CSV with columns alpha,beta,sigma_min,sigma_2,dim.
inline void write_scan_csv(const BifurcationScan<double>& scan, std::ostream& os) {
  os << csv_row({"alpha", "beta", "sigma_min", "sigma_2", "dim"});
  for (const ScanCell<double>& c : scan.cells) {
    os << csv_row({format_real(c.alpha), format_real(c.beta), format_real(c.sigma_min),
                   format_real(c.sigma_2), std::to_string(c.dim)});
  }
}

}  // namespace rodbif
