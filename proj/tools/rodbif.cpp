// Command line front end for the rod bifurcation toolkit.
//
// Subcommands:
//   rays    tabulate the linearized bifurcation rays and their double points
//   kernel  diagnose the kernel of the linearized operator at one point
//   reduce  probe a double point: closed-form dets, numeric dets, windings
//   branch  switch onto a nontrivial branch and continue it in amplitude
//   verify  run the built-in acceptance checks
//
// Exit codes: 0 success, 1 verify reported failures, 2 usage or
// configuration error, 3 solver failure, 4 branch stopped early (partial
// output was still written).

#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rodbif/continuation.hpp"
#include "rodbif/core_model.hpp"
#include "rodbif/discretization.hpp"
#include "rodbif/errors.hpp"
#include "rodbif/io.hpp"
#include "rodbif/linear_analysis.hpp"
#include "rodbif/lyapunov_schmidt.hpp"
#include "rodbif/verify.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_checks_failed = 1;
constexpr int exit_usage = 2;
constexpr int exit_solver = 3;
constexpr int exit_partial = 4;

// Runs f against stdout or, when path is nonempty, against a fresh file.
void with_output(const std::string& path, const std::function<void(std::ostream&)>& f) {
  if (path.empty()) {
    f(std::cout);
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw rodbif::config_error("cannot open output file: " + path);
  f(os);
}

struct RaysOptions {
  double r = 0.0;
  double alpha_max = 0.0;
  int m_max = 5;
  int samples = 33;
  std::string format = "csv";
  std::string out;
};

int run_rays(const RaysOptions& o) {
  if (!(o.r > 0.0)) throw rodbif::domain_error("rays: --r must be > 0");
  if (!(o.alpha_max > 0.0)) throw rodbif::domain_error("rays: --alpha-max must be > 0");
  if (o.m_max < 1) throw rodbif::config_error("rays: --m-max must be >= 1");
  if (o.samples < 2) throw rodbif::config_error("rays: --samples must be >= 2");

  std::vector<rodbif::DoublePoint<double>> dps;
  for (int m1 = 1; m1 < o.m_max; ++m1)
    for (int m2 = m1 + 1; m2 <= o.m_max; ++m2) {
      const rodbif::DoublePoint<double> dp = rodbif::double_point(m1, m2, o.r);
      if (dp.alpha0 <= o.alpha_max) dps.push_back(dp);
    }

  const auto alpha_at = [&](int i) {
    return o.alpha_max * static_cast<double>(i) / static_cast<double>(o.samples - 1);
  };

  with_output(o.out, [&](std::ostream& os) {
    if (o.format == "csv") {
      os << rodbif::csv_row({"kind", "m1", "m2", "alpha", "beta"});
      for (int m = 1; m <= o.m_max; ++m)
        for (int i = 0; i < o.samples; ++i) {
          const double a = alpha_at(i);
          os << rodbif::csv_row({"ray", std::to_string(m), "", rodbif::format_real(a),
                                 rodbif::format_real(rodbif::ray_beta(m, a, o.r))});
        }
      for (const rodbif::DoublePoint<double>& dp : dps)
        os << rodbif::csv_row({"double_point", std::to_string(dp.m1), std::to_string(dp.m2),
                               rodbif::format_real(dp.alpha0), rodbif::format_real(dp.beta0)});
    } else {
      os << "{\"r\":" << rodbif::format_real(o.r) << ",\"m_max\":" << o.m_max
         << ",\"samples\":" << o.samples << ",\"rays\":[";
      for (int m = 1; m <= o.m_max; ++m) {
        if (m > 1) os << ",";
        os << "{\"m\":" << m
           << ",\"c\":" << rodbif::format_real(rodbif::mode_coefficient(m, o.r)) << ",\"points\":[";
        for (int i = 0; i < o.samples; ++i) {
          const double a = alpha_at(i);
          if (i) os << ",";
          os << "[" << rodbif::format_real(a) << ","
             << rodbif::format_real(rodbif::ray_beta(m, a, o.r)) << "]";
        }
        os << "]}";
      }
      os << "],\"double_points\":[";
      for (size_t k = 0; k < dps.size(); ++k) {
        if (k) os << ",";
        os << "{\"m1\":" << dps[k].m1 << ",\"m2\":" << dps[k].m2
           << ",\"alpha\":" << rodbif::format_real(dps[k].alpha0)
           << ",\"beta\":" << rodbif::format_real(dps[k].beta0) << "}";
      }
      os << "]}\n";
    }
  });
  return exit_ok;
}

struct KernelOptions {
  double alpha = 0.0;
  double beta = 0.0;
  double r = 0.0;
  int n = 201;
  double threshold = 0.0;  // 0 selects the default h^2-scaled threshold
  bool with_basis = false;
  std::string out;
};

int run_kernel(const KernelOptions& o) {
  if (!(o.alpha > 0.0) || !(o.beta > 0.0))
    throw rodbif::domain_error("kernel: --alpha and --beta must be > 0");
  if (!(o.r > 0.0)) throw rodbif::domain_error("kernel: --r must be > 0");
  const rodbif::Grid<double> g = rodbif::build_grid(o.n, o.r);
  const rodbif::KernelReport<double> rep = rodbif::kernel_analysis(o.alpha, o.beta, g, o.threshold);

  with_output(o.out, [&](std::ostream& os) {
    os << "{\"alpha\":" << rodbif::format_real(o.alpha) << ",\"beta\":" << rodbif::format_real(o.beta)
       << ",\"r\":" << rodbif::format_real(o.r) << ",\"n\":" << o.n
       << ",\"threshold\":" << rodbif::format_real(rep.threshold)
       << ",\"noise_floor\":" << rodbif::format_real(rep.noise_floor) << ",\"dim\":" << rep.dim
       << ",\"gap_factor\":" << rodbif::format_real(rep.gap_factor)
       << ",\"borderline\":" << (rep.borderline ? "true" : "false") << ",\"singular_values\":[";
    for (int i = 0; i < 3; ++i) {
      if (i) os << ",";
      os << rodbif::format_real(rep.singular_values[static_cast<size_t>(i)]);
    }
    os << "],\"matched_modes\":[";
    for (size_t i = 0; i < rep.matched_modes.size(); ++i) {
      if (i) os << ",";
      os << rep.matched_modes[i];
    }
    os << "],\"similarities\":" << rodbif::json_number_array(rep.similarities);
    if (o.with_basis) {
      os << ",\"basis\":[";
      for (size_t i = 0; i < rep.basis.size(); ++i) {
        if (i) os << ",";
        os << rodbif::json_number_array(rep.basis[i].values);
      }
      os << "]";
    }
    os << "}\n";
  });
  return exit_ok;
}

struct ReduceOptions {
  int m1 = 0;
  int m2 = 0;
  double r = 0.0;
  double gamma0 = 1.0;
  std::vector<double> offsets{0.01};
  std::vector<double> slopes{0.3, 1.0};
  int n = 201;
  double radius = 1e-3;
  int samples = 256;
  double step = 1e-4;
  std::string out;
};

int run_reduce(const ReduceOptions& o) {
  if (!(o.r > 0.0)) throw rodbif::domain_error("reduce: --r must be > 0");
  const rodbif::Grid<double> g = rodbif::build_grid(o.n, o.r);
  const rodbif::ReductionContext<double> ctx =
      rodbif::make_reduction_context(o.m1, o.m2, o.r, o.gamma0, g);

  struct Row {
    rodbif::ProbeReport<double> rep;
    std::string failure;  // empty when the probe completed
  };
  std::vector<Row> rows;
  bool solver_trouble = false;
  for (double offset : o.offsets)
    for (double slope : o.slopes) {
      Row row;
      try {
        row.rep = rodbif::run_probe(ctx, offset, slope, o.radius, o.samples, o.step);
      } catch (const rodbif::newton_error&) {
        row.rep.offset = offset;
        row.rep.slope = slope;
        row.rep.alpha = ctx.dp.alpha0 + offset;
        row.rep.beta = ctx.dp.beta0 + slope * offset;
        row.failure = "newton_failure";
        solver_trouble = true;
      } catch (const rodbif::degree_error&) {
        row.rep.offset = offset;
        row.rep.slope = slope;
        row.rep.alpha = ctx.dp.alpha0 + offset;
        row.rep.beta = ctx.dp.beta0 + slope * offset;
        row.failure = "degree_failure";
        solver_trouble = true;
      }
      rows.push_back(std::move(row));
    }

  with_output(o.out, [&](std::ostream& os) {
    os << "{\"m1\":" << ctx.dp.m1 << ",\"m2\":" << ctx.dp.m2
       << ",\"r\":" << rodbif::format_real(o.r) << ",\"gamma0\":" << rodbif::format_real(o.gamma0)
       << ",\"n\":" << o.n << ",\"double_point\":{\"alpha\":"
       << rodbif::format_real(ctx.dp.alpha0) << ",\"beta\":" << rodbif::format_real(ctx.dp.beta0)
       << "},\"probes\":[";
    for (size_t k = 0; k < rows.size(); ++k) {
      const Row& row = rows[k];
      if (k) os << ",";
      const char* status = !row.failure.empty() ? row.failure.c_str()
                           : row.rep.status == rodbif::ProbeStatus::boundary ? "boundary"
                                                                             : "ok";
      os << "{\"alpha\":" << rodbif::format_real(row.rep.alpha)
         << ",\"beta\":" << rodbif::format_real(row.rep.beta)
         << ",\"offset\":" << rodbif::format_real(row.rep.offset)
         << ",\"slope\":" << rodbif::format_real(row.rep.slope) << ",\"status\":\"" << status
         << "\",\"det_closed_form\":";
      if (row.failure.empty())
        os << rodbif::format_real(row.rep.det_closed_form);
      else
        os << "null";
      os << ",\"det_numeric\":";
      if (row.rep.det_numeric)
        os << rodbif::format_real(*row.rep.det_numeric);
      else
        os << "null";
      os << ",\"winding\":";
      if (row.rep.winding)
        os << *row.rep.winding;
      else
        os << "null";
      os << "}";
    }
    os << "]}\n";
  });
  return solver_trouble ? exit_solver : exit_ok;
}

struct BranchOptions {
  int mode = 0;
  std::string free;
  std::optional<double> fixed_alpha;
  std::optional<double> fixed_beta;
  double gamma = 1.0;
  double r = 0.0;
  int n = 201;
  int steps = 20;
  double dt = 5e-3;
  double t0 = 1e-3;
  int direction = 1;
  int x_stride = 1;
  std::string out;
};

int run_branch(const BranchOptions& o) {
  if (!(o.r > 0.0)) throw rodbif::domain_error("branch: --r must be > 0");
  rodbif::BranchProblem<double> prob;
  prob.mode = o.mode;
  prob.gamma = o.gamma;
  prob.r = o.r;
  if (o.free == "alpha") {
    if (!o.fixed_beta || o.fixed_alpha)
      throw rodbif::config_error("branch: --free alpha requires --fixed-beta (and no --fixed-alpha)");
    prob.free = rodbif::FreeParameter::alpha;
    prob.fixed_value = *o.fixed_beta;
  } else if (o.free == "beta") {
    if (!o.fixed_alpha || o.fixed_beta)
      throw rodbif::config_error("branch: --free beta requires --fixed-alpha (and no --fixed-beta)");
    prob.free = rodbif::FreeParameter::beta;
    prob.fixed_value = *o.fixed_alpha;
  } else {
    throw rodbif::config_error("branch: --free must be alpha or beta");
  }

  const rodbif::Grid<double> g = rodbif::build_grid(o.n, o.r);
  const double bif = rodbif::ray_crossing_value(prob);
  const rodbif::BranchSeed<double> seed =
      rodbif::branch_switch(bif, prob, g, o.direction, o.t0);
  const rodbif::Branch<double> branch = rodbif::continue_branch(seed, o.steps, o.dt);

  with_output(o.out, [&](std::ostream& os) {
    rodbif::write_branch_json_lines(branch, os, o.x_stride);
  });
  return branch.status == rodbif::BranchStatus::early_stop ? exit_partial : exit_ok;
}

struct VerifyOptions {
  std::string level = "quick";
  std::string out;
};

int run_verify(const VerifyOptions& o) {
  const rodbif::VerifyLevel level =
      o.level == "full" ? rodbif::VerifyLevel::full : rodbif::VerifyLevel::quick;
  const std::vector<rodbif::CheckResult> results = rodbif::run_acceptance_checks(level);
  int failed = 0, passed = 0, skipped = 0;
  with_output(o.out, [&](std::ostream& os) {
    for (const rodbif::CheckResult& c : results) {
      const char* tag = c.status == rodbif::CheckStatus::pass   ? "[PASS]"
                        : c.status == rodbif::CheckStatus::fail ? "[FAIL]"
                                                                : "[SKIP]";
      if (c.status == rodbif::CheckStatus::pass) ++passed;
      if (c.status == rodbif::CheckStatus::fail) ++failed;
      if (c.status == rodbif::CheckStatus::skip) ++skipped;
      os << tag << " " << c.id << " " << c.name;
      if (!c.details.empty()) os << " | " << c.details;
      os << "\n";
    }
    os << "summary: passed=" << passed << " failed=" << failed << " skipped=" << skipped << "\n";
  });
  return failed > 0 ? exit_checks_failed : exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rod-on-foundation bifurcation toolkit"};
  app.require_subcommand(1);
  // config parsing happens on the root app; [section] names select the
  // subcommand, and explicit command line flags win over file values
  app.set_config("--config", "",
                 "INI file with one [subcommand] section per command");

  RaysOptions rays;
  CLI::App* s_rays = app.add_subcommand("rays", "tabulate bifurcation rays and double points");
  s_rays->add_option("--r", rays.r, "half-length of the interval")->required();
  s_rays->add_option("--alpha-max", rays.alpha_max, "largest alpha to tabulate")->required();
  s_rays->add_option("--m-max", rays.m_max, "largest mode index");
  s_rays->add_option("--samples", rays.samples, "points per ray");
  s_rays->add_option("--format", rays.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  s_rays->add_option("--out", rays.out, "write to this file instead of stdout");
  s_rays->fallthrough();

  KernelOptions kernel;
  CLI::App* s_kernel = app.add_subcommand("kernel", "diagnose the linearized kernel at a point");
  s_kernel->add_option("--alpha", kernel.alpha, "alpha")->required();
  s_kernel->add_option("--beta", kernel.beta, "beta")->required();
  s_kernel->add_option("--r", kernel.r, "half-length of the interval")->required();
  s_kernel->add_option("--n", kernel.n, "grid nodes (odd, >= 11)");
  s_kernel->add_option("--threshold", kernel.threshold, "singular value cutoff (0 = automatic)");
  s_kernel->add_flag("--basis", kernel.with_basis, "include the kernel basis vectors");
  s_kernel->add_option("--out", kernel.out, "write to this file instead of stdout");
  s_kernel->fallthrough();

  ReduceOptions reduce;
  CLI::App* s_reduce = app.add_subcommand("reduce", "probe a double point through the reduced map");
  s_reduce->add_option("--m1", reduce.m1, "first mode")->required();
  s_reduce->add_option("--m2", reduce.m2, "second mode")->required();
  s_reduce->add_option("--r", reduce.r, "half-length of the interval")->required();
  s_reduce->add_option("--gamma0", reduce.gamma0, "cubic coefficient");
  s_reduce->add_option("--offsets", reduce.offsets, "parameter offsets along alpha");
  s_reduce->add_option("--slopes", reduce.slopes, "probe line slopes");
  s_reduce->add_option("--n", reduce.n, "grid nodes (odd, >= 11)");
  s_reduce->add_option("--radius", reduce.radius, "winding circle radius");
  s_reduce->add_option("--samples", reduce.samples, "winding circle samples");
  s_reduce->add_option("--step", reduce.step, "finite difference step for the numeric Jacobian");
  s_reduce->add_option("--out", reduce.out, "write to this file instead of stdout");
  s_reduce->fallthrough();

  BranchOptions branch;
  CLI::App* s_branch = app.add_subcommand("branch", "continue a nontrivial branch in amplitude");
  s_branch->add_option("--m", branch.mode, "bifurcating mode")->required();
  s_branch->add_option("--free", branch.free, "which parameter varies: alpha or beta")
      ->required()
      ->check(CLI::IsMember({"alpha", "beta"}));
  s_branch->add_option("--fixed-alpha", branch.fixed_alpha, "frozen alpha (with --free beta)");
  s_branch->add_option("--fixed-beta", branch.fixed_beta, "frozen beta (with --free alpha)");
  s_branch->add_option("--gamma", branch.gamma, "cubic coefficient");
  s_branch->add_option("--r", branch.r, "half-length of the interval")->required();
  s_branch->add_option("--n", branch.n, "grid nodes (odd, >= 11)");
  s_branch->add_option("--steps", branch.steps, "continuation steps");
  s_branch->add_option("--dt", branch.dt, "amplitude step");
  s_branch->add_option("--t0", branch.t0, "branch switch amplitude");
  s_branch->add_option("--direction", branch.direction, "+1 or -1");
  s_branch->add_option("--x-stride", branch.x_stride, "profile output stride (0 omits x)");
  s_branch->add_option("--out", branch.out, "write to this file instead of stdout");
  s_branch->fallthrough();

  VerifyOptions verify;
  CLI::App* s_verify = app.add_subcommand("verify", "run the built-in acceptance checks");
  s_verify->add_option("--level", verify.level, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}));
  s_verify->add_option("--out", verify.out, "write to this file instead of stdout");
  s_verify->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (s_rays->parsed()) return run_rays(rays);
    if (s_kernel->parsed()) return run_kernel(kernel);
    if (s_reduce->parsed()) return run_reduce(reduce);
    if (s_branch->parsed()) return run_branch(branch);
    if (s_verify->parsed()) return run_verify(verify);
  } catch (const rodbif::newton_error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return exit_solver;
  } catch (const rodbif::singular_error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return exit_solver;
  } catch (const rodbif::degree_error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return exit_solver;
  } catch (const rodbif::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const rodbif::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const rodbif::shape_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  }
  return exit_usage;
}
