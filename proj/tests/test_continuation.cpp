// Trivial-branch crossing detection, branch switching, and amplitude
// continuation of the nontrivial branches.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "rodbif/continuation.hpp"
#include "rodbif/detail/fitting.hpp"

using namespace rodbif;

namespace {
constexpr double pi = std::numbers::pi;

BranchProblem<double> beta_problem(int mode = 1, double fixed_alpha = 1.0, double gamma = 1.0) {
  BranchProblem<double> prob;
  prob.mode = mode;
  prob.free = FreeParameter::beta;
  prob.fixed_value = fixed_alpha;
  prob.gamma = gamma;
  prob.r = pi;
  return prob;
}

BranchProblem<double> alpha_problem(int mode = 1, double fixed_beta = 0.05859375,
                                    double gamma = 1.0) {
  BranchProblem<double> prob;
  prob.mode = mode;
  prob.free = FreeParameter::alpha;
  prob.fixed_value = fixed_beta;
  prob.gamma = gamma;
  prob.r = pi;
  return prob;
}

double amplitude_of(const BranchPoint<double>& pt, const SampledFunction<double>& e) {
  return inner_product(pt.x, e);
}
}  // namespace

TEST_CASE("ray crossing values in both parameter directions") {
  CHECK(ray_crossing_value(beta_problem()) == Catch::Approx(0.05859375).margin(1e-15));
  CHECK(ray_crossing_value(alpha_problem()) == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(ray_crossing_value(beta_problem(2)) == Catch::Approx(0.24609375).margin(1e-15));

  // fixed beta too small: the mode-1 ray meets it at a nonpositive alpha...
  // actually at a negative beta crossing; reject anything outside the quadrant
  BranchProblem<double> bad = beta_problem(1, 0.03);
  CHECK_THROWS_AS(ray_crossing_value(bad), domain_error);
}

TEST_CASE("detection finds the single crossing on a fixed-beta path") {
  const Grid<double> g = build_grid(201, pi);
  // alpha window kept clear of the mode-2 ray, which meets this beta at 2/3
  ParamPath<double> path{0.8, 0.05859375, 1.2, 0.05859375};
  const std::vector<Crossing<double>> hits = detect_bifurcation_on_trivial_branch(path, g);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].alpha == Catch::Approx(1.0).margin(1e-4));
  CHECK(hits[0].mode == 1);
  CHECK(std::abs(hits[0].lambda) <= 1e-5);
}

TEST_CASE("detection finds both crossings on a fixed-alpha path and drops the mode jump") {
  const Grid<double> g = build_grid(201, pi);
  ParamPath<double> path{1.0, 0.01, 1.0, 0.3};
  const std::vector<Crossing<double>> hits = detect_bifurcation_on_trivial_branch(path, g);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].beta == Catch::Approx(0.05859375).margin(1e-4));
  CHECK(hits[0].mode == 1);
  CHECK(hits[1].beta == Catch::Approx(0.24609375).margin(1e-4));
  CHECK(hits[1].mode == 2);
}

TEST_CASE("detection reports nothing on a ray-free path") {
  const Grid<double> g = build_grid(201, pi);
  ParamPath<double> path{0.9, 0.3, 0.95, 0.35};
  CHECK(detect_bifurcation_on_trivial_branch(path, g).empty());
}

TEST_CASE("detection validates steps and quadrant") {
  const Grid<double> g = build_grid(101, pi);
  ParamPath<double> path{1.0, 0.01, 1.0, 0.3};
  CHECK_THROWS_AS(detect_bifurcation_on_trivial_branch(path, g, 4), config_error);
  CHECK_THROWS_AS(
      detect_bifurcation_on_trivial_branch(ParamPath<double>{-1.0, 0.01, 1.0, 0.3}, g),
      config_error);
}

TEST_CASE("branch switch leaves the trivial family quadratically in t0") {
  const BranchProblem<double> prob = beta_problem();
  const Grid<double> g = build_grid(201, pi);
  const double bif = ray_crossing_value(prob);

  std::vector<double> t0s{0.02, 0.04}, shifts;
  for (double t0 : t0s) {
    const BranchSeed<double> seed = branch_switch(bif, prob, g, 1, t0);
    CHECK(seed.point.residual_norm <= 1e-9);
    shifts.push_back(std::abs(seed.point.param - bif));
  }
  const double order = detail::log_log_slope(t0s, shifts);
  INFO("parameter shifts " << shifts[0] << " " << shifts[1] << " order " << order);
  CHECK(order >= 1.8);
  CHECK(order <= 2.2);
}

TEST_CASE("branch switch mirrors exactly under direction reversal") {
  const BranchProblem<double> prob = beta_problem();
  const Grid<double> g = build_grid(201, pi);
  const double bif = ray_crossing_value(prob);
  const BranchSeed<double> up = branch_switch(bif, prob, g, 1, 0.02);
  const BranchSeed<double> down = branch_switch(bif, prob, g, -1, 0.02);

  CHECK(down.point.param == Catch::Approx(up.point.param).epsilon(1e-12));
  double worst = 0.0;
  for (size_t i = 0; i < up.point.x.values.size(); ++i)
    worst = std::max(worst, std::abs(up.point.x.values[i] + down.point.x.values[i]));
  CHECK(worst <= 1e-10);
}

TEST_CASE("branch switch validates its inputs") {
  const BranchProblem<double> prob = beta_problem();
  const Grid<double> g = build_grid(101, pi);
  CHECK_THROWS_AS(branch_switch(0.05859375, prob, g, 1, 0.5), domain_error);
  CHECK_THROWS_AS(branch_switch(0.05859375, prob, g, 2, 0.02), domain_error);
  CHECK_THROWS_AS(branch_switch(-1.0, prob, g, 1, 0.02), domain_error);
}

TEST_CASE("continued branch is a pitchfork in the free parameter") {
  const BranchProblem<double> prob = beta_problem();
  const Grid<double> g = build_grid(201, pi);
  const double bif = ray_crossing_value(prob);
  const BranchSeed<double> seed = branch_switch(bif, prob, g, 1, 1e-3);
  const Branch<double> branch = continue_branch(seed, 20, 5e-3);

  REQUIRE(branch.status == BranchStatus::complete);
  REQUIRE(branch.points.size() == 22);
  CHECK(branch.points.front().t == 0.0);
  CHECK(branch.points.front().param == Catch::Approx(bif).epsilon(1e-12));

  const SampledFunction<double> e = sample_eigenfunction(1, g);
  std::vector<double> ts, shifts;
  for (const BranchPoint<double>& pt : branch.points) {
    CHECK(pt.residual_norm <= 1e-9);
    if (pt.t == 0.0) continue;
    CHECK(amplitude_of(pt, e) == Catch::Approx(pt.t).margin(1e-8));
    CHECK(sup_norm(pt.x) >= 0.5 * pt.t);
    if (pt.t >= 0.02) {
      ts.push_back(pt.t);
      shifts.push_back(std::abs(pt.param - bif));
    }
  }
  REQUIRE(ts.size() >= 5);
  const double order = detail::log_log_slope(ts, shifts);
  INFO("pitchfork order " << order);
  CHECK(order >= 1.9);
  CHECK(order <= 2.1);
}

TEST_CASE("zero-step continuation returns the trivial point and the seed") {
  const BranchProblem<double> prob = beta_problem();
  const Grid<double> g = build_grid(101, pi);
  const BranchSeed<double> seed = branch_switch(ray_crossing_value(prob), prob, g, 1, 0.01);
  const Branch<double> branch = continue_branch(seed, 0, 1e-3);
  CHECK(branch.status == BranchStatus::complete);
  REQUIRE(branch.points.size() == 2);
  CHECK(branch.points[0].t == 0.0);
  CHECK(branch.points[1].t == Catch::Approx(0.01).epsilon(1e-12));

  CHECK_THROWS_AS(continue_branch(seed, -1, 1e-3), config_error);
  CHECK_THROWS_AS(continue_branch(seed, 5, 0.2), config_error);
}

TEST_CASE("alpha-free and beta-free branches carry the same profile shape") {
  const Grid<double> g = build_grid(201, pi);

  const BranchProblem<double> pb = beta_problem();
  const BranchSeed<double> sb = branch_switch(ray_crossing_value(pb), pb, g, 1, 1e-3);
  const Branch<double> bb = continue_branch(sb, 10, 4.9e-3);

  const BranchProblem<double> pa = alpha_problem();
  const BranchSeed<double> sa = branch_switch(ray_crossing_value(pa), pa, g, 1, 1e-3);
  const Branch<double> ba = continue_branch(sa, 10, 4.9e-3);

  REQUIRE(bb.status == BranchStatus::complete);
  REQUIRE(ba.status == BranchStatus::complete);
  const BranchPoint<double>& qb = bb.points.back();
  const BranchPoint<double>& qa = ba.points.back();
  CHECK(qb.t == Catch::Approx(qa.t).epsilon(1e-12));

  const double cross = inner_product(qa.x, qb.x) /
                       (std::sqrt(inner_product(qa.x, qa.x)) * std::sqrt(inner_product(qb.x, qb.x)));
  CHECK(cross >= 0.999);
}
