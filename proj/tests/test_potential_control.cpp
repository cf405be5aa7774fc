#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "hybridgrad/potential_control.hpp"
#include "hybridgrad/problem.hpp"

using namespace hybridgrad;

namespace {

constexpr std::uint64_t kSeed = 42;

const HybridParams kPaperParams{0.2, 0.0298, -0.1861, 5.7457};
const Constants kPaperConstants{136.9832, 0.0, 3.6878, 0.0, std::nullopt};

Problem half_sq(Eigen::Index n) {
  return make_quadratic(Matrix::Identity(n, n), Vector::Zero(n));
}

}  // namespace

TEST_CASE("feedback hand values on f = 0.5|x|^2") {
  const Problem p = half_sq(2);
  Vector x1(2), x2(2);
  x1 << 1.0, 0.0;
  x2 << -1.0, 0.0;

  // alpha = 1 kills the cross term: u = (1 + 0)/1.
  CHECK(potential::feedback(x1, x2, 1.0, p) == doctest::Approx(1.0));
  // Hand evaluation: u = (1 + 0.8 * 1)/1 = 1.8.
  CHECK(potential::feedback(x1, x2, 0.2, p) == doctest::Approx(1.8));
}

TEST_CASE("feedback signals a vanishing gradient") {
  const Problem p = half_sq(2);
  Vector x2(2);
  x2 << 1.0, 0.0;
  CHECK_THROWS_AS(potential::feedback(Vector::Zero(2), x2, 0.2, p),
                  ZeroGradient);
}

TEST_CASE("flow map values") {
  const Problem p = half_sq(2);

  const FlowDerivative d0 =
      potential::flow(HybridState{Vector::Zero(2), Vector::Zero(2), 0.0}, 2.0, p);
  CHECK(d0.dx1.norm() == 0.0);
  CHECK(d0.dx2.norm() == 0.0);

  Vector x1(2), x2(2);
  x1 << 1.0, 0.0;
  x2 << 0.0, 1.0;
  // Hand evaluation: ((0,1), (-2,-1)) at u = 2.
  const FlowDerivative d = potential::flow(HybridState{x1, x2, 0.0}, 2.0, p);
  CHECK(d.dx1(1) == doctest::Approx(1.0));
  CHECK(d.dx2(0) == doctest::Approx(-2.0));
  CHECK(d.dx2(1) == doctest::Approx(-1.0));

  // Zero potential coefficient: pure velocity decay.
  const FlowDerivative du = potential::flow(HybridState{x1, x2, 0.0}, 0.0, p);
  CHECK((du.dx2 + x2).norm() == doctest::Approx(0.0));
}

TEST_CASE("flow margin: midpoint, boundary, exterior") {
  // 1-D state with x1 = 1, x2 = -1: u = x2^2 + (1 - alpha) <g, -x2> = 2 - alpha.
  const Problem p = half_sq(1);
  Vector x1(1), x2(1);
  x1 << 1.0;
  x2 << -1.0;
  const HybridState s{x1, x2, 0.0};

  HybridParams params{0.0, 1.0, 1.0, 3.0};  // u = 2 at the midpoint
  CHECK(potential::flow_margin(s, params, p) == doctest::Approx(1.0));
  params.u_hi = 2.0;
  CHECK(potential::flow_margin(s, params, p) == doctest::Approx(0.0));
  params.u_lo = -1.0;
  params.u_hi = 1.0;
  CHECK(potential::flow_margin(s, params, p) == doctest::Approx(-1.0));
}

TEST_CASE("jump map") {
  const Problem p = half_sq(2);
  Vector x1(2);
  x1 << 1.0, 0.0;
  const HybridState s = potential::jump(x1, 0.0298, p);
  CHECK(s.x2(0) == doctest::Approx(-0.0298));
  CHECK(s.x2(1) == doctest::Approx(0.0));
  CHECK_THROWS_AS(potential::jump(Vector::Zero(2), 0.0298, p), ZeroGradient);
}

TEST_CASE("post-jump feedback lies in the curvature bracket (seeded lmse)") {
  const Problem p = make_lmse(50, 5, kSeed);
  REQUIRE(potential::validate_params(kPaperParams, p.constants).empty());
  const double beta = kPaperParams.beta;
  const double lo =
      -p.constants.ell_f * beta * beta + (1.0 - kPaperParams.alpha) * beta;
  const double hi =
      p.constants.L_f * beta * beta + (1.0 - kPaperParams.alpha) * beta;

  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Vector x1(5);
    for (int j = 0; j < 5; ++j) x1(j) = 3.0 * gauss(rng);
    const HybridState s = potential::jump(x1, beta, p);
    const double u = potential::feedback(s.x1, s.x2, kPaperParams.alpha, p);
    CHECK(u >= lo * (1.0 - 1e-12));
    CHECK(u <= hi * (1.0 + 1e-12));
    // Interval containment and interiority under the paper parameter set.
    CHECK(u > kPaperParams.u_lo);
    CHECK(u < kPaperParams.u_hi);
    CHECK(potential::flow_margin(s, kPaperParams, p) > 0.0);
  }
}

TEST_CASE("validate_params: paper set feasible, perturbations cited") {
  CHECK(potential::validate_params(kPaperParams, kPaperConstants).empty());

  // Bound values verified with an independent scalar script:
  //   u_lo bound = 0.02384, u_hi bound = 0.145486560928,
  //   rate bound = 0.21979288.
  HybridParams bad = kPaperParams;
  bad.u_lo = 0.05;  // 0.05 > 0.02384
  auto v = potential::validate_params(bad, kPaperConstants);
  REQUIRE(v.size() == 1);
  CHECK(v[0].condition == "u_lo");

  bad = kPaperParams;
  bad.u_hi = 0.1;  // 0.1 < 0.14548...
  v = potential::validate_params(bad, kPaperConstants);
  REQUIRE(v.size() == 1);
  CHECK(v[0].condition == "u_hi");

  bad = kPaperParams;
  bad.alpha = 0.25;  // 0.25 > 0.2198
  v = potential::validate_params(bad, kPaperConstants);
  REQUIRE(v.size() == 1);
  CHECK(v[0].condition == "rate");
}

TEST_CASE("zeno constants at the paper parameter set (frozen oracle values)") {
  // Independently evaluated with a scalar script at r = 0.1:
  //   clearance = 0.20994        U  = 5.7457
  //   omega = 56.829028721108884 b1 = 3740.096208219836
  //   b2 = 3.7221283245850088
  const auto z = potential::zeno_constants(kPaperParams, kPaperConstants, 0.1);
  CHECK(z.clearance == doctest::Approx(0.20994).epsilon(1e-12));
  CHECK(z.input_bound == doctest::Approx(5.7457).epsilon(1e-15));
  CHECK(z.omega == doctest::Approx(56.829028721108884).epsilon(1e-12));
  CHECK(z.b1 == doctest::Approx(3740.096208219836).epsilon(1e-12));
  CHECK(z.b2 == doctest::Approx(3.7221283245850088).epsilon(1e-12));
}

TEST_CASE("zeno bound at the paper parameter set is uniform and positive") {
  // Frozen oracle value: max over r in {0.1, ..., 0.9} is 5.6076438846062317e-05
  // at r = 0.1.
  const auto b = potential::zeno_bound(kPaperParams, kPaperConstants);
  CHECK(b.best_r == doctest::Approx(0.1));
  CHECK(b.tau_lb == doctest::Approx(5.6076438846062317e-05).epsilon(1e-12));
  CHECK(b.tau_lb > 0.0);
  // The signature takes no gradient information: the bound is uniform along
  // the whole trajectory by construction.
}

TEST_CASE("zeno bound rejects bad inputs") {
  HybridParams infeasible = kPaperParams;
  infeasible.u_lo = 0.05;
  CHECK_THROWS_AS(potential::zeno_bound(infeasible, kPaperConstants),
                  std::invalid_argument);
  // Grid endpoints are excluded: the bound degenerates to zero as r -> 0.
  CHECK_THROWS_AS(potential::zeno_bound(kPaperParams, kPaperConstants, {0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(potential::zeno_bound(kPaperParams, kPaperConstants, {1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(potential::zeno_bound(kPaperParams, kPaperConstants, {}),
                  std::invalid_argument);
}

TEST_CASE("smaller r tightens the r/omega leg toward zero") {
  const auto z1 = potential::zeno_constants(kPaperParams, kPaperConstants, 0.1);
  const auto z2 = potential::zeno_constants(kPaperParams, kPaperConstants, 0.01);
  CHECK(0.01 / z2.omega < 0.1 / z1.omega);
  CHECK(z2.omega == z1.omega);  // omega does not depend on r
}
