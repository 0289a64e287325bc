// Closed-form precision bounds: entangled and separable sum bounds, weighted
// and optimally allocated local strategies, reference-mode and imaging
// bounds, the unknown-reference formula, and the two-qubit pair.
//
// Oracle strategy: spot values are hand-evaluated; the unknown-reference
// closed form is checked against a dense inversion of the displayed
// correlation pattern; optimal allocations are checked against a brute-force
// grid over the simplex.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "qsn/bounds.hpp"
#include "qsn/fisher.hpp"
#include "qsn/rng.hpp"

using namespace qsn;

namespace {

RVec unit(std::vector<double> entries) {
  RVec v(Index(entries.size()));
  for (size_t i = 0; i < entries.size(); ++i) v[Index(i)] = entries[i];
  return v / v.norm();
}

}  // namespace

TEST_CASE("entangled sum bound: spot values and scalings") {
  // d/(mu Nmax^2 dlam^2) with Nmax = n d.
  CHECK(ghz_sum(2, 1, 0.5, -0.5, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ghz_sum(3, 2, 1.0, 0.0, 1) == doctest::Approx(3.0 / 36.0).epsilon(1e-15));
  CHECK(ghz_sum(2, 1, 0.5, -0.5, 10) == doctest::Approx(0.05).epsilon(1e-15));
  // Quadratic gain in n, linear cost in d.
  CHECK(ghz_sum(2, 2, 0.5, -0.5, 1) == doctest::Approx(ghz_sum(2, 1, 0.5, -0.5, 1) / 4.0));
  CHECK_THROWS_AS(ghz_sum(0, 1, 0.5, -0.5, 1), SchemaError);
  CHECK_THROWS_AS(ghz_sum(2, 0, 0.5, -0.5, 1), SchemaError);
  CHECK_THROWS_AS(ghz_sum(2, 1, 0.5, -0.5, 0), SchemaError);
  CHECK_THROWS_AS(ghz_sum(2, 1, 0.5, 0.5, 1), SchemaError);  // zero spread
}

TEST_CASE("separable sum bound is d times the entangled one at equal resources") {
  for (int d = 1; d <= 5; ++d)
    for (int n = 1; n <= 3; ++n) {
      const double ent = ghz_sum(d, n, 1.0, 0.0, 2);
      const double sep = local_sum(d, double(n) * d, 1.0, 0.0, 2);
      CHECK(sep == doctest::Approx(double(d) * ent).epsilon(1e-12));
    }
  CHECK_THROWS_AS(local_sum(2, 0.0, 1.0, 0.0, 1), SchemaError);
}

TEST_CASE("weighted two-branch bound: |v|_1^2 / (mu Nmax^2 dlam^2)") {
  CHECK(weighted_ghz_bound(unit({2, 1}), 3.0, 1.0, 0.0, 1) ==
        doctest::Approx(0.2).epsilon(1e-12));
  CHECK(weighted_ghz_bound(unit({3, 1}), 4.0, 1.0, 0.0, 1) ==
        doctest::Approx(0.1).epsilon(1e-12));
  CHECK(weighted_ghz_bound(unit({1, 1, 2}), 4.0, 1.0, 0.0, 1) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  // Uniform weights recover the unweighted sum bound.
  CHECK(weighted_ghz_bound(unit({1, 1}), 2.0, 0.5, -0.5, 1) ==
        doctest::Approx(ghz_sum(2, 1, 0.5, -0.5, 1)).epsilon(1e-12));
  // The particle split Nmax v_k / |v|_1 must be integral.
  CHECK_THROWS_AS(weighted_ghz_bound(unit({2, 1}), 2.0, 1.0, 0.0, 1), SchemaError);
  CHECK_THROWS_AS(weighted_ghz_bound(RVec(-1.0 * unit({2, 1})), 3.0, 1.0, 0.0, 1),
                  SchemaError);  // negative weights
  RVec notunit(2);
  notunit << 2.0, 1.0;
  CHECK_THROWS_AS(weighted_ghz_bound(notunit, 3.0, 1.0, 0.0, 1), SchemaError);
}

TEST_CASE("weighted local bound at a given allocation") {
  // |x|_1^2 sum (v_k/x_k)^2 / (mu Nmax^2 dlam^2); at x = v it is twice the
  // entangled weighted bound for two sensors.
  const RVec v = unit({2, 1});
  CHECK(local_weighted(v, v, 3.0, 1.0, 0.0, 1) == doctest::Approx(0.4).epsilon(1e-12));
  // Allocation scale invariance.
  CHECK(local_weighted(v, RVec(3.0 * v), 3.0, 1.0, 0.0, 1) ==
        doctest::Approx(local_weighted(v, v, 3.0, 1.0, 0.0, 1)).epsilon(1e-12));
  // Zero allocation on a weighted sensor is impossible.
  RVec x(2);
  x << 1.0, 0.0;
  CHECK_THROWS_AS(local_weighted(v, x, 3.0, 1.0, 0.0, 1), SchemaError);
  // Zero-weight sensors may receive zero allocation.
  RVec v2(2), x2(2);
  v2 << 1.0, 0.0;
  x2 << 1.0, 0.0;
  CHECK(local_weighted(v2, x2, 2.0, 1.0, 0.0, 1) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("optimal local allocation: closed form beats every grid point") {
  const RVec v = unit({2, 1});
  const RVec x_star = local_optimal_allocation(v);
  CHECK(x_star.sum() == doctest::Approx(1.0).epsilon(1e-12));
  const double c = std::cbrt(4.0);  // 2^(2/3)
  CHECK(x_star[0] == doctest::Approx(c / (c + 1.0)).epsilon(1e-12));
  const double best = local_optimal(v, 3.0, 1.0, 0.0, 1);
  CHECK(best == doctest::Approx(local_weighted(v, x_star, 3.0, 1.0, 0.0, 1)).epsilon(1e-12));
  // Brute-force grid over the simplex never does better.
  double grid_best = 1e300;
  for (int i = 1; i < 100; ++i) {
    RVec x(2);
    x << double(i) / 100.0, 1.0 - double(i) / 100.0;
    grid_best = std::min(grid_best, local_weighted(v, x, 3.0, 1.0, 0.0, 1));
  }
  CHECK(best <= grid_best + 1e-12);
  CHECK(grid_best <= best * 1.001);  // and the grid gets close
  // Equal weights allocate equally; the closed form reduces to the sum bound.
  const RVec eq = local_optimal_allocation(unit({1, 1, 1}));
  for (int k = 0; k < 3; ++k) CHECK(eq[k] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(local_optimal(unit({1, 1}), 2.0, 0.5, -0.5, 1) ==
        doctest::Approx(local_sum(2, 2.0, 0.5, -0.5, 1)).epsilon(1e-12));
  CHECK_THROWS_AS(local_optimal_allocation(RVec::Zero(2)), SchemaError);
}

TEST_CASE("single-function chain: entangled <= optimal local <= naive local") {
  CounterRng rng(71, 0);
  for (std::uint64_t t = 0; t < 25; ++t) {
    const int d = 2 + int(rng.uniform(10 * t) * 3.0);
    RVec v(d);
    for (int k = 0; k < d; ++k) v[k] = 0.1 + rng.uniform(10 * t + 1 + std::uint64_t(k));
    v /= v.norm();
    const double nmax = 6.0;
    const double ent = v.lpNorm<1>() * v.lpNorm<1>() / (nmax * nmax);  // no split constraint
    const double opt = local_optimal(v, nmax, 1.0, 0.0, 1);
    const double uni = local_weighted(v, RVec::Ones(d), nmax, 1.0, 0.0, 1);
    CHECK(ent <= opt + 1e-12);
    CHECK(opt <= uni + 1e-12);
  }
}

TEST_CASE("reference-mode bound and its comparisons") {
  // (d+1)/(mu Nmax^2 lam^2) with lam the largest squared eigenvalue.
  CHECK(gns_bound(2, 3.0, 1.0, 0.0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(gns_bound(2, 3.0, 0.0, -1.0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(gns_bound(3, 4.0, 1.0, 0.0, 2) == doctest::Approx(0.125).epsilon(1e-12));
  // Carrying the reference mode always costs more than the weighted
  // two-branch strategy at the same total budget.
  CHECK(gns_bound(2, 3.0, 1.0, 0.0, 1) > weighted_ghz_bound(unit({2, 1}), 3.0, 1.0, 0.0, 1));
  CHECK_THROWS_AS(gns_bound(2, 3.0, 0.0, 0.0, 1), SchemaError);
}

TEST_CASE("individual-interrogation bound for split experiments") {
  CHECK(noon_individual(2, 4, 1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(noon_individual(3, 6, 1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(noon_individual(1, 5, 1) == doctest::Approx(0.04).epsilon(1e-15));
  CHECK(noon_individual(2, 4, 4) == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK_THROWS_AS(noon_individual(3, 4, 1), SchemaError);  // uneven split
  CHECK_THROWS_AS(noon_individual(0, 4, 1), SchemaError);
}

TEST_CASE("symmetric imaging bound equals the penalty over the uncorrelated value") {
  const double v = 0.4;
  for (int dp = 1; dp <= 6; ++dp) {
    const double e0 = imaging_symmetric(v, 0.0, dp, 1);
    CHECK(e0 == doctest::Approx(1.0 / (4.0 * v)).epsilon(1e-12));
    const double j = -1.0 / (dp + 1.0);
    const double g = (1.0 + (dp - 2) * j) / ((1.0 - j) * (1.0 + (dp - 1) * j));
    CHECK(imaging_symmetric(v, j, dp, 1) == doctest::Approx(g / (4.0 * v)).epsilon(1e-12));
  }
  CHECK(imaging_symmetric(0.4, 0.5, 3, 2) ==
        doctest::Approx(imaging_symmetric(0.4, 0.5, 3, 1) / 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(imaging_symmetric(0.4, 1.0, 3, 1), EstimationError);
  CHECK_THROWS_AS(imaging_symmetric(0.4, -0.5, 3, 1), EstimationError);
  CHECK_THROWS_AS(imaging_symmetric(-0.4, 0.0, 3, 1), SchemaError);
}

TEST_CASE("unknown-reference formula against a dense inversion oracle") {
  for (long t = 0; t < 100; ++t) {
    const CounterRng rng(5, 700 + std::uint64_t(t));
    const int dp = 1 + int(rng.uniform(0) * 4.0);
    const double v = 0.2 + rng.uniform(1);
    const double vr = 0.2 + rng.uniform(2);
    const double jlo = dp > 1 ? -1.0 / double(dp - 1) : -0.9;
    const double j = jlo + (0.05 + 0.9 * rng.uniform(3)) * (1.0 - jlo);
    const double jp_cap = std::sqrt((1.0 + double(dp - 1) * j) / double(dp));
    const double jp = (2.0 * rng.uniform(4) - 1.0) * 0.95 * jp_cap;

    RMat cmat(dp + 1, dp + 1);
    cmat.setZero();
    for (int a = 0; a < dp; ++a)
      for (int b = 0; b < dp; ++b) cmat(a, b) = a == b ? v : j * v;
    for (int a = 0; a < dp; ++a) cmat(a, dp) = cmat(dp, a) = jp * std::sqrt(v * vr);
    cmat(dp, dp) = vr;
    const RMat cinv = cmat.inverse();
    double acc = 0.0;
    for (int a = 0; a < dp; ++a) acc += cinv(a, a) - 2.0 * cinv(a, dp) + cinv(dp, dp);
    const double oracle = acc / (2.0 * double(dp));
    CHECK(imaging_unknown_reference(v, vr, j, jp, dp, 1) ==
          doctest::Approx(oracle).epsilon(1e-9));
    CHECK(imaging_unknown_reference(v, vr, j, jp, dp, 3) ==
          doctest::Approx(oracle / 3.0).epsilon(1e-9));
  }
}

TEST_CASE("unknown-reference formula: separable limit and validation") {
  for (const auto& [v, vr] :
       std::vector<std::pair<double, double>>{{0.25, 0.5}, {1.0, 1.0}, {0.7, 0.3}}) {
    const double sep = imaging_unknown_reference(v, vr, 0.0, 0.0, 3, 1);
    const double expect = 0.5 / v + 0.5 / vr;
    CHECK(std::abs(sep - expect) <= 1e-14 * expect);
  }
  CHECK_THROWS_AS(imaging_unknown_reference(1.0, 1.0, 1.0, 0.0, 2, 1), EstimationError);
  // j_ref at its degeneracy: 1 + j(d'-1) - j_ref^2 d' = 0.
  const double jp_singular = std::sqrt(0.5);
  CHECK_THROWS_AS(imaging_unknown_reference(1.0, 1.0, 0.0, jp_singular, 2, 1),
                  EstimationError);
  CHECK_THROWS_AS(imaging_unknown_reference(-1.0, 1.0, 0.0, 0.0, 2, 1), SchemaError);
  CHECK_THROWS_AS(imaging_unknown_reference(1.0, 1.0, 0.0, 0.0, 0, 1), SchemaError);
}

TEST_CASE("two-qubit pair: scalar cost and its minimizer") {
  // E(x) = (2 - g x)/(mu (1 - x^2)) with g = sin 2a + sin 2b.
  CHECK(two_qubit_nonorthogonal(0.0, 0.0, 0.0, 1) == doctest::Approx(2.0).epsilon(1e-15));
  const double a = M_PI / 8;
  const double g = std::sin(2.0 * a);
  CHECK(two_qubit_nonorthogonal(a, 0.0, 0.3, 2) ==
        doctest::Approx((2.0 - 0.3 * g) / (2.0 * 0.91)).epsilon(1e-12));
  const double xm = two_qubit_x_min(a, 0.0);
  CHECK(xm == doctest::Approx((2.0 - std::sqrt(4.0 - g * g)) / g).epsilon(1e-12));
  // The minimizer beats its neighbours.
  const double e_min = two_qubit_nonorthogonal(a, 0.0, xm, 1);
  CHECK(e_min < two_qubit_nonorthogonal(a, 0.0, xm + 1e-4, 1));
  CHECK(e_min < two_qubit_nonorthogonal(a, 0.0, xm - 1e-4, 1));
  // Orthogonal functions want the uncorrelated probe, exactly.
  CHECK(two_qubit_x_min(0.5, -0.5) == 0.0);
  // Positive alignment pulls toward positive correlation and helps.
  CHECK(two_qubit_x_min(M_PI / 6, M_PI / 6) > 0.0);
  CHECK(two_qubit_nonorthogonal(M_PI / 6, M_PI / 6, two_qubit_x_min(M_PI / 6, M_PI / 6), 1) <
        two_qubit_nonorthogonal(M_PI / 6, M_PI / 6, 0.0, 1));
  CHECK_THROWS_AS(two_qubit_nonorthogonal(M_PI / 4, M_PI / 4, 0.0, 1), SchemaError);
  CHECK_THROWS_AS(two_qubit_nonorthogonal(0.1, 0.0, 1.0, 1), SchemaError);
  CHECK_THROWS_AS(two_qubit_x_min(M_PI / 4, M_PI / 4), SchemaError);
}

TEST_CASE("variance propagation for linear combinations") {
  RVec c(2), s(2);
  c << 2.0, 3.0;
  s << 0.1, 0.2;
  CHECK(propagate_variance(c, s) == doctest::Approx(2.2).epsilon(1e-15));
  CHECK(propagate_variance(RVec::Zero(3), RVec::Ones(3)) == 0.0);
  CHECK_THROWS_AS(propagate_variance(c, RVec::Ones(3)), SchemaError);
}
