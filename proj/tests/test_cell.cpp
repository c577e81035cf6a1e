#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "homog/cell_problem.hpp"
#include "homog/sampling.hpp"

using namespace homog;

namespace {

PointCloud poissonCloud(double side, double intensity, std::uint64_t seed) {
  SamplingSpec spec;
  spec.window = Window({0, 0}, side, side);
  spec.intensity = intensity;
  spec.stream = RandomStream(seed);
  return samplePoisson(spec);
}

}  // namespace

TEST_CASE("clamp partition splits by distance to the boundary") {
  const PointCloud lat =
      latticeCloud(Window({0, 0}, 16, 16), 1.0, 0.0, RandomStream(0));
  const Region A(Window({0, 0}, 10, 10));
  const double lambda = 1.2;
  const ClampPartition part = clampPartition(lat, A, lambda, {1, 0});
  // Free: strictly more than 2.4 inside Q_10, i.e. the 4x4 block of half-integer
  // points with |x|,|y| < 2.6.
  CHECK(part.freeIdx.size() == 36);
  for (std::uint32_t i : part.freeIdx) {
    CHECK(A.boundaryDistance(lat.pts[i]) > 2 * lambda);
    CHECK(part.varOf[i] >= 0);
  }
  // Clamped: the rest of Q_10 plus the single lattice ring within lambda of it.
  for (std::size_t k = 0; k < part.clampedIdx.size(); ++k) {
    const Vec2 p = lat.pts[part.clampedIdx[k]];
    CHECK(part.clampValues[k] == doctest::Approx(p.x));
    CHECK((A.contains(p) || A.boundaryDistance(p) <= lambda));
  }
  // All 100 points of Q_10 plus the lattice ring within lambda of the
  // boundary (10 per side plus the 4 corners at distance sqrt(0.5)).
  CHECK(part.freeIdx.size() + part.clampedIdx.size() == 100 + 44);

  // A region no wider than 4*lambda has no free points at all.
  const ClampPartition tight =
      clampPartition(lat, Region(Window({0, 0}, 4.8, 4.8)), lambda, {1, 0});
  CHECK(tight.freeIdx.empty());
}

TEST_CASE("quadratic form reproduces the clamped energy") {
  const PointCloud cloud = poissonCloud(14, 1.0, 5);
  NeighborIndex index(cloud, 1.5);
  const Region A(Window({0, 0}, 8, 8));
  const ClampPartition part = clampPartition(cloud, A, 1.5, {1, -0.5});
  const QuadraticSystem sys = assembleQuadratic(cloud, index, part);
  REQUIRE(sys.n == part.freeIdx.size());
  REQUIRE(sys.n > 0);

  RandomDraw draw(RandomStream(123));
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> w(sys.n);
    for (double& v : w) v = draw.nextUniform(-2, 2);
    ScalarField u = ScalarField::sample(
        cloud, [&](const Vec2& p) { return p.x - 0.5 * p.y; });
    for (std::size_t i = 0; i < sys.n; ++i) u.values[part.freeIdx[i]] = w[i];
    const double direct = dirichletEnergy(cloud, index, u, A, 1.5);
    CHECK(sys.quadraticValue(w) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("system matrix is symmetric and positive semidefinite") {
  const PointCloud cloud = poissonCloud(12, 1.2, 9);
  NeighborIndex index(cloud, 1.3);
  const ClampPartition part =
      clampPartition(cloud, Region(Window({0, 0}, 7, 7)), 1.3, {0, 1});
  const QuadraticSystem sys = assembleQuadratic(cloud, index, part);
  REQUIRE(sys.n > 0);

  // Symmetry: compare entries (i,j) and (j,i).
  auto entry = [&](std::size_t i, std::uint32_t j) {
    for (std::size_t k = sys.rowPtr[i]; k < sys.rowPtr[i + 1]; ++k)
      if (sys.col[k] == j) return sys.val[k];
    return 0.0;
  };
  for (std::size_t i = 0; i < sys.n; ++i)
    for (std::size_t k = sys.rowPtr[i]; k < sys.rowPtr[i + 1]; ++k)
      CHECK(sys.val[k] == doctest::Approx(entry(sys.col[k], (std::uint32_t)i)));

  // PSD: Rayleigh quotients of random vectors are nonnegative.
  RandomDraw draw(RandomStream(7));
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> w(sys.n);
    for (double& v : w) v = draw.nextUniform(-1, 1);
    const std::vector<double> Lw = sys.multiply(w);
    double quad = 0;
    for (std::size_t i = 0; i < sys.n; ++i) quad += w[i] * Lw[i];
    CHECK(quad >= -1e-12);
  }
}

TEST_CASE("no free points leaves the affine energy") {
  const PointCloud lat =
      latticeCloud(Window({0, 0}, 12, 12), 1.0, 0.0, RandomStream(0));
  NeighborIndex index(lat, 1.2);
  const Region A(Window({0, 0}, 4, 4));
  const CellProblemSolution sol = solveCellProblem(lat, index, A, 1.2, {1, 0});
  CHECK(sol.freeCount == 0);
  CHECK(sol.iterations == 0);
  const ScalarField affine =
      ScalarField::sample(lat, [](const Vec2& p) { return p.x; });
  CHECK(sol.m == doctest::Approx(dirichletEnergy(lat, index, affine, A, 1.2)));
}

TEST_CASE("unit lattice at lambda 1.2 gives m = 2 T^2 exactly") {
  const double T = 20;
  const double lambda = 1.2;
  const PointCloud lat = latticeCloud(Window({0, 0}, T + 2 * lambda + 1, T + 2 * lambda + 1),
                                      1.0, 0.0, RandomStream(0));
  const CellProblemSolution sol =
      solveCellProblem(lat, Region(Window({0, 0}, T, T)), lambda, {1, 0});
  CHECK(sol.converged);
  // The affine field is the exact minimizer on the lattice, so CG stops at
  // once and m counts 2 ordered horizontal bonds per point: 2 * T^2.
  CHECK(sol.iterations == 0);
  CHECK(sol.m == doctest::Approx(2 * T * T).epsilon(1e-12));
}

TEST_CASE("m is homogeneous of degree two in the direction") {
  const PointCloud cloud = poissonCloud(16, 1.0, 21);
  NeighborIndex index(cloud, 1.4);
  const Region A(Window({0, 0}, 9, 9));
  const CellProblemSolution base =
      solveCellProblem(cloud, index, A, 1.4, {0.6, 0.8}, 1e-12);
  const CellProblemSolution doubled =
      solveCellProblem(cloud, index, A, 1.4, {1.2, 1.6}, 1e-12);
  REQUIRE(base.converged);
  REQUIRE(doubled.converged);
  CHECK(doubled.m == doctest::Approx(4 * base.m).epsilon(1e-8));
}

TEST_CASE("m obeys the joint scaling of cloud, region and range") {
  const PointCloud cloud = poissonCloud(16, 1.0, 31);
  const double r = 0.25;
  const PointCloud scaled = transformCloud(cloud, Scale{r});
  const CellProblemSolution coarse =
      solveCellProblem(cloud, Region(Window({0, 0}, 9, 9)), 1.4, {1, 0}, 1e-12);
  const CellProblemSolution fine = solveCellProblem(
      scaled, Region(Window({0, 0}, 9 * r, 9 * r)), 1.4 * r, {1, 0}, 1e-12);
  REQUIRE(coarse.converged);
  REQUIRE(fine.converged);
  CHECK(fine.m == doctest::Approx(r * r * coarse.m).epsilon(1e-8));
}

TEST_CASE("m is invariant under joint rotation of cloud and direction") {
  const PointCloud cloud = poissonCloud(24, 1.0, 41);
  const double theta = 0.7;
  const PointCloud rotated = transformCloud(cloud, RotateOp{theta});
  const Vec2 xi{1, 0};
  const CellProblemSolution straight = solveCellProblem(
      cloud, Region(Window({0, 0}, 8, 8)), 1.4, xi, 1e-12);
  ConvexPolygon turnedSquare = ConvexPolygon::fromWindow(Window({0, 0}, 8, 8));
  for (Vec2& p : turnedSquare.v) p = rotate(p, theta);
  const CellProblemSolution turned = solveCellProblem(
      rotated, Region(turnedSquare), 1.4, rotate(xi, theta), 1e-12);
  REQUIRE(straight.converged);
  REQUIRE(turned.converged);
  CHECK(turned.m == doctest::Approx(straight.m).epsilon(1e-8));
}

TEST_CASE("m is subadditive across a split of the square") {
  const PointCloud cloud = poissonCloud(20, 1.2, 51);
  NeighborIndex index(cloud, 1.3);
  const double T = 12;
  const CellProblemSolution whole = solveCellProblem(
      cloud, index, Region(Window({0, 0}, T, T)), 1.3, {1, 1}, 1e-12);
  const CellProblemSolution left = solveCellProblem(
      cloud, index, Region(Window({-T / 4, 0}, T / 2, T)), 1.3, {1, 1}, 1e-12);
  const CellProblemSolution right = solveCellProblem(
      cloud, index, Region(Window({T / 4, 0}, T / 2, T)), 1.3, {1, 1}, 1e-12);
  REQUIRE(whole.converged);
  CHECK(whole.m <= left.m + right.m + 1e-8);
}

TEST_CASE("xi sweep layout, validation and lattice mode") {
  XiPlan plan;
  plan.Ts = {12, 16};
  plan.seeds = 2;
  plan.dirs = {{1, 0}, {0, 1}};
  plan.lambda = 1.5;
  plan.gamma = 1.0;
  plan.seed = 3;
  const XiEstimate est = estimateXi(plan);
  REQUIRE(est.rows.size() == 2 * 2 * 2);
  for (std::size_t k = 1; k < est.rows.size(); ++k) {
    const XiRow& a = est.rows[k - 1];
    const XiRow& b = est.rows[k];
    CHECK((a.T < b.T || (a.T == b.T && a.seed <= b.seed)));
  }
  for (const XiRow& row : est.rows) {
    CHECK(row.ok);
    CHECK(row.normalized ==
          doctest::Approx(row.m / (row.T * row.T)).epsilon(1e-12));
  }
  REQUIRE(est.perT.size() == 2);
  CHECK(est.perT[0].count == 4);
  CHECK(std::isfinite(est.xi));
  CHECK(est.xiUncertainty >= 0);

  XiPlan bad = plan;
  bad.Ts = {5};  // not above 4 * lambda
  CHECK_THROWS(estimateXi(bad));
  bad = plan;
  bad.dirs = {{0, 0}};
  CHECK_THROWS(estimateXi(bad));

  // Lattice mode is deterministic and hits the known constant.
  XiPlan lat;
  lat.Ts = {24};
  lat.dirs = {{1, 0}};
  lat.lambda = 1.2;
  lat.lattice = true;
  const XiEstimate exact = estimateXi(lat);
  REQUIRE(exact.rows.size() == 1);
  CHECK(exact.rows[0].normalized == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("stitched recovery field refines the affine one") {
  const double eps = 0.02;
  SamplingSpec spec;
  spec.window = Window({0, 0}, 1.6, 1.6);
  spec.intensity = 1.0 / (eps * eps);
  spec.stream = RandomStream(61);
  const PointCloud cloud = samplePoisson(spec);
  const ConvexPolygon S = ConvexPolygon::fromWindow(Window({0, 0}, 1.2, 1.2));
  const Vec2 xi{1, 0};
  const double lambda = 1.5;

  const StitchResult res =
      stitchRecoveryField(cloud, eps, S, xi, 3, 0.1, lambda);
  // S = [-0.6, 0.6]^2 against the (1/3)-lattice: the four squares with all
  // corners strictly inside.
  CHECK(res.interiorSquares == 4);

  NeighborIndex index(cloud, lambda * eps);
  const ScalarField affine =
      ScalarField::sample(cloud, [&](const Vec2& p) { return p.x; });
  // Outside the interior squares the field is untouched; on each shrunk square
  // the stitched minimum cannot exceed the affine energy.
  std::size_t changed = 0;
  for (std::size_t i = 0; i < cloud.pts.size(); ++i)
    if (res.field.values[i] != affine.values[i]) ++changed;
  CHECK(changed > 0);

  double affineInterior = 0;
  const double cell = 1.0 / 3;
  for (double cx : {-cell / 2, cell / 2})
    for (double cy : {-cell / 2, cell / 2}) {
      const Window w({cx, cy}, 0.9 * cell, 0.9 * cell);
      affineInterior += dirichletEnergy(cloud, index, affine, Region(w),
                                        lambda * eps);
    }
  CHECK(res.interiorEnergy <= affineInterior + 1e-9);
}
