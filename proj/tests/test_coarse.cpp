#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "homog/coarse.hpp"
#include "homog/sampling.hpp"

using namespace homog;

namespace {

// A hand-built 2x2 grid over Q_1 on a fine jittered lattice, paths taken from
// the real assembler so downstream code sees realistic data.
struct Fixture {
  PointCloud cloud;
  VoronoiDiagram diagram;
  RegularGrid grid;

  static Fixture make(std::uint64_t seed, bool fromTop = false) {
    const double eps = 0.02;
    Fixture f{latticeCloud(Window({0, 0}, 1.4, 1.4), eps, 0.1 * eps,
                           RandomStream(seed)),
              {},
              {}};
    f.diagram = voronoiDiagram(f.cloud, f.cloud.window, false);
    const GridAssembly res =
        assembleGrid(f.cloud, eps, 0.5, 0.3, 3.0, 60.0, fromTop);
    REQUIRE_MESSAGE(res.ok, res.failure);
    f.grid = res.grid;
    return f;
  }
};

}  // namespace

TEST_CASE("simple functions evaluate per square and guard their domain") {
  SimpleFunction f;
  f.t = 0.5;
  f.kt = 2;
  f.origin = {-0.5, -0.5};
  f.coeff = {1, 2, 3, 4};
  f.defined = {1, 1, 1, 0};
  CHECK(f.at({-0.3, -0.3}) == 1);  // row 0, col 0
  CHECK(f.at({0.3, -0.3}) == 2);
  CHECK(f.at({-0.3, 0.3}) == 3);
  CHECK_THROWS(f.at({0.3, 0.3}));   // undefined square
  CHECK_THROWS(f.at({0.8, 0.0}));   // outside the tiling
  CHECK(f.square(1, 1).contains({0.3, 0.3}));
}

TEST_CASE("grid averages are exact for constants and linear in the field") {
  const Fixture fx = Fixture::make(3);
  const ScalarField ones =
      ScalarField::sample(fx.cloud, [](const Vec2&) { return 2.5; });
  const GridAverages avg = gridAverage(ones, fx.grid);
  CHECK(avg.emptySquares == 0);
  REQUIRE(avg.f.kt == fx.grid.kt);
  for (std::size_t i = 0; i < fx.grid.kt; ++i)
    for (std::size_t j = 0; j < fx.grid.kt; ++j) {
      CHECK(avg.f.definedAt(i, j));
      CHECK(avg.counts[i * fx.grid.kt + j] > 0);
      CHECK(avg.f.coeff[i * fx.grid.kt + j] == doctest::Approx(2.5));
    }

  const ScalarField a =
      ScalarField::sample(fx.cloud, [](const Vec2& p) { return p.x; });
  const ScalarField b =
      ScalarField::sample(fx.cloud, [](const Vec2& p) { return p.y * p.y; });
  ScalarField combo = a;
  for (std::size_t k = 0; k < combo.values.size(); ++k)
    combo.values[k] = 2 * a.values[k] - 3 * b.values[k];
  const GridAverages A = gridAverage(a, fx.grid);
  const GridAverages B = gridAverage(b, fx.grid);
  const GridAverages C = gridAverage(combo, fx.grid);
  for (std::size_t k = 0; k < C.f.coeff.size(); ++k)
    CHECK(C.f.coeff[k] ==
          doctest::Approx(2 * A.f.coeff[k] - 3 * B.f.coeff[k]).epsilon(1e-12));
}

TEST_CASE("piecewise-constant extension picks the owning cell") {
  const PointCloud cloud =
      latticeCloud(Window({0, 0}, 6, 6), 1.0, 0.0, RandomStream(0));
  const VoronoiDiagram diagram = voronoiDiagram(cloud, cloud.window, false);
  const ScalarField u =
      ScalarField::sample(cloud, [](const Vec2& p) { return 10 * p.x + p.y; });
  const PcExtension uhat(u, diagram);
  for (std::size_t i = 0; i < cloud.pts.size(); ++i)
    CHECK(uhat(cloud.pts[i]) == doctest::Approx(u.values[i]));
  // Anywhere inside a cell the value is the site's value.
  CHECK(uhat({0.7, 0.4}) == doctest::Approx(10 * 0.5 + 0.5));
  CHECK_THROWS(uhat({7.0, 0.0}));
}

TEST_CASE("grid L2 distance vanishes for matched fields and scales with offsets") {
  const Fixture fx = Fixture::make(7);
  const ScalarField u =
      ScalarField::sample(fx.cloud, [](const Vec2& p) { return p.x + 2 * p.y; });
  const Region region(fx.grid.domain);

  const L2Result zero = gridL2Distance(
      u, fx.grid, fx.diagram, [](Vec2) { return 0.0; }, region);
  CHECK(zero.area > 0);
  CHECK(zero.area < region.area() + 1e-9);

  // Constant offset c: integral is exactly c^2 * area when w = uhat + c...
  // here w(x) = the affine function, so the distance is the cell-discretization
  // error, small at eps = 0.02.
  const L2Result matched = gridL2Distance(
      u, fx.grid, fx.diagram, [](Vec2 p) { return p.x + 2 * p.y; }, region);
  CHECK(matched.area == doctest::Approx(zero.area));
  CHECK(matched.value < 1e-3 * zero.area);

  const L2Result shifted = gridL2Distance(
      u, fx.grid, fx.diagram, [](Vec2 p) { return p.x + 2 * p.y + 4.0; },
      region);
  // (uhat - w)^2 = (discretization + 4)^2; the cross term is small.
  CHECK(shifted.value ==
        doctest::Approx(matched.value + 16.0 * matched.area).epsilon(1e-2));
}

TEST_CASE("independence gap is zero against itself and tiny for constants") {
  const Fixture fx = Fixture::make(11);
  const Fixture fy = Fixture::make(11, true);  // same cloud, opposite sweep
  REQUIRE(fy.grid.kt == fx.grid.kt);

  const ScalarField affine =
      ScalarField::sample(fx.cloud, [](const Vec2& p) { return 3 * p.x - p.y; });
  const GapResult self = gridIndependenceGap(affine, fx.grid, fx.grid);
  CHECK(self.gap == 0.0);
  CHECK(self.skipped == 0);

  const ScalarField constant =
      ScalarField::sample(fx.cloud, [](const Vec2&) { return 1.25; });
  const GapResult flat = gridIndependenceGap(constant, fx.grid, fy.grid);
  CHECK(flat.gap == doctest::Approx(0.0));

  // Mesh mismatch is rejected.
  RegularGrid other = fy.grid;
  other.t *= 0.5;
  CHECK_THROWS(gridIndependenceGap(affine, fx.grid, other));
}

TEST_CASE("convergence report rows carry both distances") {
  const Fixture fx = Fixture::make(13);
  const ScalarField u =
      ScalarField::sample(fx.cloud, [](const Vec2& p) { return p.x; });
  ConvergenceEntry entry;
  entry.eps = 0.02;
  entry.field = &u;
  entry.grid = &fx.grid;
  entry.diagram = &fx.diagram;
  const ConvergenceReport rep =
      convergenceReport({entry}, [](Vec2 p) { return p.x; });
  REQUIRE(rep.rows.size() == 1);
  const ConvergenceRow& row = rep.rows[0];
  CHECK(row.eps == 0.02);
  CHECK(row.t == fx.grid.t);
  CHECK(row.areaGrid > 0);
  CHECK(row.distGrid < 1e-3);
  // Path points are not uniform in each square, so the averages carry a small
  // placement bias relative to the square center.
  CHECK(row.distSimple < 1e-2);
  CHECK(row.emptySquares == 0);
}
