#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "homog/energy.hpp"
#include "homog/sampling.hpp"

using namespace homog;

TEST_CASE("ordered-pair convention: interior pairs count twice") {
  PointCloud cloud({{-0.2, 0}, {0.2, 0}}, Window({0, 0}, 10, 10));
  NeighborIndex index(cloud, 1.0);
  ScalarField u(cloud);
  u.values = {1.0, 4.0};
  const Region A(Window({0, 0}, 2, 2));
  // Both endpoints in A: (1-4)^2 counted for each ordered pair = 18.
  CHECK(dirichletEnergy(cloud, index, u, A, 1.0) == doctest::Approx(18.0));
}

TEST_CASE("pairs with one endpoint outside the region count once") {
  PointCloud cloud({{-0.2, 0}, {1.2, 0}}, Window({0, 0}, 10, 10));
  NeighborIndex index(cloud, 2.0);
  ScalarField u(cloud);
  u.values = {0.0, 3.0};
  // Only the first point is in Q_2; its pair contributes once.
  CHECK(dirichletEnergy(cloud, index, u, Region(Window({0, 0}, 2, 2)), 2.0) ==
        doctest::Approx(9.0));
}

TEST_CASE("interaction is strictly below the radius") {
  PointCloud cloud({{0, 0}, {1, 0}}, Window({0.5, 0}, 8, 8));
  NeighborIndex index(cloud, 1.0);
  ScalarField u(cloud);
  u.values = {0.0, 5.0};
  CHECK(dirichletEnergy(cloud, index, u, Region(Window({0.5, 0}, 3, 3)), 1.0) ==
        doctest::Approx(0.0));
}

TEST_CASE("insufficient padding is a hard error") {
  PointCloud cloud({{0, 0}}, Window({0, 0}, 2, 2));
  NeighborIndex index(cloud, 1.0);
  ScalarField u(cloud);
  // Region enlarged by the range sticks out of the cloud window.
  CHECK_THROWS(dirichletEnergy(cloud, index, u, Region(Window({0, 0}, 2, 2)), 1.0));
  // Range above the index radius is rejected too.
  CHECK_THROWS(dirichletEnergy(cloud, index, u, Region(Window({0, 0}, 0.5, 0.5)), 1.5));
}

TEST_CASE("kernel energy generalizes the plain energy") {
  SamplingSpec spec;
  spec.window = Window({0, 0}, 6, 6);
  spec.intensity = 2.0;
  spec.stream = RandomStream(11);
  const PointCloud cloud = samplePoisson(spec);
  NeighborIndex index(cloud, 1.0);
  const ScalarField u =
      ScalarField::sample(cloud, [](const Vec2& p) { return p.x * p.y; });
  const Region A(Window({0, 0}, 4, 4));
  const double plain = dirichletEnergy(cloud, index, u, A, 1.0);
  const double unitKernel =
      kernelEnergy(cloud, index, u, A, 1.0, 1.0, [](Vec2) { return 1.0; });
  CHECK(unitKernel == doctest::Approx(plain).epsilon(1e-12));

  // The eps argument rescales the kernel argument.
  const double halfRange = kernelEnergy(
      cloud, index, u, A, 1.0, 2.0,
      [](Vec2 v) { return v.norm() < 0.25 ? 1.0 : 0.0; });
  const double direct = dirichletEnergy(cloud, index, u, A, 0.5);
  CHECK(halfRange == doctest::Approx(direct).epsilon(1e-12));

  CHECK_THROWS(
      kernelEnergy(cloud, index, u, A, 1.0, 1.0, [](Vec2) { return -1.0; }));
}

TEST_CASE("pair count on a lattice is exact") {
  const PointCloud lat =
      latticeCloud(Window({0, 0}, 8, 8), 1.0, 0.0, RandomStream(0));
  NeighborIndex index(lat, 1.5);
  // Q_2 holds the 4 center lattice points; each has 4 axis neighbors and 4
  // diagonal neighbors within 1.5.
  const PairCountResult res =
      pairCount(lat, index, Region(Window({0, 0}, 2, 2)), 1.5);
  CHECK(res.points == 4);
  CHECK(res.pairs == 4 * 8);
}

TEST_CASE("polygonal regions integrate the same pairs") {
  SamplingSpec spec;
  spec.window = Window({0, 0}, 8, 8);
  spec.intensity = 1.5;
  spec.stream = RandomStream(77);
  const PointCloud cloud = samplePoisson(spec);
  NeighborIndex index(cloud, 1.0);
  const ScalarField u =
      ScalarField::sample(cloud, [](const Vec2& p) { return p.x; });
  const Window win({0, 0}, 3, 3);
  const double viaRect = dirichletEnergy(cloud, index, u, Region(win), 1.0);
  const double viaPoly =
      dirichletEnergy(cloud, index, u, Region(ConvexPolygon::fromWindow(win)), 1.0);
  CHECK(viaRect == doctest::Approx(viaPoly).epsilon(1e-12));
}
