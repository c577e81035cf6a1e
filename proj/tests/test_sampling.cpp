#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "homog/sampling.hpp"

using namespace homog;

TEST_CASE("poisson sampling hits the requested intensity") {
  SamplingSpec spec;
  spec.window = Window({0, 0}, 4, 4);
  spec.intensity = 3.0;
  spec.padding = 1.0;
  double total = 0.0;
  const int reps = 400;
  for (int s = 0; s < reps; ++s) {
    spec.stream = RandomStream(99).derive(s);
    const PointCloud cloud = samplePoisson(spec);
    total += static_cast<double>(cloud.size());
    CHECK(cloud.window.width == doctest::Approx(6.0));  // padded
    for (const Vec2& p : cloud.pts) CHECK(cloud.window.containsClosed(p));
  }
  // Mean count = gamma * padded area = 3 * 36 = 108.
  CHECK(total / reps == doctest::Approx(108.0).epsilon(0.03));
}

TEST_CASE("poisson sampling is deterministic per stream") {
  SamplingSpec spec;
  spec.window = Window({0, 0}, 5, 5);
  spec.intensity = 2.0;
  spec.stream = RandomStream(1234).derive(7);
  const PointCloud a = samplePoisson(spec);
  const PointCloud b = samplePoisson(spec);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.pts[i].x == b.pts[i].x);
    CHECK(a.pts[i].y == b.pts[i].y);
  }
  CHECK(a.meta.seed == 1234);
  CHECK(a.meta.gamma == 2.0);
}

TEST_CASE("sampling rejects bad parameters") {
  SamplingSpec spec;
  spec.window = Window({0, 0}, 2, 2);
  spec.intensity = -1.0;
  CHECK_THROWS(samplePoisson(spec));
  spec.intensity = 1.0;
  spec.padding = -0.5;
  CHECK_THROWS(samplePoisson(spec));
}

TEST_CASE("transforms map coordinates and preserve ids") {
  PointCloud cloud({{1, 0}, {0, 1}, {-0.5, -0.5}}, Window({0, 0}, 4, 4));

  const PointCloud scaled = transformCloud(cloud, Scale{2.0});
  CHECK(scaled.pts[0].x == doctest::Approx(2.0));
  CHECK(scaled.window.width == doctest::Approx(8.0));
  CHECK(scaled.ids == cloud.ids);
  CHECK_THROWS(transformCloud(cloud, Scale{0.0}));

  const PointCloud moved = transformCloud(cloud, Translate{{3, -1}});
  CHECK(moved.pts[2].x == doctest::Approx(2.5));
  CHECK(moved.pts[2].y == doctest::Approx(-1.5));
  CHECK(moved.window.center.x == doctest::Approx(3.0));

  const PointCloud turned = transformCloud(cloud, RotateOp{M_PI / 2});
  CHECK(turned.pts[0].x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(turned.pts[0].y == doctest::Approx(1.0));
  for (const Vec2& p : turned.pts) CHECK(turned.window.containsClosed(p));
  REQUIRE(turned.meta.transforms.size() == 1);
  CHECK(turned.meta.transforms[0].op == "rotate");
}

TEST_CASE("lattice cloud places shifted lattice points") {
  // Spacing 1 on the square of side 4: 16 points at (Z + 1/2)^2.
  const PointCloud lat =
      latticeCloud(Window({0, 0}, 4, 4), 1.0, 0.0, RandomStream(5));
  CHECK(lat.size() == 16);
  bool found = false;
  for (const Vec2& p : lat.pts)
    if (std::abs(p.x - 0.5) < 1e-12 && std::abs(p.y - 0.5) < 1e-12) found = true;
  CHECK(found);

  // Jitter stays inside the half-spacing ball and keeps the count.
  const PointCloud jit =
      latticeCloud(Window({0, 0}, 4, 4), 1.0, 0.3, RandomStream(5));
  REQUIRE(jit.size() == 16);
  CHECK_THROWS(latticeCloud(Window({0, 0}, 4, 4), 1.0, 0.6, RandomStream(5)));
  CHECK_THROWS(latticeCloud(Window({0, 0}, 4, 4), -1.0, 0.0, RandomStream(5)));
}
