#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "homog/geometry2d.hpp"
#include "homog/random.hpp"

namespace homog {

struct TransformRecord {
  std::string op;  // "scale" | "translate" | "rotate"
  double a = 0.0;  // scale factor / vx / theta
  double b = 0.0;  // vy (translate only)
};

struct CloudMeta {
  std::uint64_t seed = 0;
  double gamma = 0.0;
  std::string rng = RandomStream::kAlgorithm;
  std::vector<TransformRecord> transforms;
};

// Finite simple point set in a rectangular window. Points are paired with
// stable integer ids; ids survive transforms.
struct PointCloud {
  std::vector<Vec2> pts;
  std::vector<std::int64_t> ids;
  Window window;
  CloudMeta meta;

  PointCloud() = default;
  PointCloud(std::vector<Vec2> points, Window win, CloudMeta m = {});

  std::size_t size() const { return pts.size(); }

  // Index of an id in the point arrays; ids are kept ascending so this is a
  // binary search.
  std::size_t indexOf(std::int64_t id) const;
};

// Real values indexed by point identity; position-aligned with the cloud.
struct ScalarField {
  const PointCloud* domain = nullptr;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(const PointCloud& cloud, double fill = 0.0)
      : domain(&cloud), values(cloud.size(), fill) {}

  double at(std::size_t i) const { return values[i]; }
  double& at(std::size_t i) { return values[i]; }

  template <class F>
  static ScalarField sample(const PointCloud& cloud, F&& f) {
    ScalarField u(cloud);
    for (std::size_t i = 0; i < cloud.size(); ++i) u.values[i] = f(cloud.pts[i]);
    return u;
  }
};

// Text formats. Cloud: `#cloud v1 seed=<u64> gamma=<f64> window=<cx> <cy> <w> <h>`
// then one `id x y` per line, ids ascending, 17 significant digits.
void writeCloud(const PointCloud& cloud, const std::string& path);
PointCloud readCloud(const std::string& path);

// Field: one `id value` per line.
void writeField(const ScalarField& u, const std::string& path);
ScalarField readField(const PointCloud& cloud, const std::string& path);

std::string formatDouble(double v);  // 17 significant digits

}  // namespace homog
