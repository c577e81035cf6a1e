#include "homog/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace homog {

PointCloud samplePoisson(const SamplingSpec& spec) {
  if (!(std::isfinite(spec.intensity)) || spec.intensity < 0.0)
    throw std::invalid_argument("samplePoisson: intensity must be finite and >= 0");
  if (!(spec.window.width > 0.0) || !(spec.window.height > 0.0) ||
      !std::isfinite(spec.window.width) || !std::isfinite(spec.window.height))
    throw std::invalid_argument("samplePoisson: degenerate window");
  if (spec.padding < 0.0)
    throw std::invalid_argument("samplePoisson: negative padding");

  const Window padded = spec.window.enlarged(spec.padding);
  RandomDraw rng(spec.stream);
  const long long n = rng.nextPoisson(spec.intensity * padded.area());
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    const double x = rng.nextUniform(padded.xmin(), padded.xmax());
    const double y = rng.nextUniform(padded.ymin(), padded.ymax());
    pts.push_back({x, y});
  }
  CloudMeta meta;
  meta.seed = spec.stream.seed;
  meta.gamma = spec.intensity;
  return PointCloud(std::move(pts), padded, std::move(meta));
}

PointCloud transformCloud(const PointCloud& cloud, const CloudTransform& op) {
  PointCloud out = cloud;
  if (std::holds_alternative<Scale>(op)) {
    const double s = std::get<Scale>(op).s;
    if (!(s > 0.0)) throw std::invalid_argument("transformCloud: scale must be > 0");
    for (Vec2& p : out.pts) p = p * s;
    out.window = Window(cloud.window.center * s, cloud.window.width * s,
                        cloud.window.height * s);
    out.meta.transforms.push_back({"scale", s, 0.0});
  } else if (std::holds_alternative<Translate>(op)) {
    const Vec2 v = std::get<Translate>(op).v;
    for (Vec2& p : out.pts) p = p + v;
    out.window = Window(cloud.window.center + v, cloud.window.width,
                        cloud.window.height);
    out.meta.transforms.push_back({"translate", v.x, v.y});
  } else {
    const double theta = std::get<RotateOp>(op).theta;
    for (Vec2& p : out.pts) p = rotate(p, theta);
    // Largest axis-aligned square inscribed in the rotated rectangle,
    // centered at the rotated center; coverage stays a guarantee, not a claim
    // about the support hull.
    const double c = std::abs(std::cos(theta)), s = std::abs(std::sin(theta));
    const double side = std::min(cloud.window.width, cloud.window.height) /
                        std::max(c + s, 1.0);
    out.window = Window::square(rotate(cloud.window.center, theta), side);
    out.meta.transforms.push_back({"rotate", theta, 0.0});
    for (const Vec2& p : out.pts) {
      if (!out.window.containsClosed(p)) {
        // Points may leave the shrunken window; keep them but widen the
        // window to their bounding box so the cloud invariant holds. The
        // coverage guarantee is still the inscribed square tracked above.
        double x0 = out.window.xmin(), x1 = out.window.xmax();
        double y0 = out.window.ymin(), y1 = out.window.ymax();
        for (const Vec2& q : out.pts) {
          x0 = std::min(x0, q.x);
          x1 = std::max(x1, q.x);
          y0 = std::min(y0, q.y);
          y1 = std::max(y1, q.y);
        }
        out.window = Window({(x0 + x1) / 2, (y0 + y1) / 2}, x1 - x0, y1 - y0);
        break;
      }
    }
  }
  return out;
}

PointCloud latticeCloud(const Window& window, double spacing, double jitter,
                        const RandomStream& stream) {
  if (!(spacing > 0.0)) throw std::invalid_argument("latticeCloud: spacing must be > 0");
  if (jitter < 0.0 || jitter >= spacing / 2.0)
    throw std::invalid_argument("latticeCloud: jitter must be in [0, spacing/2)");
  RandomDraw rng(stream);
  std::vector<Vec2> pts;
  const long long i0 = static_cast<long long>(std::floor(window.xmin() / spacing));
  const long long i1 = static_cast<long long>(std::ceil(window.xmax() / spacing));
  const long long j0 = static_cast<long long>(std::floor(window.ymin() / spacing));
  const long long j1 = static_cast<long long>(std::ceil(window.ymax() / spacing));
  for (long long j = j0; j <= j1; ++j) {
    for (long long i = i0; i <= i1; ++i) {
      Vec2 p{(static_cast<double>(i) + 0.5) * spacing,
             (static_cast<double>(j) + 0.5) * spacing};
      double dx, dy;
      rng.nextInBall(jitter, dx, dy);
      p.x += dx;
      p.y += dy;
      if (window.contains(p)) pts.push_back(p);
    }
  }
  CloudMeta meta;
  meta.seed = stream.seed;
  meta.gamma = 1.0 / (spacing * spacing);
  return PointCloud(std::move(pts), window, std::move(meta));
}

}  // namespace homog
