#include "homog/neighbor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace homog {

NeighborIndex::NeighborIndex(const PointCloud& cloud, double radius,
                             bool buildLists)
    : cloud_(&cloud), radius_(radius), hasLists_(buildLists) {
  if (!(radius > 0.0)) throw std::invalid_argument("NeighborIndex: radius must be > 0");
  x0_ = cloud.window.xmin();
  y0_ = cloud.window.ymin();
  cell_ = radius;
  nx_ = std::max(1, static_cast<int>(std::ceil(cloud.window.width / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil(cloud.window.height / cell_)));
  buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (std::size_t i = 0; i < cloud.size(); ++i)
    buckets_[bucketOf(cloud.pts[i])].push_back(static_cast<std::uint32_t>(i));

  if (!buildLists) return;
  lists_.resize(cloud.size());
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec2& p = cloud.pts[i];
    const int cx = std::clamp(static_cast<int>((p.x - x0_) / cell_), 0, nx_ - 1);
    const int cy = std::clamp(static_cast<int>((p.y - y0_) / cell_), 0, ny_ - 1);
    for (int by = std::max(0, cy - 1); by <= std::min(ny_ - 1, cy + 1); ++by) {
      for (int bx = std::max(0, cx - 1); bx <= std::min(nx_ - 1, cx + 1); ++bx) {
        for (std::uint32_t j : buckets_[static_cast<std::size_t>(by) * nx_ + bx]) {
          if (j == i) continue;
          if (dist2(p, cloud.pts[j]) < r2) lists_[i].push_back(j);
        }
      }
    }
    std::sort(lists_[i].begin(), lists_[i].end());
  }
}

const std::vector<std::uint32_t>& NeighborIndex::neighbors(std::size_t i) const {
  if (!hasLists_)
    throw std::logic_error("NeighborIndex: built without neighbor lists");
  return lists_[i];
}

int NeighborIndex::bucketOf(const Vec2& p) const {
  const int cx = std::clamp(static_cast<int>((p.x - x0_) / cell_), 0, nx_ - 1);
  const int cy = std::clamp(static_cast<int>((p.y - y0_) / cell_), 0, ny_ - 1);
  return cy * nx_ + cx;
}

void NeighborIndex::forEachInBall(
    const Vec2& p, double r, const std::function<void(std::uint32_t)>& fn) const {
  const double r2 = r * r;
  const int bx0 = std::clamp(static_cast<int>(std::floor((p.x - r - x0_) / cell_)), 0, nx_ - 1);
  const int bx1 = std::clamp(static_cast<int>(std::floor((p.x + r - x0_) / cell_)), 0, nx_ - 1);
  const int by0 = std::clamp(static_cast<int>(std::floor((p.y - r - y0_) / cell_)), 0, ny_ - 1);
  const int by1 = std::clamp(static_cast<int>(std::floor((p.y + r - y0_) / cell_)), 0, ny_ - 1);
  for (int by = by0; by <= by1; ++by)
    for (int bx = bx0; bx <= bx1; ++bx)
      for (std::uint32_t j : buckets_[static_cast<std::size_t>(by) * nx_ + bx])
        if (dist2(p, cloud_->pts[j]) < r2) fn(j);
}

std::size_t NeighborIndex::countInBall(const Vec2& p, double r) const {
  // Whole buckets strictly inside the ball are counted wholesale; only
  // buckets straddling the circle are scanned point by point. This matters
  // when r spans many bucket cells.
  const double r2 = r * r;
  const int bx0 = std::clamp(static_cast<int>(std::floor((p.x - r - x0_) / cell_)), 0, nx_ - 1);
  const int bx1 = std::clamp(static_cast<int>(std::floor((p.x + r - x0_) / cell_)), 0, nx_ - 1);
  const int by0 = std::clamp(static_cast<int>(std::floor((p.y - r - y0_) / cell_)), 0, ny_ - 1);
  const int by1 = std::clamp(static_cast<int>(std::floor((p.y + r - y0_) / cell_)), 0, ny_ - 1);
  std::size_t n = 0;
  for (int by = by0; by <= by1; ++by) {
    const double ylo = y0_ + by * cell_, yhi = ylo + cell_;
    const double dyn = std::max({ylo - p.y, p.y - yhi, 0.0});
    const double dyf = std::max(std::abs(p.y - ylo), std::abs(p.y - yhi));
    for (int bx = bx0; bx <= bx1; ++bx) {
      const double xlo = x0_ + bx * cell_, xhi = xlo + cell_;
      const double dxn = std::max({xlo - p.x, p.x - xhi, 0.0});
      const double dxf = std::max(std::abs(p.x - xlo), std::abs(p.x - xhi));
      const auto& bucket = buckets_[static_cast<std::size_t>(by) * nx_ + bx];
      if (dxn * dxn + dyn * dyn >= r2) continue;          // fully outside
      if (dxf * dxf + dyf * dyf < r2) {                   // fully inside
        n += bucket.size();
        continue;
      }
      for (std::uint32_t j : bucket)
        if (dist2(p, cloud_->pts[j]) < r2) ++n;
    }
  }
  return n;
}

std::vector<std::uint32_t> NeighborIndex::query(const Vec2& p, double r) const {
  std::vector<std::uint32_t> out;
  forEachInBall(p, r, [&](std::uint32_t j) { out.push_back(j); });
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t NeighborIndex::nearest(const Vec2& p) const {
  if (cloud_->size() == 0) throw std::runtime_error("NeighborIndex: empty cloud");
  double r = cell_;
  const double maxR =
      std::hypot(cloud_->window.width, cloud_->window.height) + cell_;
  for (;;) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    double bestD2 = std::numeric_limits<double>::infinity();
    forEachInBall(p, r, [&](std::uint32_t j) {
      const double d2 = dist2(p, cloud_->pts[j]);
      const Vec2& q = cloud_->pts[j];
      if (d2 < bestD2 ||
          (d2 == bestD2 && best < cloud_->size() &&
           (q.x < cloud_->pts[best].x ||
            (q.x == cloud_->pts[best].x && q.y < cloud_->pts[best].y)))) {
        bestD2 = d2;
        best = j;
      }
    });
    // A hit is only conclusive once the search radius covers the best
    // distance (the ball may have clipped a closer point in a farther cell).
    if (best != std::numeric_limits<std::size_t>::max() &&
        std::sqrt(bestD2) < r)
      return best;
    if (r > maxR) {
      if (best != std::numeric_limits<std::size_t>::max()) return best;
      throw std::runtime_error("NeighborIndex::nearest: no point found");
    }
    r *= 2.0;
  }
}

}  // namespace homog
