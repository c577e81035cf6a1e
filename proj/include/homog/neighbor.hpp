#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "homog/cloud.hpp"

namespace homog {

// Fixed-radius neighbor index backed by a bucket grid (cell list).
// Neighborhood convention is strict: y is a neighbor of x iff 0 < |x-y| < r.
class NeighborIndex {
 public:
  // With buildLists unset only the ball/nearest queries are available; use
  // that for large clouds with wide radii, where per-point lists would not
  // fit in memory.
  NeighborIndex(const PointCloud& cloud, double radius, bool buildLists = true);

  double radius() const { return radius_; }
  const PointCloud& cloud() const { return *cloud_; }

  // Sorted (by index) list of neighbors of point i; requires buildLists.
  const std::vector<std::uint32_t>& neighbors(std::size_t i) const;

  // Number of cloud points with |p - x| < r, including x itself when x is a
  // cloud point at distance 0.
  std::size_t countInBall(const Vec2& p, double r) const;

  // Indices of cloud points with |p - x| < r, unsorted unless requested.
  std::vector<std::uint32_t> query(const Vec2& p, double r) const;

  // Index of the nearest cloud point to p (lexicographic tie-break on
  // coordinates, then smallest id).
  std::size_t nearest(const Vec2& p) const;

  void forEachInBall(const Vec2& p, double r,
                     const std::function<void(std::uint32_t)>& fn) const;

 private:
  const PointCloud* cloud_;
  double radius_;
  double x0_, y0_;
  double cell_;
  int nx_, ny_;
  std::vector<std::vector<std::uint32_t>> buckets_;
  std::vector<std::vector<std::uint32_t>> lists_;
  bool hasLists_ = false;

  int bucketOf(const Vec2& p) const;
};

}  // namespace homog
