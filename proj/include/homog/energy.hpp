#pragma once

#include <cstdint>
#include <functional>

#include "homog/cloud.hpp"
#include "homog/neighbor.hpp"

namespace homog {

// Discrete Dirichlet energy of `field` on region A at interaction range
// `range`:
//
//   F(u; A) = sum_{x in cloud ∩ A} sum_{y : 0 < |x-y| < range} (u(x) - u(y))^2
//
// Pairs are ordered, so interior pairs are counted twice and pairs with one
// endpoint outside A once. The cloud window must contain the bounding box of
// A enlarged by `range` on every side; otherwise neighborhoods of points near
// the boundary of A would be truncated and the call fails.
double dirichletEnergy(const PointCloud& cloud, const NeighborIndex& index,
                       const ScalarField& field, const Region& A, double range);

// Kernel variant: each ordered pair contributes a((x-y)/eps) (u(x)-u(y))^2.
// The kernel must be nonnegative on the ball of radius range/eps; negative
// values are a hard error.
double kernelEnergy(const PointCloud& cloud, const NeighborIndex& index,
                    const ScalarField& field, const Region& A, double range,
                    double eps, const std::function<double(Vec2)>& kernel);

// Number of ordered interacting pairs (x in A, 0 < |x-y| < range) plus the
// number of points of cloud ∩ A (the Mecke functional eta(A) + pairs). Used
// for intensity diagnostics.
struct PairCountResult {
  std::uint64_t points = 0;   // points of the cloud in A
  std::uint64_t pairs = 0;    // ordered pairs with first endpoint in A
};

PairCountResult pairCount(const PointCloud& cloud, const NeighborIndex& index,
                          const Region& A, double range);

}  // namespace homog
