#include "homog/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace homog {

namespace {

void checkPadding(const PointCloud& cloud, const NeighborIndex& index,
                  const Region& A, double range, const char* who) {
  if (!(range > 0.0))
    throw std::invalid_argument(std::string(who) + ": range must be > 0");
  if (range > index.radius())
    throw std::invalid_argument(std::string(who) +
                                ": range exceeds the neighbor index radius");
  const Window padded = A.boundingWindow().enlarged(range);
  if (!cloud.window.containsWindow(padded))
    throw std::invalid_argument(
        std::string(who) +
        ": the cloud window must contain the region enlarged by the "
        "interaction range; sample with enough padding");
}

}  // namespace

double dirichletEnergy(const PointCloud& cloud, const NeighborIndex& index,
                       const ScalarField& field, const Region& A, double range) {
  checkPadding(cloud, index, A, range, "dirichletEnergy");
  if (field.domain != &cloud)
    throw std::invalid_argument("dirichletEnergy: field not defined on this cloud");
  const double r2 = range * range;
  double total = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!A.contains(cloud.pts[i])) continue;
    const double ui = field.values[i];
    for (std::uint32_t j : index.neighbors(i)) {
      if (dist2(cloud.pts[i], cloud.pts[j]) >= r2) continue;
      const double d = ui - field.values[j];
      total += d * d;
    }
  }
  return total;
}

double kernelEnergy(const PointCloud& cloud, const NeighborIndex& index,
                    const ScalarField& field, const Region& A, double range,
                    double eps, const std::function<double(Vec2)>& kernel) {
  checkPadding(cloud, index, A, range, "kernelEnergy");
  if (field.domain != &cloud)
    throw std::invalid_argument("kernelEnergy: field not defined on this cloud");
  if (!(eps > 0.0)) throw std::invalid_argument("kernelEnergy: eps must be > 0");
  const double r2 = range * range;
  double total = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!A.contains(cloud.pts[i])) continue;
    const double ui = field.values[i];
    for (std::uint32_t j : index.neighbors(i)) {
      if (dist2(cloud.pts[i], cloud.pts[j]) >= r2) continue;
      const double a = kernel((cloud.pts[i] - cloud.pts[j]) / eps);
      if (!(a >= 0.0))
        throw std::domain_error("kernelEnergy: kernel must be nonnegative");
      const double d = ui - field.values[j];
      total += a * d * d;
    }
  }
  return total;
}

PairCountResult pairCount(const PointCloud& cloud, const NeighborIndex& index,
                          const Region& A, double range) {
  checkPadding(cloud, index, A, range, "pairCount");
  const double r2 = range * range;
  PairCountResult res;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!A.contains(cloud.pts[i])) continue;
    ++res.points;
    for (std::uint32_t j : index.neighbors(i))
      if (dist2(cloud.pts[i], cloud.pts[j]) < r2) ++res.pairs;
  }
  return res;
}

}  // namespace homog
