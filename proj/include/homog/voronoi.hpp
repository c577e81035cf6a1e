#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "homog/cloud.hpp"
#include "homog/neighbor.hpp"

namespace homog {

struct VoronoiCell {
  ConvexPolygon polygon;       // clipped to the clip region
  double area = 0.0;
  double inRadius = 0.0;       // of the clipped polygon
  double diameter = 0.0;       // max vertex-vertex distance
  bool touchesBoundary = false;  // has an edge on the clip boundary
};

// Clipped Voronoi diagram with per-cell statistics and nearest-neighbor
// (shared-edge) adjacency.
struct VoronoiDiagram {
  const PointCloud* cloud = nullptr;
  ConvexPolygon clip;
  std::vector<VoronoiCell> cells;
  std::vector<std::vector<std::uint32_t>> adjacency;  // sorted, symmetric
  bool adjacencyValid = false;

  bool adjacent(std::size_t i, std::size_t j) const;
  // Diagnostic JSON export: polygons, statistics, adjacency.
  std::string toJson() const;
};

// Build the diagram of `cloud` clipped to `clip`. Cells are intersections of
// bisector half-planes with the clip polygon. When `withAdjacency` is set and
// the input has fewer than 3 non-collinear points the construction fails.
// Degenerate (cocircular) configurations produce zero-length shared edges;
// those are deterministically excluded from adjacency.
VoronoiDiagram voronoiDiagram(const PointCloud& cloud, const ConvexPolygon& clip,
                              bool withAdjacency = true);

inline VoronoiDiagram voronoiDiagram(const PointCloud& cloud, const Window& clip,
                                     bool withAdjacency = true) {
  return voronoiDiagram(cloud, ConvexPolygon::fromWindow(clip), withAdjacency);
}

// Membership mask of the regular sub-cluster: in-radius > alpha, diameter
// < 1/alpha, ball count (including the center) <= lambda^2 / alpha. Cells
// touching the clip boundary are conservatively irregular. Pass `scale` to
// apply the same classification to a cloud scaled by `scale` (thresholds
// alpha*scale, scale/alpha, radius lambda*scale; the count bound is
// scale-free).
struct RegularMask {
  double alpha = 0.0;
  double lambda = 0.0;
  std::vector<bool> regular;

  bool operator[](std::size_t i) const { return regular[i]; }
};

RegularMask regularSubcluster(const PointCloud& cloud,
                              const VoronoiDiagram& diagram, double alpha,
                              double lambda, double scale = 1.0);

}  // namespace homog
