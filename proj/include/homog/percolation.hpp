#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "homog/cloud.hpp"
#include "homog/random.hpp"
#include "homog/voronoi.hpp"

namespace homog {

// Good/bad classification of square blocks of side Lambda*lambda tiling a
// region. A block is good iff
//   I.   every lambda-subsquare holds between 1 and lambda^2/(8 alpha) points,
//   II.  distinct points in the block are >= 2 alpha apart,
//   III. every point keeps distance >= 2 alpha from the block boundary.
struct BlockField {
  double alpha = 0.0;
  double lambda = 0.0;
  unsigned Lambda = 12;
  Vec2 origin;  // lower-left corner of block (0,0)
  int cols = 0;
  int rows = 0;
  std::vector<std::uint8_t> good;  // row-major, rows*cols

  bool isGood(int col, int row) const {
    return good[static_cast<std::size_t>(row) * cols + col] != 0;
  }
  double blockSide() const { return Lambda * lambda; }
  Vec2 blockCenter(int col, int row) const {
    const double B = blockSide();
    return origin + Vec2((col + 0.5) * B, (row + 0.5) * B);
  }
  Window blockWindow(int col, int row) const {
    return Window(blockCenter(col, row), blockSide(), blockSide());
  }
  std::size_t goodCount() const;
};

// Classify the blocks tiling `region` from the lower-left corner; partial
// blocks sticking out of the region are dropped.
BlockField blockField(const PointCloud& cloud, double alpha, double lambda,
                      unsigned Lambda, const Window& region);

// Independent Bernoulli(p) field, for percolation experiments decoupled from
// any cloud.
BlockField bernoulliField(int cols, int rows, double p,
                          const RandomStream& stream);

// Simple path of edge-adjacent good blocks, as (col, row) pairs.
struct BlockPath {
  std::vector<std::pair<int, int>> blocks;
};

enum class CrossDir { Horizontal, Vertical };

// Sub-rectangle of a block field, in block indices (half-open upper bounds).
struct BlockRect {
  int col0 = 0, row0 = 0, cols = 0, rows = 0;
};

// Up to `want` vertex-disjoint good crossings of `rect`, left-to-right or
// bottom-to-top. Greedy shortest-first BFS with removal; deterministic. An
// empty result is not an error.
std::vector<BlockPath> findCrossings(const BlockField& field,
                                     const BlockRect& rect, CrossDir dir,
                                     std::size_t want);

// Path of cloud points; consecutive points are Voronoi neighbors.
struct PointPath {
  std::vector<std::uint32_t> idx;  // indices into the cloud
};

// Convert a good-block path into the chain of Voronoi cells crossed by the
// polyline joining consecutive block centers, ordered along the polyline and
// patched to share edges. Fails when a traversed cell is not in the regular
// mask: that means block classification and cell regularity disagree, which
// is surfaced rather than repaired.
PointPath blocksToPointPath(const BlockPath& path, const BlockField& field,
                            const PointCloud& cloud,
                            const VoronoiDiagram& diagram,
                            const RegularMask& mask);

// Junction of two vertical paths through a horizontal one (the two overlap
// rectangles host the hand-over). Points of v1 lying below h in R are kept,
// the route switches to h, then to the points of v2 lying above h in Rtilde;
// the output starts at v1's first point and ends at v2's last point.
// Lies-below/above is decided by h-avoiding reachability to the top/bottom
// side in the adjacency graph restricted to the rectangle; when h does not
// separate a rectangle the junction fails with that rectangle in the message.
PointPath joinPaths(const PointPath& v1, const PointPath& h,
                    const PointPath& v2, const Window& R, const Window& Rtilde,
                    const PointCloud& cloud, const VoronoiDiagram& diagram);

// Does x reach the given side of `rect` through the adjacency graph without
// stepping on `blocked`? Exposed for the junction predicates and their tests.
enum class Side { Left, Right, Bottom, Top };
bool reachesSideAvoiding(std::uint32_t x, Side side, const Window& rect,
                         const std::vector<std::uint32_t>& blocked,
                         const PointCloud& cloud,
                         const VoronoiDiagram& diagram);

// ---------------------------------------------------------------------------

// Families of crossing paths per row/column strip of a t-mesh over a square
// working domain.
struct RegularGrid {
  double eps = 0.0;
  double t = 0.0;
  double lambda = 0.0;
  double alpha = 0.0;
  double upsilon = 0.0;  // target bound used when assembling
  Window domain;         // square of side kt * t
  std::size_t kt = 0;
  std::size_t M = 0;  // paths per rectangle, uniform
  // horizontal[i][m] crosses the i-th row strip left-to-right (i from the
  // bottom); vertical[j][m] crosses the j-th column strip bottom-to-top.
  std::vector<std::vector<PointPath>> horizontal;
  std::vector<std::vector<PointPath>> vertical;

  Window rowStrip(std::size_t i) const;
  Window colStrip(std::size_t j) const;
  Window square(std::size_t i, std::size_t j) const;  // row i, column j
};

struct GridAssembly {
  bool ok = false;
  RegularGrid grid;
  std::string failure;                // empty when ok
  std::vector<std::string> details;   // per-rectangle diagnostics
  std::size_t rawHorizontal = 0;      // crossings found before pruning
  std::size_t rawVertical = 0;
};

// Extract a regular t-grid from an eps-scaled cloud: regular points, crossing
// extraction per strip in the adjacency graph capped at step lambda*eps,
// then pruning to 3*lambda*eps separation (greedy from the bottom/left, or
// from the top/right when `fromTop` is set), per-square length bounds from
// `upsilonTarget`, and a uniform path count. M == 0 anywhere yields a
// structured failure, not an exception.
GridAssembly assembleGrid(const PointCloud& cloud, double eps, double t,
                          double alpha, double lambda, double upsilonTarget,
                          bool fromTop = false);

struct PropertyReport {
  char property = '?';
  bool pass = false;
  std::string witness;  // empty on pass
};

struct GridValidation {
  std::vector<PropertyReport> properties;  // a..g
  bool allPass() const;
};

// Re-check Definition-style properties (a)-(g) of an assembled grid against
// the cloud: (a) regular membership, (b)/(c) crossing and containment,
// (d) per-square lengths and M within the Upsilon bounds, (e) 3*lambda*eps
// separation, (f) ball counts near paths, (g) step bounds.
GridValidation validateGrid(const RegularGrid& grid, const PointCloud& cloud,
                            const NeighborIndex& index,
                            const RegularMask& mask);

}  // namespace homog
