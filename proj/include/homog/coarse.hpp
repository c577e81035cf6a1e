#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "homog/cloud.hpp"
#include "homog/neighbor.hpp"
#include "homog/percolation.hpp"
#include "homog/voronoi.hpp"

namespace homog {

// Piecewise-constant function on the t-mesh of a square domain: value
// coeff[i*kt+j] on the square in row i (from the bottom), column j. Squares
// with no data are flagged undefined, never zero-filled.
struct SimpleFunction {
  double t = 0.0;
  std::size_t kt = 0;
  Vec2 origin;  // lower-left corner of the tiling
  std::vector<double> coeff;
  std::vector<std::uint8_t> defined;

  bool definedAt(std::size_t i, std::size_t j) const {
    return defined[i * kt + j] != 0;
  }
  // Value at a point; throws outside the tiling or on an undefined square.
  double at(const Vec2& p) const;
  Window square(std::size_t i, std::size_t j) const {
    return Window({origin.x + (j + 0.5) * t, origin.y + (i + 0.5) * t}, t, t);
  }
};

struct GridAverages {
  SimpleFunction f;
  std::vector<std::size_t> counts;  // grid points per square, row-major
  std::size_t emptySquares = 0;
};

// Per-square averages of the field over the grid's path points: the operator
// into simple functions. Linear in the field; empty squares are flagged.
GridAverages gridAverage(const ScalarField& u, const RegularGrid& grid);

// Piecewise-constant extension of a field over its Voronoi diagram:
// evaluation returns the field value of the cell containing the query point
// (nearest site). Queries outside the diagram's clip region are rejected.
class PcExtension {
 public:
  PcExtension(const ScalarField& u, const VoronoiDiagram& diagram);
  double operator()(const Vec2& x) const;

 private:
  const ScalarField* u_;
  const VoronoiDiagram* diagram_;
  NeighborIndex index_;
};

struct L2Result {
  double value = 0.0;  // integral of the squared difference
  double area = 0.0;   // measure actually integrated
};

// Integral of |u-hat - w|^2 over the union of the Voronoi cells of the
// grid's path points, intersected with `region`. Cells are triangulated from
// their centroid and integrated with a degree-4 Gauss rule per triangle
// (exact for w polynomial of degree <= 2).
L2Result gridL2Distance(const ScalarField& u, const RegularGrid& grid,
                        const VoronoiDiagram& diagram,
                        const std::function<double(Vec2)>& w,
                        const Region& region);

struct GapResult {
  double gap = 0.0;           // t^2 * sum of squared average differences
  std::size_t skipped = 0;    // squares flagged in either grid
};

// Squared L2 distance between the simple functions of two grids on the same
// cloud and mesh size; flagged squares are skipped and counted.
GapResult gridIndependenceGap(const ScalarField& u, const RegularGrid& gridA,
                              const RegularGrid& gridB);

struct ConvergenceRow {
  double eps = 0.0;
  double t = 0.0;
  double distGrid = 0.0;      // grid-restricted distance to the reference
  double areaGrid = 0.0;      // measure covered by the grid cells
  double distSimple = 0.0;    // distance of the averages to the mesh reference
  std::size_t emptySquares = 0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;  // trends only, no verdict
  std::string quadrature = "centroid fan, Gauss degree 4 per triangle";
};

struct ConvergenceEntry {
  double eps = 0.0;
  const ScalarField* field = nullptr;
  const RegularGrid* grid = nullptr;
  const VoronoiDiagram* diagram = nullptr;
};

// Distances of a family of fields to a reference function, per (eps, t):
// the grid-restricted extension distance and the distance of the square
// averages to the reference sampled at square centers.
ConvergenceReport convergenceReport(const std::vector<ConvergenceEntry>& seq,
                                    const std::function<double(Vec2)>& ref);

}  // namespace homog
