#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "homog/cloud.hpp"
#include "homog/energy.hpp"
#include "homog/neighbor.hpp"

namespace homog {

// Free/clamped split of the cloud for the clamped minimization on A: a point
// is a free variable iff it lies in A at distance > 2*lambda from the
// boundary; every other point within distance lambda of A is clamped to the
// affine values xi . x. Points farther out never interact with A.
struct ClampPartition {
  Region A;
  double lambda = 0.0;
  Vec2 xi;
  std::vector<std::uint32_t> freeIdx;     // cloud indices, ascending
  std::vector<std::uint32_t> clampedIdx;  // cloud indices, ascending
  std::vector<double> clampValues;        // aligned with clampedIdx
  std::vector<std::int64_t> varOf;        // cloud index -> free variable, or -1
};

ClampPartition clampPartition(const PointCloud& cloud, const Region& A,
                              double lambda, Vec2 xi);

// Normal-equation form of the clamped energy over the free variables:
// energy(w) = w^T L w - 2 b.w + c, with L a symmetric PSD matrix in CSR
// layout. Free components with no clamped neighbor anywhere (possible for
// sparse clouds) are flagged; their minimizer is any constant and they are
// pinned to the mean of xi . x over the component.
struct QuadraticSystem {
  std::size_t n = 0;
  std::vector<std::size_t> rowPtr;
  std::vector<std::uint32_t> col;
  std::vector<double> val;
  std::vector<double> b;
  double c = 0.0;

  Region region;
  double lambda = 0.0;
  Vec2 xi;

  std::vector<std::uint8_t> grounded;  // per variable: component touches a clamp
  std::vector<double> floatingFix;     // pinned value for ungrounded variables
  std::size_t floatingComponents = 0;

  std::vector<double> multiply(const std::vector<double>& w) const;
  double quadraticValue(const std::vector<double>& w) const;
};

QuadraticSystem assembleQuadratic(const PointCloud& cloud,
                                  const NeighborIndex& index,
                                  const ClampPartition& partition);

struct CellProblemSolution {
  Vec2 xi;
  Region region;
  double lambda = 0.0;
  ScalarField field;  // full cloud; points outside the problem hold xi . x
  double m = 0.0;     // direct energy of `field` on the region
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
  std::size_t freeCount = 0;
  std::size_t clampedCount = 0;
  std::size_t floatingComponents = 0;
  double wallSeconds = 0.0;
};

// Minimize the clamped energy by Jacobi-preconditioned conjugate gradient
// started from the affine field. maxIter == 0 means 20 * (free count). A
// non-converged solve returns the best iterate with `converged` unset rather
// than failing; m is always the direct energy of the returned field, hence a
// true upper bound for the infimum.
CellProblemSolution solveCellProblem(const PointCloud& cloud,
                                     const NeighborIndex& index,
                                     const Region& A, double lambda, Vec2 xi,
                                     double tol = 1e-10,
                                     std::size_t maxIter = 0);

// Convenience overload that builds the radius-lambda index itself.
CellProblemSolution solveCellProblem(const PointCloud& cloud, const Region& A,
                                     double lambda, Vec2 xi, double tol = 1e-10,
                                     std::size_t maxIter = 0);

// ---------------------------------------------------------------------------

struct XiPlan {
  std::vector<double> Ts;   // each > 4 * lambda
  std::size_t seeds = 1;    // realizations per T
  std::vector<Vec2> dirs;   // nonzero directions
  double lambda = 0.0;
  double gamma = 1.0;       // Poisson intensity (ignored in lattice mode)
  double tol = 1e-10;
  std::uint64_t seed = 0;   // master seed
  bool lattice = false;     // unit shifted lattice instead of Poisson
};

struct XiRow {
  double T = 0.0;
  std::uint64_t seed = 0;
  Vec2 xi;
  double m = 0.0;
  double normalized = 0.0;  // m / (T^2 |xi|^2)
  double residual = 0.0;
  std::size_t iterations = 0;
  bool ok = false;
  std::string error;  // set when the row failed; the row is kept
};

struct XiAggregate {
  double T = 0.0;
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double directionSpread = 0.0;  // max relative gap between direction means
};

struct XiEstimate {
  std::vector<XiRow> rows;  // sorted by (T, seed, direction)
  std::vector<XiAggregate> perT;
  double xi = 0.0;          // intercept of the 1/T fit over the largest 3 T
  double xiUncertainty = 0.0;
};

// Sweep m(xi; Q_T) over sizes, realizations and directions. Directions with
// the same (T, seed) share one realization, so cross-direction spread
// measures anisotropy and not sampling noise. Rows run in parallel with
// per-row derived substreams; failed rows carry their error message.
XiEstimate estimateXi(const XiPlan& plan);

// ---------------------------------------------------------------------------

struct StitchResult {
  ScalarField field;
  std::size_t interiorSquares = 0;
  std::size_t boundarySquares = 0;
  double interiorEnergy = 0.0;  // sum of sub-square minima
};

// Recovery field on a convex region S: partition space into squares of side
// 1/m on the (1/m)-lattice; squares not compactly inside S keep the affine
// values, interior squares carry the clamped minimizer of the shrunk square
// of side (1-delta)/m. The interaction range is lambda * eps.
StitchResult stitchRecoveryField(const PointCloud& cloud, double eps,
                                 const ConvexPolygon& S, Vec2 xi,
                                 std::size_t m, double delta, double lambda,
                                 double tol = 1e-10);

}  // namespace homog
