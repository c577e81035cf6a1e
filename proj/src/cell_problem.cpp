#include "homog/cell_problem.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "homog/parallel.hpp"
#include "homog/sampling.hpp"

namespace homog {

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;

  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  std::uint32_t find(std::uint32_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

ClampPartition clampPartition(const PointCloud& cloud, const Region& A,
                              double lambda, Vec2 xi) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("clampPartition: lambda must be > 0");
  if (!cloud.window.containsWindow(A.boundingWindow().enlarged(lambda)))
    throw std::invalid_argument(
        "clampPartition: cloud not padded to the lambda-enlargement of A");
  ClampPartition part;
  part.A = A;
  part.lambda = lambda;
  part.xi = xi;
  part.varOf.assign(cloud.size(), -1);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec2& p = cloud.pts[i];
    const bool inA = A.contains(p);
    const double bd = A.boundaryDistance(p);
    if (inA && bd > 2.0 * lambda) {
      part.varOf[i] = static_cast<std::int64_t>(part.freeIdx.size());
      part.freeIdx.push_back(static_cast<std::uint32_t>(i));
    } else if (inA || bd <= lambda) {
      part.clampedIdx.push_back(static_cast<std::uint32_t>(i));
      part.clampValues.push_back(xi.dot(p));
    }
  }
  return part;
}

QuadraticSystem assembleQuadratic(const PointCloud& cloud,
                                  const NeighborIndex& index,
                                  const ClampPartition& part) {
  if (index.radius() < part.lambda)
    throw std::invalid_argument(
        "assembleQuadratic: neighbor index radius below the interaction range");
  const double r2 = part.lambda * part.lambda;

  QuadraticSystem sys;
  sys.n = part.freeIdx.size();
  sys.region = part.A;
  sys.lambda = part.lambda;
  sys.xi = part.xi;
  sys.b.assign(sys.n, 0.0);
  sys.grounded.assign(sys.n, 0);
  sys.floatingFix.assign(sys.n, 0.0);

  // Off-diagonal accumulation as (row, col, weight) triples; diagonals kept
  // separately. One ordered pair (x in A, y) contributes one unit.
  std::vector<double> diag(sys.n, 0.0);
  struct Triple {
    std::uint32_t r, c;
    double w;
  };
  std::vector<Triple> off;
  UnionFind uf(sys.n);

  auto clampValueOf = [&](std::size_t i) { return part.xi.dot(cloud.pts[i]); };

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!part.A.contains(cloud.pts[i])) continue;
    const std::int64_t vi = part.varOf[i];
    for (std::uint32_t j : index.neighbors(i)) {
      if (dist2(cloud.pts[i], cloud.pts[j]) >= r2) continue;
      const std::int64_t vj = part.varOf[j];
      if (vi >= 0 && vj >= 0) {
        diag[vi] += 1.0;
        diag[vj] += 1.0;
        off.push_back({static_cast<std::uint32_t>(vi),
                       static_cast<std::uint32_t>(vj), -1.0});
        off.push_back({static_cast<std::uint32_t>(vj),
                       static_cast<std::uint32_t>(vi), -1.0});
        uf.unite(static_cast<std::uint32_t>(vi), static_cast<std::uint32_t>(vj));
      } else if (vi >= 0) {
        const double g = clampValueOf(j);
        diag[vi] += 1.0;
        sys.b[vi] += g;
        sys.c += g * g;
        sys.grounded[vi] = 1;
      } else if (vj >= 0) {
        const double g = clampValueOf(i);
        diag[vj] += 1.0;
        sys.b[vj] += g;
        sys.c += g * g;
        sys.grounded[vj] = 1;
      } else {
        const double d = clampValueOf(i) - clampValueOf(j);
        sys.c += d * d;
      }
    }
  }

  // CSR with the diagonal first in each row and off-diagonals merged.
  std::sort(off.begin(), off.end(), [](const Triple& a, const Triple& b) {
    return a.r != b.r ? a.r < b.r : a.c < b.c;
  });
  sys.rowPtr.assign(sys.n + 1, 0);
  {
    std::size_t k = 0;
    for (std::uint32_t r = 0; r < sys.n; ++r) {
      sys.rowPtr[r] = sys.col.size();
      sys.col.push_back(r);
      sys.val.push_back(diag[r]);
      while (k < off.size() && off[k].r == r) {
        // Duplicates are adjacent after the sort; the diagonal entry can
        // never collide since off-diagonal columns differ from r.
        if (sys.col.back() == off[k].c) {
          sys.val.back() += off[k].w;
        } else {
          sys.col.push_back(off[k].c);
          sys.val.push_back(off[k].w);
        }
        ++k;
      }
    }
    sys.rowPtr[sys.n] = sys.col.size();
  }

  // Spread grounding over free components; pin the others to the component
  // mean of the affine values.
  if (sys.n > 0) {
    std::vector<std::uint8_t> rootGrounded(sys.n, 0);
    std::vector<double> rootSum(sys.n, 0.0);
    std::vector<std::size_t> rootCount(sys.n, 0);
    for (std::uint32_t v = 0; v < sys.n; ++v) {
      const std::uint32_t r = uf.find(v);
      if (sys.grounded[v]) rootGrounded[r] = 1;
      rootSum[r] += part.xi.dot(cloud.pts[part.freeIdx[v]]);
      ++rootCount[r];
    }
    for (std::uint32_t v = 0; v < sys.n; ++v) {
      const std::uint32_t r = uf.find(v);
      sys.grounded[v] = rootGrounded[r];
      if (!rootGrounded[r]) sys.floatingFix[v] = rootSum[r] / rootCount[r];
    }
    for (std::uint32_t r = 0; r < sys.n; ++r)
      if (rootCount[r] > 0 && !rootGrounded[r] && uf.find(r) == r)
        ++sys.floatingComponents;
  }
  return sys;
}

std::vector<double> QuadraticSystem::multiply(const std::vector<double>& w) const {
  std::vector<double> out(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t k = rowPtr[r]; k < rowPtr[r + 1]; ++k)
      s += val[k] * w[col[k]];
    out[r] = s;
  }
  return out;
}

double QuadraticSystem::quadraticValue(const std::vector<double>& w) const {
  const std::vector<double> Lw = multiply(w);
  double s = c;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * (Lw[i] - 2.0 * b[i]);
  return s;
}

CellProblemSolution solveCellProblem(const PointCloud& cloud,
                                     const NeighborIndex& index,
                                     const Region& A, double lambda, Vec2 xi,
                                     double tol, std::size_t maxIter) {
  if (!(tol > 0.0))
    throw std::invalid_argument("solveCellProblem: tol must be > 0");
  const auto t0 = std::chrono::steady_clock::now();

  const ClampPartition part = clampPartition(cloud, A, lambda, xi);
  const QuadraticSystem sys = assembleQuadratic(cloud, index, part);
  const std::size_t n = sys.n;
  if (maxIter == 0) maxIter = 20 * std::max<std::size_t>(n, 1);

  // Start from the affine field; floating components start (and stay) at
  // their pinned constant.
  std::vector<double> x(n);
  for (std::size_t v = 0; v < n; ++v)
    x[v] = sys.grounded[v] ? xi.dot(cloud.pts[part.freeIdx[v]])
                           : sys.floatingFix[v];

  double bNorm = 0.0;
  for (double v : sys.b) bNorm += v * v;
  bNorm = std::sqrt(bNorm);
  const double target = tol * (bNorm > 0.0 ? bNorm : 1.0);

  std::vector<double> precond(n, 1.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double d = sys.val[sys.rowPtr[r]];  // diagonal stored first
    if (d > 0.0) precond[r] = 1.0 / d;
  }

  std::vector<double> r(n), z(n), p(n), Lp;
  {
    const std::vector<double> Lx = sys.multiply(x);
    for (std::size_t i = 0; i < n; ++i) r[i] = sys.b[i] - Lx[i];
  }
  auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double a : v) s += a * a;
    return std::sqrt(s);
  };

  double resNorm = norm(r);
  std::size_t iters = 0;
  if (n > 0 && resNorm > target) {
    for (std::size_t i = 0; i < n; ++i) z[i] = precond[i] * r[i];
    p = z;
    double rz = 0.0;
    for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];
    while (iters < maxIter) {
      Lp = sys.multiply(p);
      double pLp = 0.0;
      for (std::size_t i = 0; i < n; ++i) pLp += p[i] * Lp[i];
      if (!(pLp > 0.0)) break;  // exhausted the range of L
      const double alpha = rz / pLp;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * Lp[i];
      }
      ++iters;
      resNorm = norm(r);
      if (resNorm <= target) break;
      double rzNew = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        z[i] = precond[i] * r[i];
        rzNew += r[i] * z[i];
      }
      const double beta = rzNew / rz;
      rz = rzNew;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
  }

  CellProblemSolution sol;
  sol.xi = xi;
  sol.region = A;
  sol.lambda = lambda;
  sol.residual = bNorm > 0.0 ? resNorm / bNorm : resNorm;
  sol.iterations = iters;
  sol.converged = resNorm <= target;
  sol.freeCount = part.freeIdx.size();
  sol.clampedCount = part.clampedIdx.size();
  sol.floatingComponents = sys.floatingComponents;

  sol.field = ScalarField::sample(cloud, [&](const Vec2& p_) { return xi.dot(p_); });
  for (std::size_t v = 0; v < n; ++v) sol.field.values[part.freeIdx[v]] = x[v];
  sol.m = dirichletEnergy(cloud, index, sol.field, A, lambda);

  sol.wallSeconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

CellProblemSolution solveCellProblem(const PointCloud& cloud, const Region& A,
                                     double lambda, Vec2 xi, double tol,
                                     std::size_t maxIter) {
  NeighborIndex index(cloud, lambda);
  return solveCellProblem(cloud, index, A, lambda, xi, tol, maxIter);
}

// ---------------------------------------------------------------------------

XiEstimate estimateXi(const XiPlan& plan) {
  if (plan.Ts.empty()) throw std::invalid_argument("estimateXi: empty T list");
  if (plan.dirs.empty())
    throw std::invalid_argument("estimateXi: no directions");
  if (plan.seeds == 0) throw std::invalid_argument("estimateXi: seeds must be >= 1");
  if (!(plan.lambda > 0.0))
    throw std::invalid_argument("estimateXi: lambda must be > 0");
  for (double T : plan.Ts)
    if (!(T > 4.0 * plan.lambda))
      throw std::invalid_argument("estimateXi: every T must exceed 4*lambda");
  for (const Vec2& d : plan.dirs)
    if (!(d.norm2() > 0.0))
      throw std::invalid_argument("estimateXi: zero direction");

  const std::size_t nTasks = plan.Ts.size() * plan.seeds;
  const std::size_t nDirs = plan.dirs.size();
  XiEstimate est;
  est.rows.assign(nTasks * nDirs, XiRow{});

  const RandomStream master(plan.seed);
  parallelFor(nTasks, [&](std::size_t task) {
    const std::size_t ti = task / plan.seeds;
    const std::size_t si = task % plan.seeds;
    const double T = plan.Ts[ti];
    const RandomStream stream = master.derive(ti).derive(si);
    for (std::size_t di = 0; di < nDirs; ++di) {
      XiRow& row = est.rows[task * nDirs + di];
      row.T = T;
      row.seed = si;
      row.xi = plan.dirs[di];
      try {
        PointCloud cloud;
        if (plan.lattice) {
          cloud = latticeCloud(Window::square({0, 0}, T + 2 * plan.lambda + 1),
                               1.0, 0.0, stream);
        } else {
          SamplingSpec spec;
          spec.window = Window::square({0, 0}, T);
          spec.intensity = plan.gamma;
          spec.padding = plan.lambda;
          spec.stream = stream;
          cloud = samplePoisson(spec);
        }
        const auto sol =
            solveCellProblem(cloud, Region(Window::square({0, 0}, T)),
                             plan.lambda, row.xi, plan.tol);
        row.m = sol.m;
        row.normalized = sol.m / (T * T * row.xi.norm2());
        row.residual = sol.residual;
        row.iterations = sol.iterations;
        row.ok = sol.converged;
        if (!sol.converged) row.error = "solver did not reach tolerance";
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
    }
  });

  std::sort(est.rows.begin(), est.rows.end(), [](const XiRow& a, const XiRow& b) {
    if (a.T != b.T) return a.T < b.T;
    if (a.seed != b.seed) return a.seed < b.seed;
    if (a.xi.x != b.xi.x) return a.xi.x < b.xi.x;
    return a.xi.y < b.xi.y;
  });

  // Per-T aggregates over successful rows.
  std::vector<double> Ts = plan.Ts;
  std::sort(Ts.begin(), Ts.end());
  Ts.erase(std::unique(Ts.begin(), Ts.end()), Ts.end());
  for (double T : Ts) {
    XiAggregate agg;
    agg.T = T;
    double sum = 0.0, sum2 = 0.0;
    std::vector<double> dirSum(nDirs, 0.0);
    std::vector<std::size_t> dirCount(nDirs, 0);
    for (const XiRow& row : est.rows) {
      if (row.T != T || !row.ok) continue;
      sum += row.normalized;
      sum2 += row.normalized * row.normalized;
      for (std::size_t di = 0; di < nDirs; ++di)
        if (row.xi == plan.dirs[di]) {
          dirSum[di] += row.normalized;
          ++dirCount[di];
        }
      ++agg.count;
    }
    if (agg.count > 0) {
      agg.mean = sum / agg.count;
      if (agg.count > 1)
        agg.stddev = std::sqrt(
            std::max(0.0, (sum2 - sum * sum / agg.count) / (agg.count - 1)));
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (std::size_t di = 0; di < nDirs; ++di)
        if (dirCount[di] > 0) {
          const double mu = dirSum[di] / dirCount[di];
          lo = std::min(lo, mu);
          hi = std::max(hi, mu);
        }
      if (agg.mean > 0.0 && hi >= lo) agg.directionSpread = (hi - lo) / agg.mean;
    }
    est.perT.push_back(agg);
  }

  // Affine fit of mean against 1/T over the largest three sizes; the
  // intercept is the extrapolated constant.
  std::vector<const XiAggregate*> fitPts;
  for (auto it = est.perT.rbegin(); it != est.perT.rend() && fitPts.size() < 3; ++it)
    if (it->count > 0) fitPts.push_back(&*it);
  if (fitPts.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double nf = static_cast<double>(fitPts.size());
    for (const XiAggregate* a : fitPts) {
      const double u = 1.0 / a->T;
      sx += u;
      sy += a->mean;
      sxx += u * u;
      sxy += u * a->mean;
    }
    const double det = nf * sxx - sx * sx;
    const double slope = (nf * sxy - sx * sy) / det;
    est.xi = (sy - slope * sx) / nf;
    double worst = 0.0;
    for (const XiAggregate* a : fitPts) {
      const double fit = est.xi + slope / a->T;
      worst = std::max(worst, std::abs(a->mean - fit));
      if (a->count > 1)
        worst = std::max(worst, a->stddev / std::sqrt(static_cast<double>(a->count)));
    }
    est.xiUncertainty = worst;
  } else if (fitPts.size() == 1) {
    est.xi = fitPts[0]->mean;
    est.xiUncertainty = fitPts[0]->stddev;
  }
  return est;
}

// ---------------------------------------------------------------------------

StitchResult stitchRecoveryField(const PointCloud& cloud, double eps,
                                 const ConvexPolygon& S, Vec2 xi,
                                 std::size_t m, double delta, double lambda,
                                 double tol) {
  if (m == 0) throw std::invalid_argument("stitchRecoveryField: m must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("stitchRecoveryField: delta must be in (0,1)");
  if (!(eps > 0.0) || !(lambda > 0.0))
    throw std::invalid_argument("stitchRecoveryField: eps and lambda must be > 0");
  const double range = lambda * eps;
  double x0, y0, x1, y1;
  S.boundingBox(x0, y0, x1, y1);
  {
    const Window bbox({(x0 + x1) / 2, (y0 + y1) / 2}, x1 - x0, y1 - y0);
    if (!cloud.window.containsWindow(bbox.enlarged(range)))
      throw std::invalid_argument(
          "stitchRecoveryField: cloud not padded to the interaction range "
          "around S");
  }
  NeighborIndex index(cloud, range);

  StitchResult out;
  out.field = ScalarField::sample(cloud, [&](const Vec2& p) { return xi.dot(p); });

  const double h = 1.0 / static_cast<double>(m);
  const long i0 = static_cast<long>(std::floor(x0 / h)) - 1;
  const long i1 = static_cast<long>(std::ceil(x1 / h)) + 1;
  const long j0 = static_cast<long>(std::floor(y0 / h)) - 1;
  const long j1 = static_cast<long>(std::ceil(y1 / h)) + 1;
  for (long i = i0; i <= i1; ++i) {
    for (long j = j0; j <= j1; ++j) {
      const Vec2 c((i + 0.5) * h, (j + 0.5) * h);
      const Vec2 corners[4] = {{c.x - h / 2, c.y - h / 2},
                               {c.x + h / 2, c.y - h / 2},
                               {c.x + h / 2, c.y + h / 2},
                               {c.x - h / 2, c.y + h / 2}};
      bool interior = true;
      bool meetsS = false;
      for (const Vec2& q : corners) {
        const bool in = S.contains(q) && S.boundaryDistance(q) > 1e-12;
        interior = interior && in;
        meetsS = meetsS || S.contains(q);
      }
      if (!interior) {
        if (meetsS) ++out.boundarySquares;  // keeps the affine values
        continue;
      }
      ++out.interiorSquares;
      const Window inner(c, (1.0 - delta) * h, (1.0 - delta) * h);
      try {
        const auto sol =
            solveCellProblem(cloud, index, Region(inner), range, xi, tol);
        const ClampPartition part = clampPartition(cloud, Region(inner), range, xi);
        for (std::uint32_t idx : part.freeIdx)
          out.field.values[idx] = sol.field.values[idx];
        out.interiorEnergy += sol.m;
      } catch (const std::exception& e) {
        throw std::runtime_error("stitchRecoveryField: square (" +
                                 std::to_string(i) + "," + std::to_string(j) +
                                 "): " + e.what());
      }
    }
  }
  return out;
}

}  // namespace homog
