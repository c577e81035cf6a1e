#include "homog/coarse.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace homog {

double SimpleFunction::at(const Vec2& p) const {
  const double side = t * static_cast<double>(kt);
  const double rx = p.x - origin.x;
  const double ry = p.y - origin.y;
  if (rx < 0.0 || ry < 0.0 || rx > side || ry > side)
    throw std::out_of_range("SimpleFunction: point outside the tiling");
  const std::size_t j = std::min<std::size_t>(
      kt - 1, static_cast<std::size_t>(std::floor(rx / t)));
  const std::size_t i = std::min<std::size_t>(
      kt - 1, static_cast<std::size_t>(std::floor(ry / t)));
  if (!definedAt(i, j))
    throw std::domain_error("SimpleFunction: undefined square");
  return coeff[i * kt + j];
}

GridAverages gridAverage(const ScalarField& u, const RegularGrid& grid) {
  if (!u.domain) throw std::invalid_argument("gridAverage: detached field");
  const PointCloud& cloud = *u.domain;
  GridAverages out;
  out.f.t = grid.t;
  out.f.kt = grid.kt;
  out.f.origin = {grid.domain.xmin(), grid.domain.ymin()};
  out.f.coeff.assign(grid.kt * grid.kt, 0.0);
  out.f.defined.assign(grid.kt * grid.kt, 0);
  out.counts.assign(grid.kt * grid.kt, 0);

  // Unique grid points (a point can sit on a horizontal and a vertical path).
  std::set<std::uint32_t> pts;
  for (const auto& fam : {grid.horizontal, grid.vertical})
    for (const auto& rect : fam)
      for (const PointPath& p : rect) pts.insert(p.idx.begin(), p.idx.end());

  std::vector<double> sum(grid.kt * grid.kt, 0.0);
  for (std::uint32_t x : pts) {
    const Vec2 rel = cloud.pts[x] - out.f.origin;
    const long j = static_cast<long>(std::floor(rel.x / grid.t));
    const long i = static_cast<long>(std::floor(rel.y / grid.t));
    if (i < 0 || j < 0 || i >= static_cast<long>(grid.kt) ||
        j >= static_cast<long>(grid.kt))
      continue;
    const std::size_t k = static_cast<std::size_t>(i) * grid.kt + j;
    sum[k] += u.values[x];
    ++out.counts[k];
  }
  for (std::size_t k = 0; k < sum.size(); ++k) {
    if (out.counts[k] > 0) {
      out.f.coeff[k] = sum[k] / static_cast<double>(out.counts[k]);
      out.f.defined[k] = 1;
    } else {
      ++out.emptySquares;
    }
  }
  return out;
}

PcExtension::PcExtension(const ScalarField& u, const VoronoiDiagram& diagram)
    : u_(&u),
      diagram_(&diagram),
      index_(*diagram.cloud,
             std::max(1e-9, std::sqrt(diagram.clip.area() /
                                      static_cast<double>(diagram.cloud->size()))),
             false) {
  if (u.domain != diagram.cloud)
    throw std::invalid_argument("PcExtension: field and diagram disagree on the cloud");
}

double PcExtension::operator()(const Vec2& x) const {
  if (!diagram_->clip.contains(x))
    throw std::out_of_range("PcExtension: query outside the clip region");
  return u_->values[index_.nearest(x)];
}

namespace {

// Degree-4 Gauss rule on the triangle (6 points).
struct TriRule {
  double l1, l2, l3, w;
};
constexpr TriRule kTriRule[6] = {
    {0.108103018168070, 0.445948490915965, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.108103018168070, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.445948490915965, 0.108103018168070, 0.223381589678011},
    {0.816847572980459, 0.091576213509771, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.816847572980459, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.091576213509771, 0.816847572980459, 0.109951743655322},
};

// Integral of f over a convex polygon: centroid fan, Gauss per triangle.
double integratePolygon(const ConvexPolygon& poly,
                        const std::function<double(Vec2)>& f) {
  if (poly.empty()) return 0.0;
  const Vec2 c = poly.centroid();
  double total = 0.0;
  for (std::size_t i = 0; i < poly.v.size(); ++i) {
    const Vec2& a = poly.v[i];
    const Vec2& b = poly.v[(i + 1) % poly.v.size()];
    const double area2 = (a - c).cross(b - c);  // twice the triangle area
    if (area2 <= 0.0) continue;
    double s = 0.0;
    for (const TriRule& r : kTriRule)
      s += r.w * f(c * r.l1 + a * r.l2 + b * r.l3);
    total += s * area2 / 2.0;
  }
  return total;
}

ConvexPolygon clipToRegion(const ConvexPolygon& poly, const Region& region) {
  if (region.isRect()) return poly.clipToWindow(region.rect());
  ConvexPolygon out = poly;
  const auto& rv = region.poly().v;
  for (std::size_t i = 0; i < rv.size() && !out.empty(); ++i) {
    const Vec2& a = rv[i];
    const Vec2& b = rv[(i + 1) % rv.size()];
    const Vec2 n{b.y - a.y, a.x - b.x};  // outward normal of a CCW edge
    out = out.clipHalfPlane(n, n.dot(a));
  }
  return out;
}

}  // namespace

L2Result gridL2Distance(const ScalarField& u, const RegularGrid& grid,
                        const VoronoiDiagram& diagram,
                        const std::function<double(Vec2)>& w,
                        const Region& region) {
  if (u.domain != diagram.cloud)
    throw std::invalid_argument("gridL2Distance: field and diagram disagree");
  std::set<std::uint32_t> pts;
  for (const auto& fam : {grid.horizontal, grid.vertical})
    for (const auto& rect : fam)
      for (const PointPath& p : rect) pts.insert(p.idx.begin(), p.idx.end());

  L2Result res;
  for (std::uint32_t x : pts) {
    const ConvexPolygon cell = clipToRegion(diagram.cells[x].polygon, region);
    if (cell.empty()) continue;
    const double uv = u.values[x];
    res.value += integratePolygon(cell, [&](Vec2 q) {
      const double d = uv - w(q);
      return d * d;
    });
    res.area += cell.area();
  }
  return res;
}

GapResult gridIndependenceGap(const ScalarField& u, const RegularGrid& gridA,
                              const RegularGrid& gridB) {
  if (gridA.kt != gridB.kt || gridA.t != gridB.t)
    throw std::invalid_argument("gridIndependenceGap: meshes differ");
  const GridAverages a = gridAverage(u, gridA);
  const GridAverages b = gridAverage(u, gridB);
  GapResult out;
  for (std::size_t k = 0; k < a.f.coeff.size(); ++k) {
    if (!a.f.defined[k] || !b.f.defined[k]) {
      ++out.skipped;
      continue;
    }
    const double d = a.f.coeff[k] - b.f.coeff[k];
    out.gap += gridA.t * gridA.t * d * d;
  }
  return out;
}

ConvergenceReport convergenceReport(const std::vector<ConvergenceEntry>& seq,
                                    const std::function<double(Vec2)>& ref) {
  ConvergenceReport rep;
  for (const ConvergenceEntry& e : seq) {
    if (!e.field || !e.grid || !e.diagram)
      throw std::invalid_argument("convergenceReport: incomplete entry");
    ConvergenceRow row;
    row.eps = e.eps;
    row.t = e.grid->t;
    const L2Result l2 =
        gridL2Distance(*e.field, *e.grid, *e.diagram, ref, Region(e.grid->domain));
    row.distGrid = l2.value;
    row.areaGrid = l2.area;
    const GridAverages avg = gridAverage(*e.field, *e.grid);
    row.emptySquares = avg.emptySquares;
    double d2 = 0.0;
    for (std::size_t i = 0; i < avg.f.kt; ++i)
      for (std::size_t j = 0; j < avg.f.kt; ++j) {
        if (!avg.f.definedAt(i, j)) continue;
        const double d = avg.f.coeff[i * avg.f.kt + j] -
                         ref(avg.f.square(i, j).center);
        d2 += avg.f.t * avg.f.t * d * d;
      }
    row.distSimple = d2;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace homog
