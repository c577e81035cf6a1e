#include "homog/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace homog {

namespace {

// Half-plane clip that remembers which input produced each retained edge.
// Edge owners: >= 0 is the index of the bisector's opposite point, -1 is a
// clip-region edge.
struct OwnedPolygon {
  std::vector<Vec2> v;
  std::vector<std::int64_t> owner;  // owner[i] is the edge v[i] -> v[i+1]

  static OwnedPolygon fromPolygon(const ConvexPolygon& p) {
    OwnedPolygon o;
    o.v = p.v;
    o.owner.assign(p.v.size(), -1);
    return o;
  }

  // Keep {p : n.p <= d}, tagging the new edge with `who`.
  void clip(const Vec2& n, double d, std::int64_t who) {
    const std::size_t m = v.size();
    if (m < 3) return;
    std::vector<Vec2> nv;
    std::vector<std::int64_t> no;
    nv.reserve(m + 2);
    no.reserve(m + 2);
    std::vector<double> f(m);
    for (std::size_t i = 0; i < m; ++i) f[i] = n.dot(v[i]) - d;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = (i + 1) % m;
      if (f[i] <= 0.0) {
        nv.push_back(v[i]);
        no.push_back(owner[i]);
        if (f[j] > 0.0) {
          const double t = f[i] / (f[i] - f[j]);
          nv.push_back(v[i] + (v[j] - v[i]) * t);
          no.push_back(who);  // the cut edge runs along the bisector
        }
      } else if (f[j] <= 0.0) {
        const double t = f[i] / (f[i] - f[j]);
        nv.push_back(v[i] + (v[j] - v[i]) * t);
        no.push_back(owner[i]);
      }
    }
    // Fix owners: after an entry cut, the inserted vertex starts the bisector
    // edge only until the next original vertex; the scheme above already
    // assigns the bisector to the edge leaving the first inserted vertex and
    // keeps original owners elsewhere, which is what we want.
    if (nv.size() < 3) {
      nv.clear();
      no.clear();
    }
    v = std::move(nv);
    owner = std::move(no);
  }

  ConvexPolygon polygon() const { return ConvexPolygon(v); }
};

}  // namespace

bool VoronoiDiagram::adjacent(std::size_t i, std::size_t j) const {
  const auto& a = adjacency[i];
  return std::binary_search(a.begin(), a.end(), static_cast<std::uint32_t>(j));
}

std::string VoronoiDiagram::toJson() const {
  std::ostringstream os;
  os << "{\"cells\":[";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const VoronoiCell& c = cells[i];
    if (i) os << ',';
    os << "{\"id\":" << cloud->ids[i] << ",\"area\":" << formatDouble(c.area)
       << ",\"in_radius\":" << formatDouble(c.inRadius)
       << ",\"diameter\":" << formatDouble(c.diameter)
       << ",\"boundary\":" << (c.touchesBoundary ? "true" : "false")
       << ",\"polygon\":[";
    for (std::size_t k = 0; k < c.polygon.v.size(); ++k) {
      if (k) os << ',';
      os << '[' << formatDouble(c.polygon.v[k].x) << ','
         << formatDouble(c.polygon.v[k].y) << ']';
    }
    os << "],\"neighbors\":[";
    for (std::size_t k = 0; k < adjacency[i].size(); ++k) {
      if (k) os << ',';
      os << cloud->ids[adjacency[i][k]];
    }
    os << "]}";
  }
  os << "]}";
  return os.str();
}

VoronoiDiagram voronoiDiagram(const PointCloud& cloud, const ConvexPolygon& clip,
                              bool withAdjacency) {
  if (cloud.size() == 0)
    throw std::invalid_argument("voronoiDiagram: empty cloud");
  if (withAdjacency && cloud.size() >= 2) {
    // Adjacency needs at least 3 non-collinear points to be meaningful for
    // n >= 3; for n == 2 the two cells share the bisector edge, which is fine.
    if (cloud.size() >= 3) {
      bool noncollinear = false;
      const Vec2 a = cloud.pts[0], b = cloud.pts[1];
      for (std::size_t i = 2; i < cloud.size() && !noncollinear; ++i)
        if (std::abs((b - a).cross(cloud.pts[i] - a)) > 1e-12) noncollinear = true;
      if (!noncollinear)
        throw std::invalid_argument(
            "voronoiDiagram: adjacency requested for collinear input; supply "
            "at least 3 non-collinear points or disable adjacency");
    }
  }

  VoronoiDiagram d;
  d.cloud = &cloud;
  d.clip = clip;
  d.cells.resize(cloud.size());
  d.adjacency.assign(cloud.size(), {});

  // Candidate ordering by distance via the cell list; the search radius for
  // point x can stop once half the next candidate distance exceeds the
  // farthest cell vertex.
  double x0, y0, x1, y1;
  clip.boundingBox(x0, y0, x1, y1);
  const double clipDiam = std::hypot(x1 - x0, y1 - y0);
  const double startR =
      std::max(1e-9, 2.0 * std::sqrt(clip.area() / static_cast<double>(cloud.size())));
  NeighborIndex index(cloud, std::max(startR, clipDiam / 64.0), false);

  std::vector<std::vector<std::pair<double, std::uint32_t>>> edgeOwners(cloud.size());

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec2& p = cloud.pts[i];
    OwnedPolygon cell = OwnedPolygon::fromPolygon(clip);
    double r = index.radius();
    std::size_t cursor = 0;
    std::vector<std::pair<double, std::uint32_t>> cands;
    auto refill = [&]() {
      cands.clear();
      index.forEachInBall(p, r, [&](std::uint32_t j) {
        if (j != i) cands.push_back({dist2(p, cloud.pts[j]), j});
      });
      std::sort(cands.begin(), cands.end());
      cursor = 0;
    };
    refill();
    for (;;) {
      if (cell.v.size() < 3) break;
      double far = 0.0;
      for (const Vec2& q : cell.v) far = std::max(far, dist(p, q));
      if (cursor < cands.size()) {
        const double dj = std::sqrt(cands[cursor].first);
        if (dj / 2.0 > far) break;  // no remaining candidate can cut
        const std::uint32_t j = cands[cursor].second;
        ++cursor;
        const Vec2 q = cloud.pts[j];
        const Vec2 n = q - p;
        const double dval = (n.dot(p) + n.dot(q)) / 2.0;
        cell.clip(n, dval, static_cast<std::int64_t>(j));
      } else {
        if (r / 2.0 > far || r > 2.0 * clipDiam) break;
        r *= 2.0;
        refill();
      }
    }

    VoronoiCell& c = d.cells[i];
    c.polygon = cell.polygon();
    c.area = c.polygon.area();
    c.diameter = c.polygon.diameter();
    c.inRadius = c.polygon.inRadius();
    for (std::size_t e = 0; e < cell.owner.size(); ++e) {
      const Vec2& a = cell.v[e];
      const Vec2& b = cell.v[(e + 1) % cell.v.size()];
      const double len = dist(a, b);
      if (cell.owner[e] < 0) {
        if (len > 0.0) c.touchesBoundary = true;
      } else if (len > 1e-12 * std::max(1.0, c.diameter)) {
        edgeOwners[i].push_back({len, static_cast<std::uint32_t>(cell.owner[e])});
      }
    }
  }

  // Symmetrize adjacency (union): floating point can retain a sliver edge on
  // one side only.
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (const auto& [len, j] : edgeOwners[i]) {
      d.adjacency[i].push_back(j);
      d.adjacency[j].push_back(static_cast<std::uint32_t>(i));
    }
  }
  for (auto& list : d.adjacency) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  d.adjacencyValid = withAdjacency;
  return d;
}

RegularMask regularSubcluster(const PointCloud& cloud,
                              const VoronoiDiagram& diagram, double alpha,
                              double lambda, double scale) {
  if (!(alpha > 0.0) || !(lambda > 0.0))
    throw std::invalid_argument("regularSubcluster: alpha and lambda must be > 0");
  if (diagram.cloud != &cloud)
    throw std::invalid_argument("regularSubcluster: diagram built on a different cloud");
  RegularMask mask;
  mask.alpha = alpha;
  mask.lambda = lambda;
  mask.regular.assign(cloud.size(), false);
  // Cell size well below the query radius so countInBall can count most
  // buckets wholesale.
  NeighborIndex index(cloud, lambda * scale / 8.0, false);
  const double countBound = lambda * lambda / alpha;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const VoronoiCell& c = diagram.cells[i];
    if (c.touchesBoundary) continue;
    if (!(c.inRadius > alpha * scale)) continue;
    if (!(c.diameter < scale / alpha)) continue;
    const std::size_t count = index.countInBall(cloud.pts[i], lambda * scale);
    if (static_cast<double>(count) > countBound) continue;
    mask.regular[i] = true;
  }
  return mask;
}

}  // namespace homog
