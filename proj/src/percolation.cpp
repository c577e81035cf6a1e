#include "homog/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "homog/neighbor.hpp"
#include "homog/parallel.hpp"

namespace homog {

std::size_t BlockField::goodCount() const {
  std::size_t n = 0;
  for (std::uint8_t g : good) n += g;
  return n;
}

BlockField blockField(const PointCloud& cloud, double alpha, double lambda,
                      unsigned Lambda, const Window& region) {
  if (!(alpha > 0.0) || !(lambda > 0.0))
    throw std::invalid_argument("blockField: alpha and lambda must be > 0");
  if (Lambda < 10)
    throw std::invalid_argument("blockField: Lambda must be an integer >= 10");
  BlockField field;
  field.alpha = alpha;
  field.lambda = lambda;
  field.Lambda = Lambda;
  field.origin = {region.xmin(), region.ymin()};
  const double B = field.blockSide();
  field.cols = static_cast<int>(std::floor(region.width / B + 1e-12));
  field.rows = static_cast<int>(std::floor(region.height / B + 1e-12));
  if (field.cols <= 0 || field.rows <= 0)
    throw std::invalid_argument("blockField: region smaller than one block");
  field.good.assign(static_cast<std::size_t>(field.cols) * field.rows, 0);

  // Half-open binning of points into blocks.
  std::vector<std::vector<std::uint32_t>> members(field.good.size());
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    const Vec2 rel = cloud.pts[k] - field.origin;
    const int c = static_cast<int>(std::floor(rel.x / B));
    const int r = static_cast<int>(std::floor(rel.y / B));
    if (c < 0 || c >= field.cols || r < 0 || r >= field.rows) continue;
    members[static_cast<std::size_t>(r) * field.cols + c].push_back(
        static_cast<std::uint32_t>(k));
  }

  const double subBound = lambda * lambda / (8.0 * alpha);
  parallelFor(field.good.size(), [&](std::size_t blk) {
    const int c = static_cast<int>(blk) % field.cols;
    const int r = static_cast<int>(blk) / field.cols;
    const Vec2 corner = field.origin + Vec2(c * B, r * B);
    const auto& pts = members[blk];

    // I: every lambda-subsquare count in [1, lambda^2/(8 alpha)].
    std::vector<std::uint32_t> subCount(static_cast<std::size_t>(Lambda) * Lambda, 0);
    for (std::uint32_t k : pts) {
      const Vec2 rel = cloud.pts[k] - corner;
      int sc = static_cast<int>(std::floor(rel.x / lambda));
      int sr = static_cast<int>(std::floor(rel.y / lambda));
      sc = std::clamp(sc, 0, static_cast<int>(Lambda) - 1);
      sr = std::clamp(sr, 0, static_cast<int>(Lambda) - 1);
      ++subCount[static_cast<std::size_t>(sr) * Lambda + sc];
    }
    for (std::uint32_t n : subCount)
      if (n < 1 || static_cast<double>(n) > subBound) return;

    // II: pairwise separation >= 2 alpha.
    const double sep2 = 4.0 * alpha * alpha;
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = a + 1; b < pts.size(); ++b)
        if (dist2(cloud.pts[pts[a]], cloud.pts[pts[b]]) < sep2) return;

    // III: distance >= 2 alpha from the block boundary.
    const Window blockWin = field.blockWindow(c, r);
    for (std::uint32_t k : pts)
      if (blockWin.boundaryDistance(cloud.pts[k]) < 2.0 * alpha) return;

    field.good[blk] = 1;
  });
  return field;
}

BlockField bernoulliField(int cols, int rows, double p,
                          const RandomStream& stream) {
  if (cols <= 0 || rows <= 0)
    throw std::invalid_argument("bernoulliField: need positive dimensions");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("bernoulliField: p must be in [0,1]");
  BlockField field;
  field.alpha = 0.0;
  field.lambda = 1.0;
  field.Lambda = 12;
  field.origin = {0, 0};
  field.cols = cols;
  field.rows = rows;
  field.good.resize(static_cast<std::size_t>(cols) * rows);
  RandomDraw draw(stream);
  for (auto& g : field.good) g = draw.nextUniform() < p ? 1 : 0;
  return field;
}

std::vector<BlockPath> findCrossings(const BlockField& field,
                                     const BlockRect& rect, CrossDir dir,
                                     std::size_t want) {
  if (rect.col0 < 0 || rect.row0 < 0 || rect.cols <= 0 || rect.rows <= 0 ||
      rect.col0 + rect.cols > field.cols || rect.row0 + rect.rows > field.rows)
    throw std::invalid_argument("findCrossings: rectangle not covered by the field");

  const int W = rect.cols, H = rect.rows;
  auto at = [&](int c, int r) { return static_cast<std::size_t>(r) * W + c; };
  std::vector<std::uint8_t> open(static_cast<std::size_t>(W) * H);
  for (int r = 0; r < H; ++r)
    for (int c = 0; c < W; ++c)
      open[at(c, r)] = field.isGood(rect.col0 + c, rect.row0 + r);

  std::vector<BlockPath> out;
  std::vector<int> parent(open.size());
  while (out.size() < want) {
    // Shortest crossing by BFS; sources scanned bottom-to-top / left-to-right
    // for determinism.
    std::fill(parent.begin(), parent.end(), -2);
    std::deque<std::size_t> queue;
    if (dir == CrossDir::Horizontal) {
      for (int r = 0; r < H; ++r)
        if (open[at(0, r)]) {
          parent[at(0, r)] = -1;
          queue.push_back(at(0, r));
        }
    } else {
      for (int c = 0; c < W; ++c)
        if (open[at(c, 0)]) {
          parent[at(c, 0)] = -1;
          queue.push_back(at(c, 0));
        }
    }
    long long goal = -1;
    while (!queue.empty() && goal < 0) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      const int c = static_cast<int>(cur) % W;
      const int r = static_cast<int>(cur) / W;
      if ((dir == CrossDir::Horizontal && c == W - 1) ||
          (dir == CrossDir::Vertical && r == H - 1)) {
        goal = static_cast<long long>(cur);
        break;
      }
      const int dc[4] = {1, -1, 0, 0};
      const int dr[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int nc = c + dc[k], nr = r + dr[k];
        if (nc < 0 || nc >= W || nr < 0 || nr >= H) continue;
        const std::size_t nxt = at(nc, nr);
        if (!open[nxt] || parent[nxt] != -2) continue;
        parent[nxt] = static_cast<int>(cur);
        queue.push_back(nxt);
      }
    }
    if (goal < 0) break;
    BlockPath path;
    for (std::size_t cur = static_cast<std::size_t>(goal);;) {
      path.blocks.push_back({rect.col0 + static_cast<int>(cur) % W,
                             rect.row0 + static_cast<int>(cur) / W});
      open[cur] = 0;  // vertex-disjointness
      if (parent[cur] == -1) break;
      cur = static_cast<std::size_t>(parent[cur]);
    }
    std::reverse(path.blocks.begin(), path.blocks.end());
    out.push_back(std::move(path));
  }
  return out;
}

namespace {

// Shortest adjacency path between two points (BFS, smallest-index tie-break
// by construction since adjacency lists are sorted), optionally restricted to
// an allowed set.
std::vector<std::uint32_t> adjacencyRoute(
    const VoronoiDiagram& diagram, std::uint32_t from, std::uint32_t to,
    const std::unordered_set<std::uint32_t>* allowed) {
  std::unordered_map<std::uint32_t, std::uint32_t> parent;
  std::deque<std::uint32_t> queue{from};
  parent[from] = from;
  while (!queue.empty()) {
    const std::uint32_t cur = queue.front();
    queue.pop_front();
    if (cur == to) break;
    for (std::uint32_t nxt : diagram.adjacency[cur]) {
      if (parent.count(nxt)) continue;
      if (allowed && !allowed->count(nxt)) continue;
      parent[nxt] = cur;
      queue.push_back(nxt);
    }
  }
  if (!parent.count(to)) return {};
  std::vector<std::uint32_t> route;
  for (std::uint32_t cur = to;; cur = parent[cur]) {
    route.push_back(cur);
    if (cur == from) break;
  }
  std::reverse(route.begin(), route.end());
  return route;
}

Vec2 sideA(const Window& w, Side s) {
  switch (s) {
    case Side::Left: return {w.xmin(), w.ymin()};
    case Side::Right: return {w.xmax(), w.ymin()};
    case Side::Bottom: return {w.xmin(), w.ymin()};
    case Side::Top: return {w.xmin(), w.ymax()};
  }
  return {};
}

Vec2 sideB(const Window& w, Side s) {
  switch (s) {
    case Side::Left: return {w.xmin(), w.ymax()};
    case Side::Right: return {w.xmax(), w.ymax()};
    case Side::Bottom: return {w.xmax(), w.ymin()};
    case Side::Top: return {w.xmax(), w.ymax()};
  }
  return {};
}

bool cellTouchesSide(const VoronoiDiagram& diagram, std::uint32_t i,
                     const Window& rect, Side side) {
  return diagram.cells[i].polygon.intersectsSegment(sideA(rect, side),
                                                    sideB(rect, side));
}

}  // namespace

bool reachesSideAvoiding(std::uint32_t x, Side side, const Window& rect,
                         const std::vector<std::uint32_t>& blocked,
                         const PointCloud& cloud,
                         const VoronoiDiagram& diagram) {
  std::unordered_set<std::uint32_t> bad(blocked.begin(), blocked.end());
  if (bad.count(x)) return false;
  if (!rect.containsClosed(cloud.pts[x])) return false;
  std::unordered_set<std::uint32_t> seen{x};
  std::deque<std::uint32_t> queue{x};
  while (!queue.empty()) {
    const std::uint32_t cur = queue.front();
    queue.pop_front();
    if (cellTouchesSide(diagram, cur, rect, side)) return true;
    for (std::uint32_t nxt : diagram.adjacency[cur]) {
      if (seen.count(nxt) || bad.count(nxt)) continue;
      if (!rect.containsClosed(cloud.pts[nxt])) continue;
      seen.insert(nxt);
      queue.push_back(nxt);
    }
  }
  return false;
}

PointPath blocksToPointPath(const BlockPath& path, const BlockField& field,
                            const PointCloud& cloud,
                            const VoronoiDiagram& diagram,
                            const RegularMask& mask) {
  if (path.blocks.empty())
    throw std::invalid_argument("blocksToPointPath: empty block path");
  for (const auto& [c, r] : path.blocks)
    if (!field.isGood(c, r))
      throw std::invalid_argument("blocksToPointPath: path visits a bad block");

  // Cells crossed by the polyline of block centers, ordered along it. A
  // single-block path degenerates to the center point's cell.
  struct Hit {
    std::size_t seg;
    double t;
    std::uint32_t cell;
    bool operator<(const Hit& o) const {
      if (seg != o.seg) return seg < o.seg;
      if (t != o.t) return t < o.t;
      return cell < o.cell;
    }
  };
  std::vector<Hit> hits;
  if (path.blocks.size() == 1) {
    const Vec2 c = field.blockCenter(path.blocks[0].first, path.blocks[0].second);
    NeighborIndex tmp(cloud, std::max(field.blockSide(), 1e-9), false);
    hits.push_back({0, 0.0, static_cast<std::uint32_t>(tmp.nearest(c))});
  } else {
    for (std::size_t s = 0; s + 1 < path.blocks.size(); ++s) {
      const Vec2 a = field.blockCenter(path.blocks[s].first, path.blocks[s].second);
      const Vec2 b =
          field.blockCenter(path.blocks[s + 1].first, path.blocks[s + 1].second);
      for (std::uint32_t i = 0; i < diagram.cells.size(); ++i) {
        double tEntry;
        if (diagram.cells[i].polygon.intersectsSegment(a, b, &tEntry))
          hits.push_back({s, tEntry, i});
      }
    }
  }
  if (hits.empty())
    throw std::runtime_error("blocksToPointPath: polyline crosses no cell");
  std::sort(hits.begin(), hits.end());

  std::vector<std::uint32_t> raw;
  for (const Hit& h : hits)
    if (raw.empty() || raw.back() != h.cell) raw.push_back(h.cell);

  // Patch to a Voronoi-neighbor chain; gaps indicate grazing intersections
  // and are bridged by the shortest adjacency route.
  std::vector<std::uint32_t> chain;
  for (std::uint32_t cell : raw) {
    if (chain.empty()) {
      chain.push_back(cell);
    } else if (chain.back() == cell) {
      continue;
    } else if (diagram.adjacent(chain.back(), cell)) {
      chain.push_back(cell);
    } else {
      const auto route = adjacencyRoute(diagram, chain.back(), cell, nullptr);
      if (route.empty())
        throw std::runtime_error(
            "blocksToPointPath: disconnected Voronoi adjacency along the "
            "polyline");
      chain.insert(chain.end(), route.begin() + 1, route.end());
    }
  }

  // Drop loops so the path is simple: on a revisit, rewind to the first
  // occurrence.
  std::vector<std::uint32_t> simple;
  std::unordered_map<std::uint32_t, std::size_t> pos;
  for (std::uint32_t cell : chain) {
    auto it = pos.find(cell);
    if (it != pos.end()) {
      while (simple.size() > it->second + 1) {
        pos.erase(simple.back());
        simple.pop_back();
      }
    } else {
      pos[cell] = simple.size();
      simple.push_back(cell);
    }
  }

  for (std::uint32_t cell : simple)
    if (!mask.regular[cell]) {
      std::ostringstream os;
      os << "blocksToPointPath: traversed cell of point id "
         << cloud.ids[cell]
         << " is not regular; block classification and cell regularity "
            "disagree";
      throw std::runtime_error(os.str());
    }

  PointPath out;
  out.idx = std::move(simple);
  return out;
}

PointPath joinPaths(const PointPath& v1, const PointPath& h,
                    const PointPath& v2, const Window& R, const Window& Rtilde,
                    const PointCloud& cloud, const VoronoiDiagram& diagram) {
  if (v1.idx.empty() || h.idx.empty() || v2.idx.empty())
    throw std::invalid_argument("joinPaths: empty input path");

  auto checkSeparates = [&](const Window& rect, const char* name) {
    std::unordered_set<std::uint32_t> hSet(h.idx.begin(), h.idx.end());
    for (std::uint32_t i = 0; i < diagram.cells.size(); ++i) {
      if (hSet.count(i)) continue;
      if (!rect.containsClosed(cloud.pts[i])) continue;
      if (!cellTouchesSide(diagram, i, rect, Side::Bottom)) continue;
      if (reachesSideAvoiding(i, Side::Top, rect, h.idx, cloud, diagram)) {
        std::ostringstream os;
        os << "joinPaths: horizontal path does not separate rectangle " << name
           << " [" << rect.xmin() << "," << rect.xmax() << "]x[" << rect.ymin()
           << "," << rect.ymax() << "]";
        throw std::runtime_error(os.str());
      }
    }
  };
  checkSeparates(R, "R");
  checkSeparates(Rtilde, "R~");

  // Candidate set: the below-part of v1, all of h, the above-part of v2.
  std::unordered_set<std::uint32_t> allowed(h.idx.begin(), h.idx.end());
  for (std::uint32_t x : v1.idx) {
    const Vec2& p = cloud.pts[x];
    if (p.y > R.ymax()) continue;  // beyond the hand-over rectangle
    if (R.containsClosed(p) &&
        reachesSideAvoiding(x, Side::Top, R, h.idx, cloud, diagram))
      continue;  // lies above h inside R
    allowed.insert(x);
  }
  for (std::uint32_t x : v2.idx) {
    const Vec2& p = cloud.pts[x];
    if (p.y < Rtilde.ymin()) continue;
    if (Rtilde.containsClosed(p) &&
        reachesSideAvoiding(x, Side::Bottom, Rtilde, h.idx, cloud, diagram))
      continue;  // lies below h inside R~
    allowed.insert(x);
  }
  const std::uint32_t from = v1.idx.front();
  const std::uint32_t to = v2.idx.back();
  allowed.insert(from);
  allowed.insert(to);

  const auto route = adjacencyRoute(diagram, from, to, &allowed);
  if (route.empty())
    throw std::runtime_error(
        "joinPaths: no connected junction through the selected pieces");
  PointPath out;
  out.idx = route;
  return out;
}

// ---------------------------------------------------------------------------

Window RegularGrid::rowStrip(std::size_t i) const {
  return Window({domain.center.x, domain.ymin() + (i + 0.5) * t},
                domain.width, t);
}

Window RegularGrid::colStrip(std::size_t j) const {
  return Window({domain.xmin() + (j + 0.5) * t, domain.center.y}, t,
                domain.height);
}

Window RegularGrid::square(std::size_t i, std::size_t j) const {
  return Window(
      {domain.xmin() + (j + 0.5) * t, domain.ymin() + (i + 0.5) * t}, t, t);
}

namespace {

double pathDistance(const PointCloud& cloud, const PointPath& a,
                    const PointPath& b) {
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t x : a.idx)
    for (std::uint32_t y : b.idx)
      best = std::min(best, dist(cloud.pts[x], cloud.pts[y]));
  return best;
}

double meanOrdinate(const PointCloud& cloud, const PointPath& p, bool vertical) {
  double s = 0.0;
  for (std::uint32_t x : p.idx)
    s += vertical ? cloud.pts[x].x : cloud.pts[x].y;
  return s / static_cast<double>(p.idx.size());
}

// Disjoint point-level crossings of a strip in the restricted adjacency
// graph: iterative shortest-first BFS with vertex removal.
std::vector<PointPath> stripCrossings(
    const PointCloud& cloud, const std::vector<std::vector<std::uint32_t>>& adj,
    const std::vector<std::uint8_t>& usable, const Window& strip, bool vertical,
    double endTol) {
  std::vector<std::uint8_t> open(cloud.size(), 0);
  std::vector<std::uint32_t> verts;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    if (usable[i] && strip.contains(cloud.pts[i])) {
      open[i] = 1;
      verts.push_back(static_cast<std::uint32_t>(i));
    }
  auto isSource = [&](std::uint32_t i) {
    return vertical ? cloud.pts[i].y - strip.ymin() <= endTol
                    : cloud.pts[i].x - strip.xmin() <= endTol;
  };
  auto isTarget = [&](std::uint32_t i) {
    return vertical ? strip.ymax() - cloud.pts[i].y <= endTol
                    : strip.xmax() - cloud.pts[i].x <= endTol;
  };

  std::vector<PointPath> out;
  std::vector<std::int64_t> parent(cloud.size());
  for (;;) {
    std::fill(parent.begin(), parent.end(), -2);
    std::deque<std::uint32_t> queue;
    for (std::uint32_t v : verts)
      if (open[v] && isSource(v)) {
        parent[v] = -1;
        queue.push_back(v);
      }
    std::int64_t goal = -1;
    while (!queue.empty()) {
      const std::uint32_t cur = queue.front();
      queue.pop_front();
      if (isTarget(cur)) {
        goal = cur;
        break;
      }
      for (std::uint32_t nxt : adj[cur]) {
        if (!open[nxt] || parent[nxt] != -2) continue;
        if (!strip.contains(cloud.pts[nxt])) continue;
        parent[nxt] = cur;
        queue.push_back(nxt);
      }
    }
    if (goal < 0) break;
    PointPath path;
    for (std::int64_t cur = goal; cur >= 0; cur = parent[cur]) {
      path.idx.push_back(static_cast<std::uint32_t>(cur));
      open[cur] = 0;
      if (parent[cur] == -1) break;
    }
    std::reverse(path.idx.begin(), path.idx.end());
    out.push_back(std::move(path));
  }
  return out;
}

}  // namespace

GridAssembly assembleGrid(const PointCloud& cloud, double eps, double t,
                          double alpha, double lambda, double upsilonTarget,
                          bool fromTop) {
  if (!(eps > 0.0) || !(t > 0.0) || !(alpha > 0.0) || !(lambda > 0.0))
    throw std::invalid_argument("assembleGrid: parameters must be > 0");
  if (!(upsilonTarget >= 1.0))
    throw std::invalid_argument("assembleGrid: upsilon target must be >= 1");

  GridAssembly out;
  RegularGrid& grid = out.grid;
  grid.eps = eps;
  grid.t = t;
  grid.lambda = lambda;
  grid.alpha = alpha;
  grid.upsilon = upsilonTarget;

  const double margin = 2.0 * lambda * eps;
  const double avail = std::min(cloud.window.width, cloud.window.height) - margin;
  const std::size_t kt = static_cast<std::size_t>(std::floor(avail / t + 1e-9));
  if (kt == 0) {
    out.failure = "working window smaller than one t-square";
    return out;
  }
  grid.kt = kt;
  grid.domain = Window::square(cloud.window.center, kt * t);

  const VoronoiDiagram diagram = voronoiDiagram(cloud, cloud.window);
  const RegularMask mask = regularSubcluster(cloud, diagram, alpha, lambda, eps);

  // Adjacency restricted to regular points and steps of length <= lambda*eps.
  const double step = lambda * eps;
  std::vector<std::uint8_t> usable(cloud.size(), 0);
  for (std::size_t i = 0; i < cloud.size(); ++i) usable[i] = mask.regular[i];
  std::vector<std::vector<std::uint32_t>> adj(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!usable[i]) continue;
    for (std::uint32_t j : diagram.adjacency[i])
      if (usable[j] && dist(cloud.pts[i], cloud.pts[j]) <= step)
        adj[i].push_back(j);
  }

  const double minLen = t / (upsilonTarget * eps);
  const double maxLen = upsilonTarget * t / eps;

  struct Family {
    std::vector<std::vector<PointPath>> byRect;
  };
  auto buildFamily = [&](bool vertical) {
    Family fam;
    fam.byRect.resize(kt);
    for (std::size_t r = 0; r < kt; ++r) {
      const Window strip = vertical ? grid.colStrip(r) : grid.rowStrip(r);
      fam.byRect[r] = stripCrossings(cloud, adj, usable, strip, vertical, step);
    }
    return fam;
  };
  Family hor = buildFamily(false);
  Family ver = buildFamily(true);
  for (const auto& v : hor.byRect) out.rawHorizontal += v.size();
  for (const auto& v : ver.byRect) out.rawVertical += v.size();

  // (e): greedy 3*lambda*eps separation over the whole same-orientation
  // family, keeping from the bottom/left (or top/right for a second grid).
  const double sep = 3.0 * lambda * eps;
  auto pruneSeparation = [&](Family& fam, bool vertical) {
    struct Tagged {
      double ord;
      std::size_t rect;
      std::size_t pos;
    };
    std::vector<Tagged> order;
    for (std::size_t r = 0; r < kt; ++r)
      for (std::size_t p = 0; p < fam.byRect[r].size(); ++p)
        order.push_back({meanOrdinate(cloud, fam.byRect[r][p], vertical), r, p});
    std::sort(order.begin(), order.end(), [&](const Tagged& a, const Tagged& b) {
      return fromTop ? a.ord > b.ord : a.ord < b.ord;
    });
    std::vector<const PointPath*> kept;
    std::vector<std::vector<std::uint8_t>> keepFlag(kt);
    for (std::size_t r = 0; r < kt; ++r)
      keepFlag[r].assign(fam.byRect[r].size(), 0);
    for (const Tagged& tg : order) {
      const PointPath& cand = fam.byRect[tg.rect][tg.pos];
      bool ok = true;
      for (const PointPath* k : kept)
        if (pathDistance(cloud, cand, *k) < sep) {
          ok = false;
          break;
        }
      if (ok) {
        kept.push_back(&cand);
        keepFlag[tg.rect][tg.pos] = 1;
      }
    }
    for (std::size_t r = 0; r < kt; ++r) {
      std::vector<PointPath> next;
      for (std::size_t p = 0; p < fam.byRect[r].size(); ++p)
        if (keepFlag[r][p]) next.push_back(std::move(fam.byRect[r][p]));
      fam.byRect[r] = std::move(next);
    }
  };
  pruneSeparation(hor, false);
  pruneSeparation(ver, true);

  // (d): per-square length bounds; violators are discarded.
  auto pruneLengths = [&](Family& fam, bool vertical) {
    for (std::size_t r = 0; r < kt; ++r) {
      std::vector<PointPath> next;
      for (PointPath& path : fam.byRect[r]) {
        bool ok = true;
        for (std::size_t s = 0; s < kt && ok; ++s) {
          const Window sq = vertical ? grid.square(s, r) : grid.square(r, s);
          std::size_t len = 0;
          for (std::uint32_t x : path.idx)
            if (sq.containsClosed(cloud.pts[x])) ++len;
          ok = static_cast<double>(len) >= minLen &&
               static_cast<double>(len) <= maxLen;
        }
        if (ok) next.push_back(std::move(path));
      }
      fam.byRect[r] = std::move(next);
    }
  };
  pruneLengths(hor, false);
  pruneLengths(ver, true);

  // Uniform path count across all 2*kt rectangles.
  std::size_t M = std::numeric_limits<std::size_t>::max();
  for (std::size_t r = 0; r < kt; ++r) {
    M = std::min(M, hor.byRect[r].size());
    M = std::min(M, ver.byRect[r].size());
  }
  if (M == 0 || M == std::numeric_limits<std::size_t>::max()) {
    out.failure = "no admissible crossing in at least one rectangle";
    for (std::size_t r = 0; r < kt; ++r) {
      if (hor.byRect[r].empty())
        out.details.push_back("horizontal rectangle " + std::to_string(r + 1) +
                              ": no surviving path");
      if (ver.byRect[r].empty())
        out.details.push_back("vertical rectangle " + std::to_string(r + 1) +
                              ": no surviving path");
    }
    return out;
  }
  if (static_cast<double>(M) < minLen || static_cast<double>(M) > maxLen) {
    out.failure = "uniform path count outside the target bounds";
    out.details.push_back("M = " + std::to_string(M));
    return out;
  }

  auto finalize = [&](Family& fam, bool vertical,
                      std::vector<std::vector<PointPath>>& dst) {
    dst.resize(kt);
    for (std::size_t r = 0; r < kt; ++r) {
      std::sort(fam.byRect[r].begin(), fam.byRect[r].end(),
                [&](const PointPath& a, const PointPath& b) {
                  return meanOrdinate(cloud, a, vertical) <
                         meanOrdinate(cloud, b, vertical);
                });
      if (fromTop) {
        dst[r].assign(fam.byRect[r].end() - M, fam.byRect[r].end());
      } else {
        dst[r].assign(fam.byRect[r].begin(), fam.byRect[r].begin() + M);
      }
    }
  };
  grid.M = M;
  finalize(hor, false, grid.horizontal);
  finalize(ver, true, grid.vertical);
  out.ok = true;
  return out;
}

bool GridValidation::allPass() const {
  for (const PropertyReport& p : properties)
    if (!p.pass) return false;
  return true;
}

GridValidation validateGrid(const RegularGrid& grid, const PointCloud& cloud,
                            const NeighborIndex& index,
                            const RegularMask& mask) {
  GridValidation rep;
  auto add = [&](char prop, bool pass, const std::string& witness) {
    rep.properties.push_back({prop, pass, pass ? std::string() : witness});
  };
  const double step = grid.lambda * grid.eps;
  const double sep = 3.0 * step;

  auto forAllPaths = [&](auto&& fn) {
    for (std::size_t r = 0; r < grid.kt; ++r) {
      for (std::size_t m = 0; m < grid.horizontal[r].size(); ++m)
        fn(false, r, m, grid.horizontal[r][m]);
      for (std::size_t m = 0; m < grid.vertical[r].size(); ++m)
        fn(true, r, m, grid.vertical[r][m]);
    }
  };
  auto pathName = [](bool vertical, std::size_t r, std::size_t m) {
    std::ostringstream os;
    os << (vertical ? "v[" : "h[") << r + 1 << "][" << m + 1 << "]";
    return os.str();
  };

  // (a) regular membership.
  {
    bool pass = true;
    std::string w;
    forAllPaths([&](bool vert, std::size_t r, std::size_t m, const PointPath& p) {
      for (std::uint32_t x : p.idx)
        if (!mask.regular[x] && pass) {
          pass = false;
          w = pathName(vert, r, m) + " contains irregular point id " +
              std::to_string(cloud.ids[x]);
        }
    });
    add('a', pass, w);
  }
  // (b)/(c) crossing and strict containment.
  for (int vertWanted = 0; vertWanted < 2; ++vertWanted) {
    bool pass = true;
    std::string w;
    forAllPaths([&](bool vert, std::size_t r, std::size_t m, const PointPath& p) {
      if (static_cast<int>(vert) != vertWanted || !pass) return;
      const Window strip = vert ? grid.colStrip(r) : grid.rowStrip(r);
      if (p.idx.empty()) {
        pass = false;
        w = pathName(vert, r, m) + " is empty";
        return;
      }
      for (std::uint32_t x : p.idx)
        if (!strip.contains(cloud.pts[x])) {
          pass = false;
          w = pathName(vert, r, m) + " leaves its rectangle at id " +
              std::to_string(cloud.ids[x]);
          return;
        }
      const Vec2& a = cloud.pts[p.idx.front()];
      const Vec2& b = cloud.pts[p.idx.back()];
      const bool connects =
          vert ? (a.y - strip.ymin() <= step && strip.ymax() - b.y <= step)
               : (a.x - strip.xmin() <= step && strip.xmax() - b.x <= step);
      if (!connects) {
        pass = false;
        w = pathName(vert, r, m) + " does not connect the opposite sides";
      }
    });
    add(vertWanted ? 'c' : 'b', pass, w);
  }
  // (d) per-square lengths and M within the Upsilon bounds.
  {
    const double minLen = grid.t / (grid.upsilon * grid.eps);
    const double maxLen = grid.upsilon * grid.t / grid.eps;
    bool pass = static_cast<double>(grid.M) >= minLen &&
                static_cast<double>(grid.M) <= maxLen;
    std::string w = pass ? "" : "M = " + std::to_string(grid.M) + " outside bounds";
    forAllPaths([&](bool vert, std::size_t r, std::size_t m, const PointPath& p) {
      if (!pass) return;
      if (p.idx.empty()) return;
      for (std::size_t s = 0; s < grid.kt; ++s) {
        const Window sq = vert ? grid.square(s, r) : grid.square(r, s);
        std::size_t len = 0;
        for (std::uint32_t x : p.idx)
          if (sq.containsClosed(cloud.pts[x])) ++len;
        if (static_cast<double>(len) < minLen ||
            static_cast<double>(len) > maxLen) {
          pass = false;
          w = pathName(vert, r, m) + " square " + std::to_string(s + 1) +
              " length " + std::to_string(len);
          return;
        }
      }
      if (grid.horizontal[r].size() != grid.M ||
          grid.vertical[r].size() != grid.M) {
        pass = false;
        w = "rectangle " + std::to_string(r + 1) + " path count differs from M";
      }
    });
    add('d', pass, w);
  }
  // (e) pairwise separation of same-orientation paths.
  {
    bool pass = true;
    std::string w;
    for (int vert = 0; vert < 2 && pass; ++vert) {
      std::vector<std::pair<std::string, const PointPath*>> fam;
      for (std::size_t r = 0; r < grid.kt; ++r) {
        const auto& rect = vert ? grid.vertical[r] : grid.horizontal[r];
        for (std::size_t m = 0; m < rect.size(); ++m)
          fam.push_back({pathName(vert, r, m), &rect[m]});
      }
      for (std::size_t a = 0; a < fam.size() && pass; ++a)
        for (std::size_t b = a + 1; b < fam.size() && pass; ++b) {
          const double d = pathDistance(cloud, *fam[a].second, *fam[b].second);
          if (d < sep) {
            pass = false;
            w = fam[a].first + " and " + fam[b].first + " at distance " +
                std::to_string(d);
          }
        }
    }
    add('e', pass, w);
  }
  // (f) ball counts near paths.
  {
    const double bound = grid.lambda * grid.lambda / grid.alpha;
    bool pass = true;
    std::string w;
    forAllPaths([&](bool vert, std::size_t r, std::size_t m, const PointPath& p) {
      if (!pass) return;
      for (std::uint32_t x : p.idx) {
        for (std::uint32_t y : index.query(cloud.pts[x], sep)) {
          if (static_cast<double>(index.countInBall(cloud.pts[y], step)) >
              bound) {
            pass = false;
            w = "point id " + std::to_string(cloud.ids[y]) + " near " +
                pathName(vert, r, m) + " exceeds the ball-count bound";
            return;
          }
        }
      }
    });
    add('f', pass, w);
  }
  // (g) consecutive step bounds.
  {
    bool pass = true;
    std::string w;
    forAllPaths([&](bool vert, std::size_t r, std::size_t m, const PointPath& p) {
      for (std::size_t k = 0; k + 1 < p.idx.size() && pass; ++k) {
        const double d = dist(cloud.pts[p.idx[k]], cloud.pts[p.idx[k + 1]]);
        if (d > step) {
          pass = false;
          w = pathName(vert, r, m) + " step " + std::to_string(k) +
              " has length " + std::to_string(d);
        }
      }
    });
    add('g', pass, w);
  }
  return rep;
}

}  // namespace homog
