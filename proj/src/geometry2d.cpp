#include "homog/geometry2d.hpp"

namespace homog {

namespace {

// Solve the 3x3 system arising from three active constraints
//   n_i . c + r = d_i   (inward-offset form)
// Returns false when (numerically) singular.
bool solveTriple(const Vec2& n1, double d1, const Vec2& n2, double d2,
                 const Vec2& n3, double d3, Vec2& c, double& r) {
  // Unknowns (cx, cy, r).
  const double A[3][4] = {{n1.x, n1.y, 1.0, d1},
                          {n2.x, n2.y, 1.0, d2},
                          {n3.x, n3.y, 1.0, d3}};
  double m[3][4];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = A[i][j];
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int i = col + 1; i < 3; ++i)
      if (std::abs(m[i][col]) > std::abs(m[piv][col])) piv = i;
    if (std::abs(m[piv][col]) < 1e-14) return false;
    std::swap(m[piv], m[col]);
    for (int i = 0; i < 3; ++i) {
      if (i == col) continue;
      const double f = m[i][col] / m[col][col];
      for (int j = col; j < 4; ++j) m[i][j] -= f * m[col][j];
    }
  }
  c.x = m[0][3] / m[0][0];
  c.y = m[1][3] / m[1][1];
  r = m[2][3] / m[2][2];
  return true;
}

}  // namespace

double ConvexPolygon::inRadius() const {
  if (empty()) return 0.0;
  const std::size_t m = v.size();
  // Inward unit normals and offsets: edge i keeps n_i . p <= d_i with the
  // interior on the <= side; rewrite as (-n_i) . p >= -d_i. For a circle of
  // radius r centered at c inside: n_i . c <= d_i - r.
  std::vector<Vec2> n(m);
  std::vector<double> d(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 a = v[i], b = v[(i + 1) % m];
    Vec2 e = b - a;
    const double L = e.norm();
    if (L == 0.0) {
      n[i] = {0, 0};
      d[i] = 0;
      continue;
    }
    // Outward normal for CCW polygon.
    n[i] = Vec2{e.y / L, -e.x / L};
    d[i] = n[i].dot(a);
  }
  const double tol = 1e-10;
  double best = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      for (std::size_t k = j + 1; k < m; ++k) {
        Vec2 c;
        double r;
        if (!solveTriple(n[i], d[i], n[j], d[j], n[k], d[k], c, r)) continue;
        if (r <= best) continue;
        bool feasible = true;
        for (std::size_t l = 0; l < m; ++l) {
          if (n[l].norm2() == 0.0) continue;
          if (n[l].dot(c) > d[l] - r + tol) {
            feasible = false;
            break;
          }
        }
        if (feasible) best = r;
      }
  // Two-constraint optima (e.g. a long rectangle) appear as triples with one
  // redundant edge; the enumeration above covers them for polygons with >= 3
  // edges, which is all we ever have.
  return best;
}

bool ConvexPolygon::intersectsSegment(const Vec2& a, const Vec2& b,
                                      double* tEntry) const {
  if (empty()) return false;
  // Clip the parameter interval [0,1] of a + t(b-a) by each half-plane.
  double t0 = 0.0, t1 = 1.0;
  const Vec2 ab = b - a;
  const std::size_t m = v.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 p = v[i], q = v[(i + 1) % m];
    const Vec2 e = q - p;
    // Interior: e x (x - p) >= 0.
    const double f0 = e.cross(a - p);
    const double df = e.cross(ab);
    if (std::abs(df) < 1e-300) {
      if (f0 < 0) return false;
      continue;
    }
    const double t = -f0 / df;
    if (df > 0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return false;
  }
  if (tEntry) *tEntry = t0;
  return true;
}

}  // namespace homog
