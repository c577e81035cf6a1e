#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace homog {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }
inline double dist2(const Vec2& a, const Vec2& b) { return (a - b).norm2(); }

// Counterclockwise rotation by theta about the origin.
inline Vec2 rotate(const Vec2& v, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

// Axis-aligned rectangle given by center and side lengths. Q_r(x) = x + rQ
// with Q the open unit square centered at 0.
struct Window {
  Vec2 center;
  double width = 1.0;
  double height = 1.0;

  Window() = default;
  Window(Vec2 c, double w, double h) : center(c), width(w), height(h) {
    if (!(w > 0.0) || !(h > 0.0))
      throw std::invalid_argument("Window: width and height must be positive");
  }

  static Window square(Vec2 c, double side) { return Window(c, side, side); }

  double area() const { return width * height; }
  double xmin() const { return center.x - width / 2; }
  double xmax() const { return center.x + width / 2; }
  double ymin() const { return center.y - height / 2; }
  double ymax() const { return center.y + height / 2; }

  // Open-rectangle membership, matching the paper's open squares.
  bool contains(const Vec2& p) const {
    return p.x > xmin() && p.x < xmax() && p.y > ymin() && p.y < ymax();
  }
  bool containsClosed(const Vec2& p) const {
    return p.x >= xmin() && p.x <= xmax() && p.y >= ymin() && p.y <= ymax();
  }
  bool containsWindow(const Window& o) const {
    return o.xmin() >= xmin() && o.xmax() <= xmax() && o.ymin() >= ymin() &&
           o.ymax() <= ymax();
  }

  Window enlarged(double margin) const {
    return Window(center, width + 2 * margin, height + 2 * margin);
  }

  // Signed distance to the boundary is not needed; this is the plain
  // (nonnegative) distance from p to the rectangle boundary, valid for points
  // inside and outside.
  double boundaryDistance(const Vec2& p) const {
    const double dx = std::max({xmin() - p.x, 0.0, p.x - xmax()});
    const double dy = std::max({ymin() - p.y, 0.0, p.y - ymax()});
    if (dx > 0.0 || dy > 0.0) return std::hypot(dx, dy);
    const double ix = std::min(p.x - xmin(), xmax() - p.x);
    const double iy = std::min(p.y - ymin(), ymax() - p.y);
    return std::min(ix, iy);
  }
};

// Convex polygon with counterclockwise vertices.
struct ConvexPolygon {
  std::vector<Vec2> v;

  ConvexPolygon() = default;
  explicit ConvexPolygon(std::vector<Vec2> verts) : v(std::move(verts)) {}

  static ConvexPolygon fromWindow(const Window& w) {
    return ConvexPolygon({{w.xmin(), w.ymin()},
                          {w.xmax(), w.ymin()},
                          {w.xmax(), w.ymax()},
                          {w.xmin(), w.ymax()}});
  }

  bool empty() const { return v.size() < 3; }
  std::size_t size() const { return v.size(); }

  double area() const {
    double a = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vec2& p = v[i];
      const Vec2& q = v[(i + 1) % v.size()];
      a += p.cross(q);
    }
    return 0.5 * a;
  }

  Vec2 centroid() const {
    double a = 0.0;
    Vec2 c{0, 0};
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vec2& p = v[i];
      const Vec2& q = v[(i + 1) % v.size()];
      const double w = p.cross(q);
      a += w;
      c = c + (p + q) * w;
    }
    if (a == 0.0) return v.empty() ? Vec2{0, 0} : v[0];
    return c / (3.0 * a);
  }

  bool contains(const Vec2& p, double tol = 1e-12) const {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vec2& a = v[i];
      const Vec2& b = v[(i + 1) % v.size()];
      if ((b - a).cross(p - a) < -tol * std::max(1.0, dist(a, b))) return false;
    }
    return !empty();
  }

  // Distance from p to the polygon boundary (inside or outside).
  double boundaryDistance(const Vec2& p) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vec2& a = v[i];
      const Vec2& b = v[(i + 1) % v.size()];
      const Vec2 ab = b - a;
      const double L2 = ab.norm2();
      double t = L2 > 0 ? (p - a).dot(ab) / L2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      best = std::min(best, dist(p, a + ab * t));
    }
    return best;
  }

  double maxVertexDistanceFrom(const Vec2& p) const {
    double m = 0.0;
    for (const Vec2& q : v) m = std::max(m, dist(p, q));
    return m;
  }

  double diameter() const {
    double m = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size(); ++j)
        m = std::max(m, dist(v[i], v[j]));
    return m;
  }

  // Keep the side {p : n.p <= d}.
  ConvexPolygon clipHalfPlane(const Vec2& n, double d) const {
    std::vector<Vec2> out;
    out.reserve(v.size() + 2);
    const std::size_t m = v.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Vec2& a = v[i];
      const Vec2& b = v[(i + 1) % m];
      const double da = n.dot(a) - d;
      const double db = n.dot(b) - d;
      if (da <= 0.0) {
        out.push_back(a);
        if (db > 0.0) {
          const double t = da / (da - db);
          out.push_back(a + (b - a) * t);
        }
      } else if (db <= 0.0) {
        const double t = da / (da - db);
        out.push_back(a + (b - a) * t);
      }
    }
    if (out.size() < 3) out.clear();
    return ConvexPolygon(std::move(out));
  }

  ConvexPolygon clipToWindow(const Window& w) const {
    ConvexPolygon p = *this;
    p = p.clipHalfPlane({1, 0}, w.xmax());
    if (p.empty()) return p;
    p = p.clipHalfPlane({-1, 0}, -w.xmin());
    if (p.empty()) return p;
    p = p.clipHalfPlane({0, 1}, w.ymax());
    if (p.empty()) return p;
    p = p.clipHalfPlane({0, -1}, -w.ymin());
    return p;
  }

  void boundingBox(double& x0, double& y0, double& x1, double& y1) const {
    x0 = y0 = std::numeric_limits<double>::infinity();
    x1 = y1 = -std::numeric_limits<double>::infinity();
    for (const Vec2& p : v) {
      x0 = std::min(x0, p.x);
      y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
  }

  // Largest inscribed circle radius (Chebyshev radius), by enumerating
  // active triples of edge constraints. Tolerance 1e-10.
  double inRadius() const;

  // Does the segment [a,b] meet the (closed) polygon?
  bool intersectsSegment(const Vec2& a, const Vec2& b, double* tEntry = nullptr) const;
};

// Evaluation region: axis-aligned rectangle or convex polygon.
class Region {
 public:
  Region() : kind_(Kind::Rect), rect_(Window({0, 0}, 1, 1)) {}
  explicit Region(const Window& w) : kind_(Kind::Rect), rect_(w) {}
  explicit Region(ConvexPolygon p) : kind_(Kind::Poly), poly_(std::move(p)) {
    if (poly_.empty()) throw std::invalid_argument("Region: degenerate polygon");
    if (poly_.area() <= 0.0)
      throw std::invalid_argument("Region: polygon must be counterclockwise");
  }

  bool isRect() const { return kind_ == Kind::Rect; }
  const Window& rect() const { return rect_; }
  const ConvexPolygon& poly() const { return poly_; }

  bool contains(const Vec2& p) const {
    return kind_ == Kind::Rect ? rect_.contains(p) : poly_.contains(p);
  }
  double boundaryDistance(const Vec2& p) const {
    return kind_ == Kind::Rect ? rect_.boundaryDistance(p)
                               : poly_.boundaryDistance(p);
  }
  double area() const {
    return kind_ == Kind::Rect ? rect_.area() : poly_.area();
  }
  Window boundingWindow() const {
    if (kind_ == Kind::Rect) return rect_;
    double x0, y0, x1, y1;
    poly_.boundingBox(x0, y0, x1, y1);
    return Window({(x0 + x1) / 2, (y0 + y1) / 2}, x1 - x0, y1 - y0);
  }

 private:
  enum class Kind { Rect, Poly };
  Kind kind_;
  Window rect_{{0, 0}, 1, 1};
  ConvexPolygon poly_;
};

}  // namespace homog
