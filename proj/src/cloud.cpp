#include "homog/cloud.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace homog {

PointCloud::PointCloud(std::vector<Vec2> points, Window win, CloudMeta m)
    : pts(std::move(points)), window(win), meta(std::move(m)) {
  ids.resize(pts.size());
  std::iota(ids.begin(), ids.end(), 0);
  for (const Vec2& p : pts) {
    if (!window.containsClosed(p))
      throw std::invalid_argument("PointCloud: point outside window");
  }
  // Duplicate coordinates (exact equality) violate simplicity.
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pts[a].x != pts[b].x) return pts[a].x < pts[b].x;
    return pts[a].y < pts[b].y;
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (pts[order[i - 1]] == pts[order[i]])
      throw std::invalid_argument("PointCloud: duplicate point coordinates");
  }
}

std::size_t PointCloud::indexOf(std::int64_t id) const {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id)
    throw std::out_of_range("PointCloud: unknown id");
  return static_cast<std::size_t>(it - ids.begin());
}

std::string formatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void writeCloud(const PointCloud& cloud, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("writeCloud: cannot open " + path);
  os << "#cloud v1 seed=" << cloud.meta.seed
     << " gamma=" << formatDouble(cloud.meta.gamma)
     << " window=" << formatDouble(cloud.window.center.x) << ' '
     << formatDouble(cloud.window.center.y) << ' '
     << formatDouble(cloud.window.width) << ' '
     << formatDouble(cloud.window.height) << '\n';
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    os << cloud.ids[i] << ' ' << formatDouble(cloud.pts[i].x) << ' '
       << formatDouble(cloud.pts[i].y) << '\n';
  }
}

PointCloud readCloud(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("readCloud: cannot open " + path);
  std::string header;
  std::getline(is, header);
  std::uint64_t seed = 0;
  double gamma = 0, cx = 0, cy = 0, w = 0, h = 0;
  if (std::sscanf(header.c_str(),
                  "#cloud v1 seed=%" SCNu64 " gamma=%lf window=%lf %lf %lf %lf",
                  &seed, &gamma, &cx, &cy, &w, &h) != 6)
    throw std::runtime_error("readCloud: bad header in " + path);
  std::vector<Vec2> pts;
  std::vector<std::int64_t> ids;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::int64_t id;
    double x, y;
    if (std::sscanf(line.c_str(), "%" SCNd64 " %lf %lf", &id, &x, &y) != 3)
      throw std::runtime_error("readCloud: bad point line in " + path);
    if (!ids.empty() && id <= ids.back())
      throw std::runtime_error("readCloud: ids not ascending in " + path);
    ids.push_back(id);
    pts.push_back({x, y});
  }
  CloudMeta meta;
  meta.seed = seed;
  meta.gamma = gamma;
  PointCloud cloud(std::move(pts), Window({cx, cy}, w, h), std::move(meta));
  cloud.ids = std::move(ids);
  return cloud;
}

void writeField(const ScalarField& u, const std::string& path) {
  if (!u.domain) throw std::invalid_argument("writeField: detached field");
  std::ofstream os(path);
  if (!os) throw std::runtime_error("writeField: cannot open " + path);
  for (std::size_t i = 0; i < u.values.size(); ++i)
    os << u.domain->ids[i] << ' ' << formatDouble(u.values[i]) << '\n';
}

ScalarField readField(const PointCloud& cloud, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("readField: cannot open " + path);
  ScalarField u(cloud);
  std::vector<bool> seen(cloud.size(), false);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::int64_t id;
    double v;
    if (std::sscanf(line.c_str(), "%" SCNd64 " %lf", &id, &v) != 2)
      throw std::runtime_error("readField: bad line in " + path);
    const std::size_t i = cloud.indexOf(id);
    seen[i] = true;
    u.values[i] = v;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      throw std::runtime_error("readField: missing value for id " +
                               std::to_string(cloud.ids[i]));
  return u;
}

}  // namespace homog
