#pragma once

#include <variant>

#include "homog/cloud.hpp"

namespace homog {

struct SamplingSpec {
  Window window;        // unpadded target window
  double intensity = 1; // points per unit area
  double padding = 0;   // margin added on all sides
  RandomStream stream;
};

// Poisson point cloud on the padded window: N ~ Poisson(gamma * area), then
// N i.i.d. uniform points.
PointCloud samplePoisson(const SamplingSpec& spec);

struct Scale {
  double s = 1.0;
};
struct Translate {
  Vec2 v;
};
struct RotateOp {
  double theta = 0.0;  // counterclockwise, about the origin
};
using CloudTransform = std::variant<Scale, Translate, RotateOp>;

// Pointwise map of coordinates; ids preserved, window mapped consistently.
// Rotation keeps an axis-aligned window by shrinking to the largest inscribed
// axis-aligned box of the rotated rectangle (conservative coverage).
PointCloud transformCloud(const PointCloud& cloud, const CloudTransform& op);

// Points of the shifted lattice h(Z + 1/2)^2 inside the window, optionally
// jittered by a uniform displacement in the ball of radius rho < h/2.
PointCloud latticeCloud(const Window& window, double spacing, double jitter,
                        const RandomStream& stream);

}  // namespace homog
