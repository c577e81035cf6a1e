#include "homog/random.hpp"

#include <cmath>
#include <stdexcept>

namespace homog {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RandomStream::key() const {
  std::uint64_t k = mix64(seed ^ 0x243F6A8885A308D3ULL);
  for (std::uint64_t label : path) {
    k = mix64(k ^ mix64(label ^ 0x13198A2E03707344ULL));
  }
  return k;
}

std::uint64_t RandomDraw::nextU64() {
  // Two mixing rounds keyed by the stream key; counter-based.
  const std::uint64_t c = counter_++;
  return mix64(key_ ^ mix64(c * kGolden + 0xA4093822299F31D0ULL));
}

double RandomDraw::nextUniform() {
  return static_cast<double>(nextU64() >> 11) * 0x1.0p-53;
}

double RandomDraw::nextUniform(double a, double b) {
  return a + (b - a) * nextUniform();
}

void RandomDraw::nextInBall(double rho, double& dx, double& dy) {
  if (rho == 0.0) {
    dx = dy = 0.0;
    return;
  }
  for (;;) {
    const double u = nextUniform(-1.0, 1.0);
    const double v = nextUniform(-1.0, 1.0);
    if (u * u + v * v <= 1.0) {
      dx = rho * u;
      dy = rho * v;
      return;
    }
  }
}

long long RandomDraw::nextPoisson(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu))
    throw std::invalid_argument("nextPoisson: mean must be finite and >= 0");
  long long total = 0;
  // Knuth inversion per chunk; chunk mean small enough that exp(-m) is far
  // from underflow.
  const double chunk = 12.0;
  auto inv = [&](double m) -> long long {
    const double L = std::exp(-m);
    long long k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= nextUniform();
    } while (p > L);
    return k - 1;
  };
  while (mu > chunk) {
    total += inv(chunk);
    mu -= chunk;
  }
  total += inv(mu);
  return total;
}

}  // namespace homog
