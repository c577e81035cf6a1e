#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace homog {

// Counter-based splittable random stream. A stream is identified by a master
// seed and a path of derivation labels; draws are a pure function of
// (seed, path, counter), so results do not depend on thread scheduling.
struct RandomStream {
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> path;

  static constexpr const char* kAlgorithm = "splitmix-ctr-v1";

  RandomStream() = default;
  explicit RandomStream(std::uint64_t s) : seed(s) {}
  RandomStream(std::uint64_t s, std::vector<std::uint64_t> p)
      : seed(s), path(std::move(p)) {}

  RandomStream derive(std::uint64_t label) const {
    RandomStream s = *this;
    s.path.push_back(label);
    return s;
  }

  std::uint64_t key() const;
};

// Stateful cursor over a stream.
class RandomDraw {
 public:
  explicit RandomDraw(const RandomStream& s) : key_(s.key()) {}

  std::uint64_t nextU64();
  double nextUniform();                    // in [0,1)
  double nextUniform(double a, double b);  // in [a,b)
  // Uniform point in the closed ball of radius rho (rejection).
  void nextInBall(double rho, double& dx, double& dy);
  // Exact Poisson sampling; numerically stable for large mu by additivity
  // (a Poisson(mu) variable is a sum of independent Poisson pieces).
  long long nextPoisson(double mu);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace homog
