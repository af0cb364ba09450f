#pragma once

#include "ppfe/linalg.hpp"

#include <cstdint>
#include <random>

namespace ppfe {

/// Independent stream roles. Each (master seed, role, trial) triple seeds its own engine,
/// so trials can run in any order or concurrently without changing their draws.
enum class StreamRole : std::uint32_t {
  Plant = 1,
  Measurement = 2,
  Authorized = 3,
  Wiretap = 4,
  Quantizer = 5,
  Analysis = 6,
};

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);
  RandomStream(std::uint64_t master_seed, StreamRole role, std::uint64_t trial);

  double uniform();  // [0, 1)
  double normal();
  bool bernoulli(double p);
  Vec standard_normal(Eigen::Index n);

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Draws from N(mean, cov). The covariance is factored once with negative
/// eigenvalues clipped, so singular and zero covariances are legal.
class GaussianSampler {
 public:
  GaussianSampler(Vec mean, const Mat& cov);
  explicit GaussianSampler(const Mat& cov);

  Vec sample(RandomStream& rng) const;
  Eigen::Index dim() const { return mean_.size(); }

 private:
  Vec mean_;
  Mat factor_;
};

}  // namespace ppfe
