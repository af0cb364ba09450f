#include "ppfe/rng.hpp"

#include <stdexcept>

namespace ppfe {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t master, std::uint32_t role, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    role, static_cast<std::uint32_t>(trial),
                    static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : engine_(seeded_engine(seed, 0, 0)) {}

RandomStream::RandomStream(std::uint64_t master_seed, StreamRole role, std::uint64_t trial)
    : engine_(seeded_engine(master_seed, static_cast<std::uint32_t>(role), trial)) {}

double RandomStream::uniform() { return uniform_(engine_); }

double RandomStream::normal() { return normal_(engine_); }

bool RandomStream::bernoulli(double p) {
  if (p >= 1.0) {
    // Still consume a draw so stream positions do not depend on p.
    (void)uniform();
    return true;
  }
  return uniform() < p;
}

Vec RandomStream::standard_normal(Eigen::Index n) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

GaussianSampler::GaussianSampler(Vec mean, const Mat& cov)
    : mean_(std::move(mean)), factor_(linalg::psd_factor(cov)) {
  if (cov.rows() != mean_.size()) {
    throw DimensionError("GaussianSampler: mean and covariance dimensions differ");
  }
}

GaussianSampler::GaussianSampler(const Mat& cov) : GaussianSampler(Vec::Zero(cov.rows()), cov) {}

Vec GaussianSampler::sample(RandomStream& rng) const {
  return mean_ + factor_ * rng.standard_normal(factor_.cols());
}

}  // namespace ppfe
