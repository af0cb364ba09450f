#pragma once

#include "ppfe/linalg.hpp"
#include "ppfe/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ppfe {

/// Known input u_k: a constant vector, or a per-step sequence (the last entry is held
/// past the end).
struct InputSignal {
  Vec constant;
  std::vector<Vec> sequence;

  Vec at(std::size_t k) const;
  Eigen::Index dim() const;
};

/// Linear plant x_{k+1} = A x_k + B u_k + D w_k, w_k ~ N(0, Q), x_0 ~ N(x0_mean, P0).
struct SystemModel {
  Mat A;
  Mat B;
  Mat D;
  Mat Q;
  Vec x0_mean;
  Mat P0;
  InputSignal input;

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index noise_dim() const { return D.cols(); }
  Mat effective_process_cov() const { return D * Q * D.transpose(); }

  /// Throws DimensionError / std::invalid_argument on inconsistent shapes or non-PSD Q, P0.
  void validate() const;
};

/// Builds and validates a model. Missing B defaults to a single zero input column,
/// missing D to the identity.
SystemModel make_system(Mat A, Mat Q, Vec x0_mean, Mat P0, Mat B = Mat(), Mat D = Mat(),
                        InputSignal input = {});

/// y_i = C_i x + E_i v_i, v_i ~ N(0, R_i).
struct SensorModel {
  Mat C;
  Mat E;
  Mat R;

  Eigen::Index output_dim() const { return C.rows(); }
  /// Covariance of E_i v_i as seen by the estimator.
  Mat noise_cov() const { return E * R * E.transpose(); }

  /// R symmetric positive definite, C full row rank.
  void validate(Eigen::Index state_dim) const;
};

SensorModel make_sensor(Mat C, Mat R, Mat E = Mat(), Eigen::Index state_dim = -1);

struct Trajectory {
  std::vector<Vec> states;                     // x_0 .. x_horizon
  std::vector<std::vector<Vec>> measurements;  // [sensor][k], k = 0 .. horizon-1

  std::size_t horizon() const { return states.empty() ? 0 : states.size() - 1; }
};

Vec step_state(const SystemModel& model, const Vec& x, const Vec& u, const Vec& w);
Vec measure(const SensorModel& sensor, const Vec& x, const Vec& v);

/// Simulates `horizon` transitions. Process noise and x_0 come from `process`,
/// measurement noise from `measurement`.
Trajectory simulate_plant(const SystemModel& model, const std::vector<SensorModel>& sensors,
                          std::size_t horizon, RandomStream& process, RandomStream& measurement);

/// Convenience overload deriving the two substreams from (master_seed, trial).
Trajectory simulate_plant(const SystemModel& model, const std::vector<SensorModel>& sensors,
                          std::size_t horizon, std::uint64_t master_seed, std::uint64_t trial = 0);

struct PlantPreset {
  SystemModel model;
  std::vector<SensorModel> sensors;
};

/// Internet-based three-tank benchmark: three states, two inputs, three 2-output sensors.
PlantPreset three_tank_preset();

}  // namespace ppfe
