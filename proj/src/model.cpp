#include "ppfe/model.hpp"

#include <stdexcept>

namespace ppfe {

Vec InputSignal::at(std::size_t k) const {
  if (!sequence.empty()) return k < sequence.size() ? sequence[k] : sequence.back();
  return constant;
}

Eigen::Index InputSignal::dim() const {
  if (!sequence.empty()) return sequence.front().size();
  return constant.size();
}

void SystemModel::validate() const {
  linalg::require_square(A, "A");
  const auto n = A.rows();
  if (n == 0) throw DimensionError("A must be non-empty");
  linalg::require_rows(B, n, "B");
  linalg::require_rows(D, n, "D");
  linalg::require_square(Q, "Q");
  if (Q.rows() != D.cols()) throw DimensionError("Q must be d_w x d_w with d_w = cols(D)");
  linalg::require_size(x0_mean, n, "x0_mean");
  linalg::require_square(P0, "P0");
  linalg::require_rows(P0, n, "P0");
  if (input.dim() != B.cols()) throw DimensionError("input dimension must equal cols(B)");
  for (const auto& u : input.sequence) linalg::require_size(u, B.cols(), "input sequence entry");
  if (!linalg::is_psd(Q, 1e-10)) throw std::invalid_argument("Q must be symmetric PSD");
  if (!linalg::is_psd(P0, 1e-10)) throw std::invalid_argument("P0 must be symmetric PSD");
  if ((Q - Q.transpose()).norm() > 1e-9 * std::max(1.0, Q.norm()) ||
      (P0 - P0.transpose()).norm() > 1e-9 * std::max(1.0, P0.norm())) {
    throw std::invalid_argument("Q and P0 must be symmetric");
  }
}

SystemModel make_system(Mat A, Mat Q, Vec x0_mean, Mat P0, Mat B, Mat D, InputSignal input) {
  const auto n = A.rows();
  SystemModel m;
  m.A = std::move(A);
  m.D = D.size() == 0 ? Mat(Mat::Identity(n, n)) : std::move(D);
  m.B = B.size() == 0 ? Mat(Mat::Zero(n, 1)) : std::move(B);
  m.Q = std::move(Q);
  m.x0_mean = std::move(x0_mean);
  m.P0 = std::move(P0);
  if (input.constant.size() == 0 && input.sequence.empty()) {
    input.constant = Vec::Zero(m.B.cols());
  }
  m.input = std::move(input);
  m.validate();
  return m;
}

void SensorModel::validate(Eigen::Index state_dim) const {
  if (C.rows() == 0) throw DimensionError("C must have at least one row");
  if (state_dim >= 0 && C.cols() != state_dim) {
    throw DimensionError("C must have d_x columns");
  }
  linalg::require_rows(E, C.rows(), "E");
  linalg::require_square(R, "R");
  if (R.rows() != E.cols()) throw DimensionError("R must be d_v x d_v with d_v = cols(E)");
  if ((R - R.transpose()).norm() > 1e-12 * std::max(1.0, R.norm())) {
    throw std::invalid_argument("R must be symmetric");
  }
  if (Eigen::LLT<Mat>(R).info() != Eigen::Success || linalg::min_eigenvalue(R) <= 0.0) {
    throw std::invalid_argument("R must be positive definite");
  }
  Eigen::FullPivLU<Mat> lu(C);
  if (lu.rank() != C.rows()) throw std::invalid_argument("C must have full row rank");
}

SensorModel make_sensor(Mat C, Mat R, Mat E, Eigen::Index state_dim) {
  SensorModel s;
  s.E = E.size() == 0 && C.rows() > 0 ? Mat(Mat::Identity(C.rows(), R.rows())) : std::move(E);
  s.C = std::move(C);
  s.R = std::move(R);
  s.validate(state_dim);
  return s;
}

Vec step_state(const SystemModel& model, const Vec& x, const Vec& u, const Vec& w) {
  linalg::require_size(x, model.A.cols(), "state");
  linalg::require_size(u, model.B.cols(), "input");
  linalg::require_size(w, model.D.cols(), "process noise");
  return model.A * x + model.B * u + model.D * w;
}

Vec measure(const SensorModel& sensor, const Vec& x, const Vec& v) {
  linalg::require_size(x, sensor.C.cols(), "state");
  linalg::require_size(v, sensor.E.cols(), "measurement noise");
  return sensor.C * x + sensor.E * v;
}

Trajectory simulate_plant(const SystemModel& model, const std::vector<SensorModel>& sensors,
                          std::size_t horizon, RandomStream& process, RandomStream& measurement) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  const GaussianSampler x0(model.x0_mean, model.P0);
  const GaussianSampler w(model.Q);
  std::vector<GaussianSampler> v;
  v.reserve(sensors.size());
  for (const auto& s : sensors) v.emplace_back(s.R);

  Trajectory t;
  t.states.reserve(horizon + 1);
  t.measurements.assign(sensors.size(), {});
  for (auto& m : t.measurements) m.reserve(horizon);

  t.states.push_back(x0.sample(process));
  for (std::size_t k = 0; k < horizon; ++k) {
    const Vec& x = t.states.back();
    for (std::size_t i = 0; i < sensors.size(); ++i) {
      t.measurements[i].push_back(measure(sensors[i], x, v[i].sample(measurement)));
    }
    t.states.push_back(step_state(model, x, model.input.at(k), w.sample(process)));
  }
  return t;
}

Trajectory simulate_plant(const SystemModel& model, const std::vector<SensorModel>& sensors,
                          std::size_t horizon, std::uint64_t master_seed, std::uint64_t trial) {
  RandomStream process(master_seed, StreamRole::Plant, trial);
  RandomStream meas(master_seed, StreamRole::Measurement, trial);
  return simulate_plant(model, sensors, horizon, process, meas);
}

PlantPreset three_tank_preset() {
  Mat A(3, 3);
  A << 0.9889, 0.0001, 0.0110,
       0.0001, 0.9774, 0.0119,
       0.0110, 0.0119, 0.9770;
  Mat B(3, 2);
  B << 64.5993, 0.0015,
       0.0015, 64.2236,
       0.3604, 0.3910;
  Vec x0(3);
  x0 << 0.3, 0.1, 0.2;
  Vec u(2);
  u << 3.0e-5, 2.0e-5;

  // D = B, so the process noise is two-dimensional.
  PlantPreset p{make_system(A, 1e-10 * Mat::Identity(2, 2), x0, Mat::Identity(3, 3), B, B,
                            InputSignal{u, {}}),
                {}};

  Mat C1(2, 3), C2(2, 3), C3(2, 3);
  C1 << 1, 0, 0,
        0, 0, 1;
  C2 << 1, 0, 0,
        0, 1, 0;
  C3 << 0, 1, 0,
        0, 0, 1;
  const Mat R = 1e-4 * Mat::Identity(2, 2);
  for (const Mat& C : {C1, C2, C3}) p.sensors.push_back(make_sensor(C, R, Mat(), 3));
  return p;
}

}  // namespace ppfe
