#include "ppfe/linalg.hpp"
#include "ppfe/model.hpp"
#include "ppfe/rng.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ppfe;

TEST(Linalg, PsdFactorReproducesMatrix) {
  testsupport::Gen g(1);
  for (int t = 0; t < 20; ++t) {
    const Mat m = g.psd(4, 2);
    const Mat L = linalg::psd_factor(m);
    EXPECT_LT((L * L.transpose() - m).norm(), 1e-10 * std::max(1.0, m.norm()));
  }
  EXPECT_EQ(linalg::psd_factor(Mat::Zero(3, 3)).norm(), 0.0);
}

TEST(Linalg, InverseSqrtAndBlockDiag) {
  testsupport::Gen g(2);
  const Mat m = g.spd(3);
  const Mat r = linalg::spd_inverse_sqrt(m);
  EXPECT_LT((r * m * r - Mat::Identity(3, 3)).norm(), 1e-10);
  EXPECT_THROW(linalg::spd_inverse_sqrt(Mat::Zero(2, 2)), NumericError);
  const Mat b = linalg::block_diag({Mat::Ones(1, 1), 2 * Mat::Identity(2, 2)});
  Mat expect = Mat::Zero(3, 3);
  expect(0, 0) = 1;
  expect(1, 1) = expect(2, 2) = 2;
  EXPECT_EQ(b, expect);
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  RandomStream a(42, StreamRole::Plant, 3), b(42, StreamRole::Plant, 3);
  RandomStream c(42, StreamRole::Measurement, 3), d(42, StreamRole::Plant, 4);
  const double va = a.normal();
  EXPECT_EQ(va, b.normal());
  EXPECT_NE(va, c.normal());
  EXPECT_NE(va, d.normal());
}

TEST(Rng, GaussianSamplerCovariance) {
  Mat cov(2, 2);
  cov << 2.0, 0.5, 0.5, 1.0;
  GaussianSampler s(cov);
  RandomStream rng(9);
  const int n = 200000;
  Mat acc = Mat::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    const Vec v = s.sample(rng);
    acc += v * v.transpose();
  }
  acc /= n;
  // Entrywise standard error is about sqrt(2·4/n) ≈ 0.006.
  EXPECT_LT((acc - cov).cwiseAbs().maxCoeff(), 0.03);
}

TEST(Model, StepStateExamples) {
  SystemModel m = make_system(Mat::Identity(2, 2), Mat::Identity(2, 2), Vec::Zero(2),
                              Mat::Identity(2, 2));
  Vec x(2);
  x << 1, 2;
  EXPECT_EQ(step_state(m, x, Vec::Zero(1), Vec::Zero(2)), x);

  SystemModel p = make_system(Mat::Zero(2, 2), Mat::Identity(2, 2), Vec::Zero(2),
                              Mat::Identity(2, 2), Mat::Identity(2, 2));
  Vec u(2);
  u << 3, 4;
  EXPECT_EQ(step_state(p, Vec::Constant(2, 7.0), u, Vec::Zero(2)), u);
  EXPECT_THROW(step_state(p, Vec::Zero(3), u, Vec::Zero(2)), DimensionError);
}

TEST(Model, ThreeTankStepMatchesHandProduct) {
  const PlantPreset p = three_tank_preset();
  Vec x0(3);
  x0 << 0.3, 0.1, 0.2;
  Vec u(2);
  u << 3.0e-5, 2.0e-5;
  const Vec got = step_state(p.model, x0, u, Vec::Zero(2));
  // Row-by-row products written out.
  const double r1 = 0.9889 * 0.3 + 0.0001 * 0.1 + 0.0110 * 0.2 + 64.5993 * 3e-5 + 0.0015 * 2e-5;
  const double r2 = 0.0001 * 0.3 + 0.9774 * 0.1 + 0.0119 * 0.2 + 0.0015 * 3e-5 + 64.2236 * 2e-5;
  const double r3 = 0.0110 * 0.3 + 0.0119 * 0.1 + 0.9770 * 0.2 + 0.3604 * 3e-5 + 0.3910 * 2e-5;
  EXPECT_NEAR(got(0), r1, 1e-15);
  EXPECT_NEAR(got(1), r2, 1e-15);
  EXPECT_NEAR(got(2), r3, 1e-15);
}

TEST(Model, ThreeTankPresetValues) {
  const PlantPreset p = three_tank_preset();
  EXPECT_EQ(p.model.A(0, 0), 0.9889);
  EXPECT_EQ(p.model.Q, 1e-10 * Mat::Identity(2, 2));
  EXPECT_EQ(p.model.x0_mean, (Vec(3) << 0.3, 0.1, 0.2).finished());
  EXPECT_EQ(p.model.P0, Mat::Identity(3, 3));
  ASSERT_EQ(p.sensors.size(), 3u);
  for (const auto& s : p.sensors) EXPECT_EQ(s.R, 1e-4 * Mat::Identity(2, 2));
}

TEST(Model, MeasureExamples) {
  const PlantPreset p = three_tank_preset();
  Vec x(3);
  x << 0.3, 0.1, 0.2;
  EXPECT_EQ(measure(p.sensors[0], x, Vec::Zero(2)), (Vec(2) << 0.3, 0.2).finished());
  SensorModel s = make_sensor(Mat::Identity(2, 2), Mat::Identity(2, 2));
  Vec v(2);
  v << 0.01, -0.02;
  EXPECT_EQ(measure(s, Vec::Zero(2), v), v);
}

TEST(Model, ValidationRejectsBadInputs) {
  EXPECT_THROW(make_sensor(Mat::Identity(2, 2), Mat::Zero(2, 2)), std::invalid_argument);
  Mat C(2, 2);
  C << 1, 1, 2, 2;
  EXPECT_THROW(make_sensor(C, Mat::Identity(2, 2)), std::invalid_argument);
  Mat Q(2, 2);
  Q << 1, 0, 0, -1;
  EXPECT_THROW(make_system(Mat::Identity(2, 2), Q, Vec::Zero(2), Mat::Identity(2, 2)),
               std::invalid_argument);
  EXPECT_THROW(make_system(Mat::Identity(2, 2), Mat::Identity(3, 3), Vec::Zero(2),
                           Mat::Identity(2, 2)),
               DimensionError);
}

TEST(Model, NoiselessTrajectoryIsDeterministicRecursion) {
  Vec x0(2);
  x0 << 1.0, -2.0;
  Mat B(2, 1);
  B << 0.5, 1.0;
  Mat A(2, 2);
  A << 0.9, 0.1, 0.0, 1.1;
  SystemModel m = make_system(A, Mat::Zero(2, 2), x0, Mat::Zero(2, 2), B, Mat(),
                              InputSignal{Vec::Constant(1, 0.3), {}});
  Mat C(1, 2);
  C << 1, 1;
  SensorModel s = make_sensor(C, Mat::Identity(1, 1), Mat::Zero(1, 1), 2);
  const Trajectory t = simulate_plant(m, {s}, 20, 5, 0);
  Vec x = x0;
  for (std::size_t k = 0; k < 20; ++k) {
    EXPECT_EQ(t.states[k], x);
    EXPECT_EQ(t.measurements[0][k], C * x);
    x = A * x + B * 0.3;
  }
  EXPECT_EQ(t.states[20], x);
}

TEST(Model, TrajectoryDeterministicPerSeed) {
  const PlantPreset p = three_tank_preset();
  const Trajectory a = simulate_plant(p.model, p.sensors, 50, 17, 2);
  const Trajectory b = simulate_plant(p.model, p.sensors, 50, 17, 2);
  const Trajectory c = simulate_plant(p.model, p.sensors, 50, 18, 2);
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.measurements, b.measurements);
  EXPECT_NE(a.states, c.states);
  EXPECT_EQ(a.horizon(), 50u);
}

TEST(Model, WhiteNoiseStatistics) {
  // A = 0, Q = I: states for k ≥ 1 are the process noise itself.
  SystemModel m = make_system(Mat::Zero(2, 2), Mat::Identity(2, 2), Vec::Zero(2),
                              Mat::Identity(2, 2));
  SensorModel s = make_sensor(Mat::Identity(2, 2), Mat::Identity(2, 2));
  const std::size_t H = 100000;
  const Trajectory t = simulate_plant(m, {s}, H, 3, 0);
  Mat cov = Mat::Zero(2, 2);
  Vec lag = Vec::Zero(2);
  for (std::size_t k = 1; k <= H; ++k) {
    cov += t.states[k] * t.states[k].transpose();
    if (k > 1) lag += t.states[k].cwiseProduct(t.states[k - 1]);
  }
  cov /= double(H);
  lag /= double(H - 1);
  // Diagonal SE ≈ sqrt(2/H) ≈ 0.0045, off-diagonal ≈ 0.0032.
  EXPECT_LT((cov - Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 3 * 0.0045);
  EXPECT_LT(lag.cwiseAbs().maxCoeff(), 0.02);
}
