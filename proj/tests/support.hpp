#pragma once

// Independent reference implementations and random generators used by the tests.
// Nothing here calls into the library's estimator or analysis code.

#include "ppfe/model.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace testsupport {

using ppfe::Mat;
using ppfe::Vec;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  Mat matrix(Eigen::Index r, Eigen::Index c, double scale = 1.0) {
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = uniform(-scale, scale);
    return m;
  }
  /// G Gᵀ + floor·I.
  Mat spd(Eigen::Index n, double floor = 0.1) {
    const Mat g = matrix(n, n);
    return g * g.transpose() + floor * Mat::Identity(n, n);
  }
  Mat psd(Eigen::Index n, Eigen::Index rank) {
    const Mat g = matrix(n, rank);
    return g * g.transpose();
  }
  Vec vector(Eigen::Index n, double scale = 1.0) { return matrix(n, 1, scale); }
  /// Full-row-rank matrix.
  Mat full_row_rank(Eigen::Index r, Eigen::Index c) {
    for (;;) {
      Mat m = matrix(r, c);
      if (Eigen::FullPivLU<Mat>(m).rank() == r) return m;
    }
  }

 private:
  std::mt19937_64 eng_;
};

/// Textbook Kalman filter over stacked measurements, Joseph-form covariance update,
/// explicit inverse. Step 0 fuses y_0 into the prior (x̄0, P̄0).
struct TextbookKalman {
  std::vector<Vec> x;
  std::vector<Mat> P;
};

inline TextbookKalman textbook_kalman(const Mat& A, const Mat& B, const Mat& Qeff,
                                      const Vec& x0, const Mat& P0, const Mat& C, const Mat& R,
                                      const std::vector<Vec>& ys, const std::vector<Vec>& us) {
  TextbookKalman out;
  Vec x = x0;
  Mat P = P0;
  const Eigen::Index n = A.rows();
  for (std::size_t k = 0; k < ys.size(); ++k) {
    if (k > 0) {
      x = A * x + B * us[k - 1];
      P = A * P * A.transpose() + Qeff;
    }
    const Mat S = C * P * C.transpose() + R;
    const Mat K = P * C.transpose() * S.inverse();
    x = x + K * (ys[k] - C * x);
    const Mat IKC = Mat::Identity(n, n) - K * C;
    P = IKC * P * IKC.transpose() + K * R * K.transpose();
    out.x.push_back(x);
    out.P.push_back(P);
  }
  return out;
}

/// Standard Riccati map iterated to a fixed point.
inline Mat standard_riccati_fixed_point(const Mat& A, const Mat& Q, const Mat& C, const Mat& R,
                                        int max_iter = 100000, double tol = 1e-14) {
  Mat X = Q;
  for (int it = 0; it < max_iter; ++it) {
    const Mat S = C * X * C.transpose() + R;
    const Mat next = A * X * A.transpose() + Q -
                     A * X * C.transpose() * S.inverse() * C * X * A.transpose();
    const double change = (next - X).norm();
    X = 0.5 * (next + next.transpose());
    if (change < tol * std::max(1.0, X.norm())) break;
  }
  return X;
}

/// Full γ-weighted stacking with zero rows for dropped channels; pseudo-inverse of the
/// (possibly singular) innovation covariance.
inline Mat gamma_weighted_update(const Mat& P, const std::vector<Mat>& Cs,
                                 const std::vector<Mat>& Rs, const std::vector<int>& gamma) {
  Eigen::Index rows = 0;
  for (const auto& c : Cs) rows += c.rows();
  Mat C = Mat::Zero(rows, P.cols());
  Mat R = Mat::Zero(rows, rows);
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < Cs.size(); ++i) {
    const auto d = Cs[i].rows();
    C.middleRows(r, d) = gamma[i] * Cs[i];
    R.block(r, r, d, d) = double(gamma[i] * gamma[i]) * Rs[i];
    r += d;
  }
  const Mat S = C * P * C.transpose() + R;
  const Mat Sp = S.completeOrthogonalDecomposition().pseudoInverse();
  const Mat K = P * C.transpose() * Sp;
  return P - K * S * K.transpose();
}

inline double min_eig(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff();
}

}  // namespace testsupport
