#include "ppfe/linalg.hpp"

#include <cmath>
#include <limits>

namespace ppfe::linalg {

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

double min_eigenvalue(const Mat& sym) {
  if (sym.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(sym), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const Mat& sym) {
  if (sym.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(sym), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

bool is_psd(const Mat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (!m.allFinite()) return false;
  return min_eigenvalue(m) >= -tol;
}

Mat psd_factor(const Mat& m) {
  require_square(m, "covariance");
  if (m.size() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m));
  Vec root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

Mat psd_sqrt(const Mat& m) {
  require_square(m, "matrix");
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m));
  Vec root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

Mat spd_inverse_sqrt(const Mat& m) {
  require_square(m, "matrix");
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m));
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw NumericError("inverse square root of a matrix that is not positive definite");
  }
  Vec inv_root = es.eigenvalues().cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv_root.asDiagonal() * es.eigenvectors().transpose();
}

Mat block_diag(const std::vector<Mat>& blocks) {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Mat out = Mat::Zero(rows, cols);
  Eigen::Index r = 0;
  Eigen::Index c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

double spd_condition(const Mat& sym) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(sym), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

double relative_change(const Mat& a, const Mat& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

void require_square(const Mat& m, const std::string& what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(what + " must be square, got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

void require_rows(const Mat& m, Eigen::Index rows, const std::string& what) {
  if (m.rows() != rows) {
    throw DimensionError(what + ": expected " + std::to_string(rows) + " rows, got " +
                         std::to_string(m.rows()));
  }
}

void require_size(const Vec& v, Eigen::Index size, const std::string& what) {
  if (v.size() != size) {
    throw DimensionError(what + ": expected length " + std::to_string(size) + ", got " +
                         std::to_string(v.size()));
  }
}

}  // namespace ppfe::linalg
