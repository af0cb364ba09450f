#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace ppfe {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Thrown when operands have inconsistent shapes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown for ill-posed numerics: singular systems, overflowing powers, non-finite input.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OverflowError : public NumericError {
 public:
  using NumericError::NumericError;
};

namespace linalg {

Mat symmetrize(const Mat& m);

double min_eigenvalue(const Mat& sym);
double max_eigenvalue(const Mat& sym);

/// True when the symmetric part of `m` has min eigenvalue >= -tol.
bool is_psd(const Mat& m, double tol = 1e-10);

/// Factor L with L·Lᵀ = m, via symmetric eigendecomposition with negative
/// eigenvalues clipped at zero. Rank-deficient and zero matrices are allowed.
Mat psd_factor(const Mat& m);

/// Symmetric square root of a PSD matrix.
Mat psd_sqrt(const Mat& m);

/// Symmetric inverse square root of a positive definite matrix.
Mat spd_inverse_sqrt(const Mat& m);

Mat block_diag(const std::vector<Mat>& blocks);

/// 2-norm condition number of a symmetric positive definite matrix (inf if singular).
double spd_condition(const Mat& sym);

/// ‖a − b‖_F / max(1, ‖b‖_F).
double relative_change(const Mat& a, const Mat& b);

void require_square(const Mat& m, const std::string& what);
void require_rows(const Mat& m, Eigen::Index rows, const std::string& what);
void require_size(const Vec& v, Eigen::Index size, const std::string& what);

}  // namespace linalg
}  // namespace ppfe
