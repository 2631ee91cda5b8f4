#pragma once

#include <Eigen/Dense>

namespace confmetric {

/// Eigenpairs of a symmetric matrix: eigenvalues in descending order, the
/// matching orthonormal eigenvectors as columns.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  Eigen::MatrixXd reconstruct() const;
};

/// Eigenvalues in (-kPsdTolerance, 0) count as zero.
inline constexpr double kPsdTolerance = 1e-10;

/// Cyclic Jacobi eigensolver. Rotations continue until the off-diagonal
/// Frobenius norm falls below 1e-12 relative to the input norm. Each
/// eigenvector is normalised so that its largest-magnitude entry is positive.
/// Throws UsageError for non-square or non-symmetric input and SolverError if
/// 100 sweeps do not converge.
Spectrum symmetric_eigendecompose(const Eigen::MatrixXd& w);

/// Nearest PSD matrix in Frobenius norm: V max(L, 0) V^T.
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& w);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& w);

}  // namespace confmetric
