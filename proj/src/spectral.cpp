#include "confmetric/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "confmetric/error.hpp"

namespace confmetric {

namespace {

constexpr double kConvergence = 1e-12;
constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

Eigen::MatrixXd Spectrum::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

Spectrum symmetric_eigendecompose(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols()) throw UsageError("eigendecomposition needs a square matrix");
  const Eigen::Index n = w.rows();
  const double scale = w.cwiseAbs().maxCoeff() + 1.0;
  if (!w.allFinite()) throw UsageError("eigendecomposition input has non-finite entries");
  if (((w - w.transpose()).cwiseAbs().maxCoeff()) > 1e-12 * scale) {
    throw UsageError("eigendecomposition needs a symmetric matrix");
  }

  Eigen::MatrixXd a = 0.5 * (w + w.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double threshold = kConvergence * std::max(a.norm(), std::numeric_limits<double>::min());

  int sweep = 0;
  while (off_diagonal_norm(a) > threshold) {
    if (++sweep > kMaxSweeps) throw SolverError("Jacobi eigensolver did not converge");
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle that annihilates a(p, q).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return a(x, x) > a(y, y); });

  Spectrum out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  for (Eigen::Index c = 0; c < n; ++c) {
    const Eigen::Index src = order[static_cast<std::size_t>(c)];
    out.eigenvalues(c) = a(src, src);
    Eigen::VectorXd col = v.col(src);
    Eigen::Index arg = 0;
    for (Eigen::Index k = 1; k < n; ++k)
      if (std::abs(col(k)) > std::abs(col(arg)) + 1e-12) arg = k;
    if (col(arg) < 0.0) col = -col;
    out.eigenvectors.col(c) = col;
  }
  return out;
}

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& w) {
  Spectrum s = symmetric_eigendecompose(w);
  if (s.eigenvalues.size() == 0) return w;
  if (s.eigenvalues.minCoeff() >= 0.0) {
    return 0.5 * (w + w.transpose());
  }
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) s.eigenvalues(i) = std::max(s.eigenvalues(i), 0.0);
  Eigen::MatrixXd p = s.reconstruct();
  return 0.5 * (p + p.transpose());
}

double min_eigenvalue(const Eigen::MatrixXd& w) {
  if (w.size() == 0) return 0.0;
  return symmetric_eigendecompose(w).eigenvalues.minCoeff();
}

}  // namespace confmetric
