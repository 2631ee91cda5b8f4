#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "confmetric/distances.hpp"
#include "confmetric/inventory.hpp"
#include "confmetric/metric.hpp"

namespace confmetric {

/// 18 log-uniform values from 1e-3 to 1e5 inclusive.
std::vector<double> default_lambda_grid();

struct SolverConfig {
  Method method = Method::ls_diag;
  /// Fixed regularisation weight. When unset, evaluation selects it from
  /// lambda_grid and fit_ls refuses to run.
  std::optional<double> lambda;
  std::vector<double> lambda_grid = default_lambda_grid();
  double oasis_aggressiveness = 0.1;
  std::int64_t oasis_iterations = 100000;
  /// Required by OASIS; every random draw derives from it.
  std::optional<std::uint64_t> seed;
  double tolerance = 1e-10;
  std::int64_t max_sweeps = 10000;

  /// Throws UsageError on a violated invariant.
  void validate() const;
  bool operator==(const SolverConfig&) const = default;
};

// ---------------------------------------------------------------------------
// L1-regularised least squares

struct LassoResult {
  Eigen::VectorXd weights;
  std::int64_t sweeps = 0;
  double objective = 0.0;
  double max_kkt_violation = 0.0;
  std::vector<double> objective_history;  // after each sweep
};

/// ||X w - y||^2 + lambda * ||w||_1
double lasso_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double lambda);

/// Largest violation of the optimality conditions of lasso_objective (with
/// w >= 0 when `nonnegative`).
double lasso_kkt_violation(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double lambda,
                           bool nonnegative);

/// Cyclic coordinate descent with soft-thresholding (clamped at zero when
/// `nonnegative`), starting from w = 0. Stops once no coordinate moves by
/// more than tolerance * max(1, |w|_inf) in a sweep, or once the KKT
/// violation is at most tolerance * max(1, |2 X^T y|_inf). Throws SolverError
/// on non-convergence or if a sweep increases the objective.
LassoResult solve_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda, bool nonnegative,
                        double tolerance, std::int64_t max_sweeps);

/// Fits ls (full design) or ls-diag (diagonal design) at cfg.lambda.
/// Full weights are symmetrised and projected onto the PSD cone; diagonal
/// weights are nonnegative and PSD as solved.
MetricModel fit_ls(const DesignMatrix& design, const SolverConfig& cfg);

// ---------------------------------------------------------------------------
// Triplet ranking

struct Triplet {
  std::size_t anchor = 0;
  std::size_t positive = 0;  // closer to the anchor
  std::size_t negative = 0;  // farther from the anchor

  bool operator==(const Triplet&) const = default;
};

/// Uniform draws of (i, j, k), pairwise distinct, with D(i,j) < D(i,k)
/// strictly. Tied draws are redrawn. Throws DataError when no anchor sees two
/// different distances.
std::vector<Triplet> generate_triplets(const DistanceMatrix& dm, std::size_t count, std::uint64_t seed);

struct OasisUpdate {
  Triplet triplet;
  double loss_before = 0.0;
  double loss_after = 0.0;
  double step = 0.0;
  bool clipped = false;  // step hit the aggressiveness cap
};

using OasisObserver = std::function<void(const OasisUpdate&)>;

/// Passive-aggressive ranking: starts from W = I and, for each triplet with
/// positive hinge loss 1 + d(i,j) - d(i,k), steps along
/// u_k u_k^T - u_j u_j^T (only its diagonal for oasis-diag) with size
/// min(C, loss / ||V||_F^2). The result is projected onto the PSD cone once.
/// `observer`, when set, sees every non-passive update.
MetricModel fit_oasis(const Inventory& inv, const DistanceMatrix& dm, const SolverConfig& cfg,
                      const OasisObserver& observer = {});

/// Dispatches on cfg.method to fit_ls or fit_oasis.
MetricModel fit_metric(const Inventory& inv, const DistanceMatrix& dm, const SolverConfig& cfg);

}  // namespace confmetric
