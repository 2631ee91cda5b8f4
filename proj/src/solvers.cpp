#include "confmetric/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "confmetric/error.hpp"
#include "confmetric/spectral.hpp"

namespace confmetric {

std::vector<double> default_lambda_grid() {
  constexpr int kPoints = 18;
  std::vector<double> grid(kPoints);
  for (int i = 0; i < kPoints; ++i) grid[static_cast<std::size_t>(i)] = std::pow(10.0, -3.0 + 8.0 * i / (kPoints - 1));
  grid.front() = 1e-3;
  grid.back() = 1e5;
  return grid;
}

void SolverConfig::validate() const {
  if (lambda && !(*lambda >= 0.0 && std::isfinite(*lambda))) throw UsageError("lambda must be a finite value >= 0");
  if (lambda_grid.empty()) throw UsageError("lambda grid is empty");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] >= 0.0) || !std::isfinite(lambda_grid[i])) throw UsageError("lambda grid values must be finite and >= 0");
    if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1])) throw UsageError("lambda grid must be strictly increasing");
  }
  if (!(oasis_aggressiveness > 0.0) || !std::isfinite(oasis_aggressiveness)) throw UsageError("OASIS aggressiveness C must be > 0");
  if (oasis_iterations < 0) throw UsageError("OASIS iteration count must be >= 0");
  if (!(tolerance > 0.0)) throw UsageError("tolerance must be > 0");
  if (max_sweeps <= 0) throw UsageError("max_sweeps must be > 0");
}

// ---------------------------------------------------------------------------

double lasso_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double lambda) {
  return (x * w - y).squaredNorm() + lambda * w.lpNorm<1>();
}

namespace {

double kkt_from_gradient(const Eigen::VectorXd& grad, const Eigen::VectorXd& w, double lambda, bool nonnegative) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    double v = 0.0;
    if (nonnegative) {
      if (w(k) > 0.0) {
        v = std::abs(grad(k) + lambda);
      } else {
        v = std::max(0.0, -(grad(k) + lambda)) + std::max(0.0, -w(k));
      }
    } else if (w(k) != 0.0) {
      v = std::abs(grad(k) + lambda * (w(k) > 0.0 ? 1.0 : -1.0));
    } else {
      v = std::max(0.0, std::abs(grad(k)) - lambda);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

// Newton step on the current support with signs held fixed: the LASSO
// optimality system there is linear, G_AA w_A = c_A - (lambda/2) s_A. The
// minimum-norm correction keeps collinear directions where they are. When a
// weight would change sign the step is cut where it first reaches zero; the
// restricted objective is a convex quadratic minimised at the full step, so
// any shortened step still lowers it. Returns false when nothing moves.
bool polish_support(const Eigen::MatrixXd& gram, const Eigen::VectorXd& h, const Eigen::VectorXd& w, double half_lambda,
                    Eigen::VectorXd& candidate) {
  std::vector<Eigen::Index> support;
  for (Eigen::Index k = 0; k < w.size(); ++k)
    if (w(k) != 0.0) support.push_back(k);
  if (support.empty()) return false;
  const auto m = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd g(m, m);
  Eigen::VectorXd r(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index a = support[static_cast<std::size_t>(i)];
    r(i) = -(h(a) + half_lambda * (w(a) > 0.0 ? 1.0 : -1.0));
    for (Eigen::Index j = 0; j < m; ++j) g(i, j) = gram(a, support[static_cast<std::size_t>(j)]);
  }
  const Eigen::VectorXd step = g.completeOrthogonalDecomposition().solve(r);
  if (!step.allFinite() || step.isZero(0.0)) return false;
  double t = 1.0;
  Eigen::Index blocking = -1;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double wa = w(support[static_cast<std::size_t>(i)]);
    if (wa * (wa + step(i)) < 0.0) {
      const double ti = -wa / step(i);
      if (ti < t) {
        t = ti;
        blocking = i;
      }
    }
  }
  candidate = w;
  for (Eigen::Index i = 0; i < m; ++i) candidate(support[static_cast<std::size_t>(i)]) += t * step(i);
  if (blocking >= 0) candidate(support[static_cast<std::size_t>(blocking)]) = 0.0;
  return true;
}

}  // namespace

double lasso_kkt_violation(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double lambda,
                           bool nonnegative) {
  return kkt_from_gradient(2.0 * x.transpose() * (x * w - y), w, lambda, nonnegative);
}

LassoResult solve_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda, bool nonnegative,
                        double tolerance, std::int64_t max_sweeps) {
  if (x.rows() != y.size()) throw UsageError("design rows and targets differ in length");
  if (!(lambda >= 0.0)) throw UsageError("lambda must be >= 0");
  const Eigen::Index p = x.cols();
  const Eigen::MatrixXd gram = x.transpose() * x;
  const Eigen::VectorXd xty = x.transpose() * y;
  const double half_lambda = 0.5 * lambda;
  const double yty = y.squaredNorm();
  const double kkt_scale = std::max(1.0, 2.0 * xty.lpNorm<Eigen::Infinity>());

  LassoResult out;
  out.weights = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd& w = out.weights;
  double previous = yty;
  // h = G w - c, the half-gradient of the smooth part.
  Eigen::VectorXd h = -xty;
  Eigen::VectorXd candidate;
  constexpr std::int64_t kPolishEvery = 10;

  for (std::int64_t sweep = 1; sweep <= max_sweeps; ++sweep) {
    double max_step = 0.0;
    for (Eigen::Index k = 0; k < p; ++k) {
      const double gkk = gram(k, k);
      const double old = w(k);
      double updated = 0.0;
      if (gkk > 0.0) {
        const double rho = gkk * old - h(k);
        if (nonnegative) {
          updated = std::max(0.0, rho - half_lambda) / gkk;
        } else if (rho > half_lambda) {
          updated = (rho - half_lambda) / gkk;
        } else if (rho < -half_lambda) {
          updated = (rho + half_lambda) / gkk;
        }
      }
      const double delta = updated - old;
      if (delta != 0.0) {
        w(k) = updated;
        h.noalias() += delta * gram.col(k);
        max_step = std::max(max_step, std::abs(delta));
      }
    }

    // Recomputed each sweep so rounding in the incremental updates cannot
    // accumulate; ||Xw - y||^2 = w.(h - c) + y.y then costs O(p).
    h.noalias() = gram * w - xty;
    // The shortcut cancels against y.y, so its rounding scales with y.y and
    // the residual term can come out slightly negative near an exact fit.
    double objective = std::max(0.0, w.dot(h - xty) + yty) + lambda * w.lpNorm<1>();
    if (objective > previous) objective = lasso_objective(x, y, w, lambda);
    if (objective > previous + 1e-12 * (1.0 + yty)) {
      throw SolverError("coordinate descent increased the objective at sweep " + std::to_string(sweep) + " (" +
                        std::to_string(previous) + " -> " + std::to_string(objective) + ")");
    }
    out.objective_history.push_back(objective);
    previous = objective;
    out.sweeps = sweep;

    // Converged once no coordinate moves, or once w is optimal to within the
    // tolerance relative to the gradient scale. The second test matters when
    // columns are collinear: the minimiser is then not unique and coordinate
    // steps can crawl along the optimal set long after w is optimal.
    if (max_step <= tolerance * std::max(1.0, w.lpNorm<Eigen::Infinity>()) ||
        kkt_from_gradient(2.0 * h, w, lambda, nonnegative) <= tolerance * kkt_scale) {
      out.objective = lasso_objective(x, y, w, lambda);
      out.max_kkt_violation = lasso_kkt_violation(x, y, w, lambda, nonnegative);
      return out;
    }

    // Coordinate descent crawls when columns are nearly collinear. A support
    // Newton step jumps along the valley; it is kept only when it lowers the
    // objective, and later sweeps then fix the support if it was incomplete.
    if (sweep % kPolishEvery == 0 && polish_support(gram, h, w, half_lambda, candidate)) {
      const double cand_objective = lasso_objective(x, y, candidate, lambda);
      if (cand_objective < previous) {
        w = candidate;
        h.noalias() = gram * w - xty;
        out.objective_history.back() = cand_objective;
        previous = cand_objective;
        if (kkt_from_gradient(2.0 * h, w, lambda, nonnegative) <= tolerance * kkt_scale) {
          out.objective = cand_objective;
          out.max_kkt_violation = lasso_kkt_violation(x, y, w, lambda, nonnegative);
          return out;
        }
      }
    }
  }
  char kkt[32];
  std::snprintf(kkt, sizeof kkt, "%.3g", lasso_kkt_violation(x, y, w, lambda, nonnegative));
  throw SolverError("coordinate descent did not converge in " + std::to_string(max_sweeps) + " sweeps (max KKT violation " +
                    kkt + ")");
}

MetricModel fit_ls(const DesignMatrix& design, const SolverConfig& cfg) {
  cfg.validate();
  if (cfg.method != Method::ls && cfg.method != Method::ls_diag) {
    throw UsageError("fit_ls handles ls and ls-diag, not " + std::string(to_string(cfg.method)));
  }
  if (kind_of(cfg.method) != design.kind) {
    throw UsageError(std::string(to_string(cfg.method)) + " needs a " + std::string(to_string(kind_of(cfg.method))) + " design matrix");
  }
  if (!cfg.lambda) throw UsageError("fit_ls needs a lambda value");

  Provenance prov{cfg.method, cfg.lambda, std::nullopt, std::nullopt, std::nullopt};
  if (design.kind == MetricKind::diagonal) {
    LassoResult fit = solve_lasso(design.rows, design.targets, *cfg.lambda, true, cfg.tolerance, cfg.max_sweeps);
    return MetricModel::diagonal(design.theory, std::move(fit.weights), prov);
  }

  // Columns (k,l) and (l,k) are identical, so the penalty is smallest when
  // their weights are equal: solve once per unordered pair for the sum
  // s = w_kl + w_lk and split it evenly. The optimum is that of the full
  // n_f^2 problem with half the coordinates.
  const auto n = static_cast<Eigen::Index>(design.theory.arity());
  Eigen::MatrixXd merged(design.rows.rows(), n * (n + 1) / 2);
  Eigen::Index c = 0;
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = k; l < n; ++l) merged.col(c++) = design.rows.col(k * n + l);
  const LassoResult fit = solve_lasso(merged, design.targets, *cfg.lambda, false, cfg.tolerance, cfg.max_sweeps);
  Eigen::MatrixXd w(n, n);
  c = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = k; l < n; ++l) {
      const double v = fit.weights(c++);
      w(k, l) = k == l ? v : 0.5 * v;
      w(l, k) = w(k, l);
    }
  }
  return MetricModel::full(design.theory, project_psd(w), prov);
}

// ---------------------------------------------------------------------------

std::vector<Triplet> generate_triplets(const DistanceMatrix& dm, std::size_t count, std::uint64_t seed) {
  const std::size_t n = dm.size();
  bool any = false;
  for (std::size_t i = 0; i < n && !any; ++i) {
    std::optional<double> first;
    for (std::size_t j = 0; j < n && !any; ++j) {
      if (j == i) continue;
      if (!first) {
        first = dm(i, j);
      } else if (dm(i, j) != *first) {
        any = true;
      }
    }
  }
  if (!any) throw DataError("no strict triplet exists: every anchor sees equal distances to all other phonemes");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<Triplet> out;
  out.reserve(count);
  while (out.size() < count) {
    const std::size_t i = pick(rng);
    const std::size_t j = pick(rng);
    const std::size_t k = pick(rng);
    if (i == j || i == k || j == k) continue;
    const double dij = dm(i, j);
    const double dik = dm(i, k);
    if (dij < dik) {
      out.push_back({i, j, k});
    } else if (dik < dij) {
      out.push_back({i, k, j});
    }
  }
  return out;
}

MetricModel fit_oasis(const Inventory& inv, const DistanceMatrix& dm, const SolverConfig& cfg, const OasisObserver& observer) {
  cfg.validate();
  if (cfg.method != Method::oasis && cfg.method != Method::oasis_diag) {
    throw UsageError("fit_oasis handles oasis and oasis-diag, not " + std::string(to_string(cfg.method)));
  }
  if (!cfg.seed) throw UsageError("OASIS needs a seed");
  if (dm.labels() != inv.phonemes()) throw DataError("distance matrix labels do not match the inventory (same labels, same order required)");

  const bool diagonal = cfg.method == Method::oasis_diag;
  const auto n_f = static_cast<Eigen::Index>(inv.arity());
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(n_f, n_f);
  const double cap = cfg.oasis_aggressiveness;

  auto quad = [&](const Eigen::VectorXd& u) { return u.dot(w * u); };

  if (cfg.oasis_iterations > 0) {
    const auto triplets = generate_triplets(dm, static_cast<std::size_t>(cfg.oasis_iterations), *cfg.seed);
    Eigen::VectorXd up(n_f);
    Eigen::VectorXd un(n_f);
    for (const Triplet& t : triplets) {
      up = inv.row(t.anchor) - inv.row(t.positive);
      un = inv.row(t.anchor) - inv.row(t.negative);
      const double loss = 1.0 + quad(up) - quad(un);
      if (loss <= 0.0) continue;

      double norm2 = 0.0;
      if (diagonal) {
        norm2 = (un.cwiseProduct(un) - up.cwiseProduct(up)).squaredNorm();
      } else {
        const double cross = up.dot(un);
        norm2 = std::pow(un.squaredNorm(), 2) + std::pow(up.squaredNorm(), 2) - 2.0 * cross * cross;
      }
      // Identical difference vectors (possible after dropping features) give no direction.
      if (norm2 <= 0.0) continue;

      const double step = std::min(cap, loss / norm2);
      if (diagonal) {
        w.diagonal() += step * (un.cwiseProduct(un) - up.cwiseProduct(up));
      } else {
        w.noalias() += step * (un * un.transpose() - up * up.transpose());
      }
      if (observer) {
        observer(OasisUpdate{t, loss, std::max(0.0, 1.0 + quad(up) - quad(un)), step, step >= cap});
      }
    }
  }

  w = project_psd(0.5 * (w + w.transpose()));
  Provenance prov{cfg.method, std::nullopt, cfg.seed, cfg.oasis_aggressiveness, cfg.oasis_iterations};
  if (diagonal) return MetricModel::diagonal(inv.theory(), w.diagonal(), prov);
  return MetricModel::full(inv.theory(), w, prov);
}

MetricModel fit_metric(const Inventory& inv, const DistanceMatrix& dm, const SolverConfig& cfg) {
  switch (cfg.method) {
    case Method::ls:
    case Method::ls_diag: return fit_ls(build_design_matrix(inv, dm, kind_of(cfg.method)), cfg);
    case Method::oasis:
    case Method::oasis_diag: return fit_oasis(inv, dm, cfg);
    default: break;
  }
  throw UsageError(std::string(to_string(cfg.method)) + " is a baseline and has nothing to fit");
}

}  // namespace confmetric
