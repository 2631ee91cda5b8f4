#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "confmetric/distances.hpp"
#include "confmetric/inventory.hpp"
#include "confmetric/metric.hpp"
#include "confmetric/solvers.hpp"
#include "confmetric/stats.hpp"

namespace confmetric {

using stats::spearman;

struct FoldResult {
  std::string left_out;
  double rho = 0.0;
  std::optional<double> selected_lambda;
  /// Grid values excluded because a fit failed to converge.
  std::vector<double> skipped_lambdas;
  /// Fitted model; empty for baselines.
  std::optional<MetricModel> model;
};

struct EvaluationReport {
  Method method = Method::uniform;
  std::string theory;
  std::vector<FoldResult> folds;
  double mean_rho = 0.0;
  double sd_rho = 0.0;  // sample SD across folds

  std::vector<double> rhos() const;
};

enum class TestKind { paired_t_two_tailed, wilcoxon_signed_rank };
std::string_view to_string(TestKind kind);

struct ComparisonResult {
  std::string method_a;
  std::string method_b;
  double statistic = 0.0;
  double p_value = 1.0;
  TestKind test = TestKind::paired_t_two_tailed;
};

/// Spearman correlation for one fold. A fold whose predictions or targets are
/// all equal carries no ranking information and scores 0.
double fold_rho(std::span<const double> predicted, std::span<const double> empirical);

struct LambdaSelection {
  double lambda = 0.0;
  /// Mean inner rho per grid value; empty where the value was skipped.
  std::vector<std::optional<double>> mean_rho;
  std::vector<double> skipped;
  /// Eligible grid values, best mean rho first; front() == lambda.
  std::vector<double> ranked;
};

/// Inner leave-one-phoneme-out over cfg.lambda_grid, fitting cfg.method on
/// the given (training) data, and picks the grid value with the best mean
/// rho (ties go to the larger lambda). A grid value whose fit fails to
/// converge in any inner fold is skipped; SolverError if every value is.
LambdaSelection select_lambda(const Inventory& inv, const DistanceMatrix& dm, const SolverConfig& cfg, unsigned jobs = 1);

/// Leave-one-phoneme-out evaluation. Learners are refit per fold (ls methods
/// select lambda by nested leave-one-out unless cfg.lambda is fixed, taking
/// the best-ranked grid value whose training-set fit converges; OASIS
/// folds use seeds derived from cfg.seed). Baselines are scored directly.
/// Folds run on up to `jobs` threads; results are in inventory order.
/// Throws DataError when a fold would have fewer than 3 test pairs.
EvaluationReport lopo_evaluate(const Inventory& inv, const DistanceMatrix& dm, Method method, const SolverConfig& cfg,
                               unsigned jobs = 1);

/// Seed used by fold `fold` of a run seeded with `seed`.
std::uint64_t fold_seed(std::uint64_t seed, std::size_t fold);

/// Paired two-tailed t-test on per-fold rho (a - b). Throws DataError when
/// the fold labels differ.
ComparisonResult compare_methods(const EvaluationReport& a, const EvaluationReport& b);

struct AblationEntry {
  std::string feature;
  double delta = 0.0;     // full mean rho minus ablated mean rho
  double mean_rho = 0.0;  // ablated mean rho
  std::size_t folds = 0;
};

struct AblationReport {
  double full_mean_rho = 0.0;
  std::vector<AblationEntry> entries;  // ascending by delta
};

/// Leave-one-feature-out with ls-diag (cfg.method is overridden).
AblationReport ablate_features(const Inventory& inv, const DistanceMatrix& dm, const SolverConfig& cfg, unsigned jobs = 1);

struct SaliencyReport {
  FeatureTheory theory;
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;  // sample SD; 0 for a single model
  std::size_t models = 0;
};

/// Per-feature mean and SD of diagonal weights. Throws UsageError for an
/// empty list, full-kind models or mixed theories.
SaliencyReport feature_saliency(std::span<const MetricModel> models);
SaliencyReport feature_saliency(const EvaluationReport& report);

struct NormalizedWeight {
  std::string feature;
  double a = 0.0;
  double b = 0.0;
};

/// L1-normalised mean weights of two reports on the same theory, paired by
/// feature. Throws DataError when either total is zero.
std::vector<NormalizedWeight> normalized_weight_comparison(const SaliencyReport& a, const SaliencyReport& b);

struct LabeledDistances {
  std::string name;
  DistanceMatrix dm;
};

using PhonemePair = std::pair<std::string, std::string>;

/// b-p, d-t, g-k, z-s, v-f.
std::vector<PhonemePair> voicing_pairs();

struct MinimalPairAnalysis {
  std::vector<std::string> datasets;
  std::vector<std::string> shared;
  std::vector<PhonemePair> pairs;
  /// ranks[d][k]: average rank of pair k among all pairwise distances of
  /// dataset d restricted to the shared labels.
  std::vector<std::vector<double>> ranks;
  /// Reference (first dataset) rank minus other rank, grouped by other
  /// dataset then pair.
  std::vector<double> differences;
  ComparisonResult test;
};

/// Restricts every dataset to the labels all of them share, ranks the
/// distances, and runs a Wilcoxon signed-rank test on reference-minus-other
/// rank differences. Throws DataError if a pair is not in the shared subset.
MinimalPairAnalysis minimal_pair_analysis(std::span<const LabeledDistances> dms, std::span<const PhonemePair> pairs,
                                          stats::Alternative alternative = stats::Alternative::two_sided);

}  // namespace confmetric
