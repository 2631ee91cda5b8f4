#include "confmetric/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>

#include "confmetric/baselines.hpp"
#include "confmetric/error.hpp"
#include "parallel.hpp"

namespace confmetric {

std::string_view to_string(TestKind kind) {
  return kind == TestKind::paired_t_two_tailed ? "paired_t_two_tailed" : "wilcoxon_signed_rank";
}

std::vector<double> EvaluationReport::rhos() const {
  std::vector<double> out;
  out.reserve(folds.size());
  for (const auto& f : folds) out.push_back(f.rho);
  return out;
}

double fold_rho(std::span<const double> predicted, std::span<const double> empirical) {
  if (stats::is_constant(predicted) || stats::is_constant(empirical)) return 0.0;
  return stats::spearman(predicted, empirical);
}

std::uint64_t fold_seed(std::uint64_t seed, std::size_t fold) {
  // splitmix64 finaliser over the seed offset by the fold number.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(fold) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

std::vector<std::string> all_but(const std::vector<std::string>& labels, std::size_t skip) {
  std::vector<std::string> out;
  out.reserve(labels.size() - 1);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (i != skip) out.push_back(labels[i]);
  return out;
}

template <typename F>
auto in_context(const std::string& context, F&& f) {
  try {
    return f();
  } catch (const SolverError& e) {
    throw SolverError(context + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(context + ": " + e.what());
  }
}

/// Model distances from phoneme p to every other phoneme, paired with the
/// empirical ones, in inventory order.
double score_left_out(const MetricModel& model, const Inventory& inv, const DistanceMatrix& dm, std::size_t p) {
  std::vector<double> predicted;
  std::vector<double> empirical;
  const FeatureVector anchor = inv.row(p);
  for (std::size_t q = 0; q < inv.size(); ++q) {
    if (q == p) continue;
    predicted.push_back(model.distance(anchor, inv.row(q)));
    empirical.push_back(dm(p, q));
  }
  return fold_rho(predicted, empirical);
}

bool is_ls(Method m) { return m == Method::ls || m == Method::ls_diag; }

void check_aligned(const Inventory& inv, const DistanceMatrix& dm) {
  if (dm.labels() != inv.phonemes()) {
    throw DataError("distance matrix labels do not match the inventory (same labels, same order required)");
  }
}

void check_fold_size(std::size_t n_p) {
  if (n_p < 4) {
    throw DataError("leave-one-phoneme-out needs at least 3 test pairs per fold; the inventory has only " +
                    std::to_string(n_p) + " phonemes");
  }
}

}  // namespace

LambdaSelection select_lambda(const Inventory& inv, const DistanceMatrix& dm, const SolverConfig& cfg, unsigned jobs) {
  cfg.validate();
  if (!is_ls(cfg.method)) {
    throw UsageError("lambda selection applies to ls and ls-diag only");
  }
  check_aligned(inv, dm);
  if (inv.size() < 3) throw DataError("lambda selection needs at least 3 phonemes");

  const std::size_t n = inv.size();
  const std::size_t g = cfg.lambda_grid.size();
  std::vector<std::vector<double>> rho(n, std::vector<double>(g, 0.0));
  // A grid value that fails once is out for every fold, so later folds skip it.
  std::unique_ptr<std::atomic<bool>[]> failed(new std::atomic<bool>[g]);
  for (std::size_t k = 0; k < g; ++k) failed[k] = false;
  detail::parallel_for(n, jobs, [&](std::size_t q) {
    const auto keep = all_but(inv.phonemes(), q);
    const Inventory sub_inv = inv.select(keep);
    const DesignMatrix design = build_design_matrix(sub_inv, restrict(dm, keep), kind_of(cfg.method));
    SolverConfig inner = cfg;
    for (std::size_t k = 0; k < g; ++k) {
      if (failed[k]) continue;
      inner.lambda = cfg.lambda_grid[k];
      try {
        rho[q][k] = score_left_out(fit_ls(design, inner), inv, dm, q);
      } catch (const SolverError&) {
        failed[k] = true;
      }
    }
  });

  LambdaSelection out;
  out.mean_rho.resize(g);
  double best_mean = -2.0;
  bool any = false;
  for (std::size_t k = 0; k < g; ++k) {
    if (failed[k]) {
      out.skipped.push_back(cfg.lambda_grid[k]);
      continue;
    }
    double sum = 0.0;
    for (std::size_t q = 0; q < n; ++q) sum += rho[q][k];
    const double m = sum / static_cast<double>(n);
    out.mean_rho[k] = m;
    if (m >= best_mean) {
      best_mean = m;
      out.lambda = cfg.lambda_grid[k];
      any = true;
    }
  }
  if (!any) {
    throw SolverError("no lambda on the grid converged within " + std::to_string(cfg.max_sweeps) + " sweeps");
  }
  for (std::size_t k = g; k-- > 0;)
    if (out.mean_rho[k]) out.ranked.push_back(cfg.lambda_grid[k]);
  // Larger lambda first among equals, matching the choice above.
  std::stable_sort(out.ranked.begin(), out.ranked.end(), [&](double a, double b) {
    const auto ia = std::find(cfg.lambda_grid.begin(), cfg.lambda_grid.end(), a) - cfg.lambda_grid.begin();
    const auto ib = std::find(cfg.lambda_grid.begin(), cfg.lambda_grid.end(), b) - cfg.lambda_grid.begin();
    return *out.mean_rho[static_cast<std::size_t>(ia)] > *out.mean_rho[static_cast<std::size_t>(ib)];
  });
  return out;
}

EvaluationReport lopo_evaluate(const Inventory& inv, const DistanceMatrix& dm, Method method, const SolverConfig& cfg,
                               unsigned jobs) {
  cfg.validate();
  check_aligned(inv, dm);
  check_fold_size(inv.size());

  EvaluationReport report;
  report.method = method;
  report.theory = inv.theory().name();
  report.folds.resize(inv.size());
  const auto& labels = inv.phonemes();

  if (!is_learner(method)) {
    const DistanceMatrix scores = baseline_distances(method, inv);
    for (std::size_t p = 0; p < inv.size(); ++p) {
      std::vector<double> predicted;
      std::vector<double> empirical;
      for (std::size_t q = 0; q < inv.size(); ++q) {
        if (q == p) continue;
        predicted.push_back(scores(p, q));
        empirical.push_back(dm(p, q));
      }
      report.folds[p] = FoldResult{labels[p], fold_rho(predicted, empirical), std::nullopt, {}, std::nullopt};
    }
  } else {
    detail::parallel_for(inv.size(), jobs, [&](std::size_t p) {
      in_context(std::string(to_string(method)) + " fold '" + labels[p] + "'", [&] {
        const auto keep = all_but(labels, p);
        const Inventory train_inv = inv.select(keep);
        const DistanceMatrix train_dm = restrict(dm, keep);
        SolverConfig fold_cfg = cfg;
        fold_cfg.method = method;
        std::vector<double> skipped;
        std::optional<MetricModel> model;
        if ((method == Method::ls || method == Method::ls_diag) && !fold_cfg.lambda) {
          LambdaSelection sel = select_lambda(train_inv, train_dm, fold_cfg);
          skipped = std::move(sel.skipped);
          // Best inner score first; fall back down the ranking if the fit on
          // the whole training set does not converge.
          for (std::size_t r = 0; r < sel.ranked.size() && !model; ++r) {
            fold_cfg.lambda = sel.ranked[r];
            try {
              model = fit_metric(train_inv, train_dm, fold_cfg);
            } catch (const SolverError&) {
              if (r + 1 == sel.ranked.size()) throw;
              skipped.push_back(sel.ranked[r]);
            }
          }
          std::sort(skipped.begin(), skipped.end());
        } else {
          if (!is_ls(method) && cfg.seed) fold_cfg.seed = fold_seed(*cfg.seed, p);
          model = fit_metric(train_inv, train_dm, fold_cfg);
        }
        const double rho = score_left_out(*model, inv, dm, p);
        const std::optional<double> lambda = is_ls(method) ? fold_cfg.lambda : std::nullopt;
        report.folds[p] = FoldResult{labels[p], rho, lambda, std::move(skipped), std::move(model)};
        return 0;
      });
    });
  }

  const auto rhos = report.rhos();
  report.mean_rho = stats::mean(rhos);
  report.sd_rho = stats::sample_sd(rhos);
  return report;
}

ComparisonResult compare_methods(const EvaluationReport& a, const EvaluationReport& b) {
  if (a.folds.size() != b.folds.size()) throw DataError("reports have different fold counts");
  for (std::size_t i = 0; i < a.folds.size(); ++i) {
    if (a.folds[i].left_out != b.folds[i].left_out) {
      throw DataError("reports disagree on fold " + std::to_string(i) + " ('" + a.folds[i].left_out + "' vs '" +
                      b.folds[i].left_out + "')");
    }
  }
  const auto ra = a.rhos();
  const auto rb = b.rhos();
  const auto t = stats::paired_t_test(ra, rb);
  return {std::string(to_string(a.method)), std::string(to_string(b.method)), t.statistic, t.p_value,
          TestKind::paired_t_two_tailed};
}

AblationReport ablate_features(const Inventory& inv, const DistanceMatrix& dm, const SolverConfig& cfg, unsigned jobs) {
  SolverConfig ls = cfg;
  ls.method = Method::ls_diag;
  AblationReport out;
  out.full_mean_rho = lopo_evaluate(inv, dm, Method::ls_diag, ls, jobs).mean_rho;
  for (const auto& feature : inv.theory().feature_names()) {
    const Inventory reduced = drop_feature(inv, feature);
    const EvaluationReport r =
        in_context("without feature '" + feature + "'", [&] { return lopo_evaluate(reduced, dm, Method::ls_diag, ls, jobs); });
    out.entries.push_back({feature, out.full_mean_rho - r.mean_rho, r.mean_rho, r.folds.size()});
  }
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const AblationEntry& x, const AblationEntry& y) { return x.delta < y.delta; });
  return out;
}

SaliencyReport feature_saliency(std::span<const MetricModel> models) {
  if (models.empty()) throw UsageError("saliency needs at least one model");
  const FeatureTheory& theory = models.front().theory();
  const auto n_f = static_cast<Eigen::Index>(theory.arity());
  Eigen::MatrixXd w(static_cast<Eigen::Index>(models.size()), n_f);
  for (std::size_t m = 0; m < models.size(); ++m) {
    if (models[m].kind() != MetricKind::diagonal) throw UsageError("saliency is defined for diagonal models only");
    if (!(models[m].theory() == theory)) throw UsageError("saliency models use different feature theories");
    w.row(static_cast<Eigen::Index>(m)) = models[m].diagonal_weights().transpose();
  }
  SaliencyReport out{theory, w.colwise().mean().transpose(), Eigen::VectorXd::Zero(n_f), models.size()};
  if (models.size() > 1) {
    for (Eigen::Index k = 0; k < n_f; ++k) {
      const double ss = (w.col(k).array() - out.mean(k)).square().sum();
      out.sd(k) = std::sqrt(ss / static_cast<double>(models.size() - 1));
    }
  }
  return out;
}

SaliencyReport feature_saliency(const EvaluationReport& report) {
  std::vector<MetricModel> models;
  for (const auto& f : report.folds) {
    if (!f.model) throw UsageError(std::string(to_string(report.method)) + " has no fitted weights");
    models.push_back(*f.model);
  }
  return feature_saliency(models);
}

std::vector<NormalizedWeight> normalized_weight_comparison(const SaliencyReport& a, const SaliencyReport& b) {
  if (!(a.theory == b.theory)) throw UsageError("weight comparison needs reports on the same feature theory");
  const double sa = a.mean.cwiseAbs().sum();
  const double sb = b.mean.cwiseAbs().sum();
  if (sa == 0.0 || sb == 0.0) throw DataError("cannot normalise a weight vector that sums to zero");
  std::vector<NormalizedWeight> out;
  for (std::size_t k = 0; k < a.theory.arity(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    out.push_back({a.theory.feature_names()[k], a.mean(i) / sa, b.mean(i) / sb});
  }
  return out;
}

std::vector<PhonemePair> voicing_pairs() {
  return {{"b", "p"}, {"d", "t"}, {"g", "k"}, {"z", "s"}, {"v", "f"}};
}

MinimalPairAnalysis minimal_pair_analysis(std::span<const LabeledDistances> dms, std::span<const PhonemePair> pairs,
                                          stats::Alternative alternative) {
  if (dms.size() < 2) throw UsageError("minimal-pair analysis needs a reference dataset and at least one other");
  if (pairs.empty()) throw UsageError("minimal-pair analysis needs at least one pair");

  MinimalPairAnalysis out;
  std::vector<std::vector<std::string>> label_sets;
  for (const auto& d : dms) {
    out.datasets.push_back(d.name);
    label_sets.push_back(d.dm.labels());
  }
  out.shared = shared_labels(label_sets);
  out.pairs.assign(pairs.begin(), pairs.end());
  for (const auto& [a, b] : out.pairs) {
    if (a == b) throw UsageError("pair '" + a + "'-'" + b + "' repeats a phoneme");
    for (const auto& l : {a, b}) {
      if (std::find(out.shared.begin(), out.shared.end(), l) == out.shared.end()) {
        throw DataError("phoneme '" + l + "' is not shared by all datasets");
      }
    }
  }

  for (const auto& d : dms) {
    const DistanceMatrix r = restrict(d.dm, out.shared);
    const auto ranks = stats::average_ranks(r.packed());
    std::vector<double> pair_ranks;
    for (const auto& [a, b] : out.pairs) {
      std::size_t i = r.index(a);
      std::size_t j = r.index(b);
      if (i > j) std::swap(i, j);
      pair_ranks.push_back(ranks[r.pair_index(i, j)]);
    }
    out.ranks.push_back(std::move(pair_ranks));
  }
  for (std::size_t d = 1; d < out.ranks.size(); ++d)
    for (std::size_t k = 0; k < out.pairs.size(); ++k) out.differences.push_back(out.ranks[0][k] - out.ranks[d][k]);

  const auto w = stats::wilcoxon_signed_rank(out.differences, alternative);
  std::string others;
  for (std::size_t d = 1; d < out.datasets.size(); ++d) others += (d > 1 ? "+" : "") + out.datasets[d];
  out.test = {out.datasets[0], others, w.statistic, w.p_value, TestKind::wilcoxon_signed_rank};
  return out;
}

}  // namespace confmetric
