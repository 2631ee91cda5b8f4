#include "confmetric/json_io.hpp"

#include <set>

#include "confmetric/csv.hpp"
#include "confmetric/error.hpp"

namespace confmetric {

namespace {

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

}  // namespace

Json to_json(const Provenance& p) {
  Json j;
  j["method"] = std::string(to_string(p.method));
  j["lambda"] = optional_json(p.lambda);
  j["seed"] = optional_json(p.seed);
  j["aggressiveness"] = optional_json(p.aggressiveness);
  j["iterations"] = optional_json(p.iterations);
  return j;
}

Json to_json(const MetricModel& m) {
  Json j;
  j["theory"] = m.theory().name();
  j["features"] = m.theory().feature_names();
  j["kind"] = std::string(to_string(m.kind()));
  j["weights"] = m.parameters();
  j["psd_certified"] = m.psd_certified();
  j["provenance"] = to_json(m.provenance());
  return j;
}

MetricModel model_from_json(const Json& j) {
  try {
    FeatureTheory theory(j.at("theory").get<std::string>(), j.at("features").get<std::vector<std::string>>());
    const MetricKind kind = parse_metric_kind(j.at("kind").get<std::string>());
    const auto weights = j.at("weights").get<std::vector<double>>();
    const Json& pj = j.at("provenance");
    Provenance prov{parse_method(pj.at("method").get<std::string>()), optional_from<double>(pj, "lambda"),
                    optional_from<std::uint64_t>(pj, "seed"), optional_from<double>(pj, "aggressiveness"),
                    optional_from<std::int64_t>(pj, "iterations")};
    const auto n = static_cast<Eigen::Index>(theory.arity());
    std::optional<MetricModel> model;
    if (kind == MetricKind::diagonal) {
      if (weights.size() != theory.arity()) throw DataError("diagonal model needs one weight per feature");
      model = MetricModel::diagonal(theory, Eigen::Map<const Eigen::VectorXd>(weights.data(), n), prov);
    } else {
      if (weights.size() != theory.arity() * (theory.arity() + 1) / 2) {
        throw DataError("full model needs n_f(n_f+1)/2 upper-triangle weights");
      }
      Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
      std::size_t c = 0;
      for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index k = r; k < n; ++k) w(r, k) = weights[c++];
      model = MetricModel::full(theory, w, prov);
    }
    if (j.contains("psd_certified") && j.at("psd_certified").get<bool>() != model->psd_certified()) {
      throw DataError("psd_certified flag disagrees with the weights");
    }
    return *model;
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed model JSON: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("malformed model JSON: ") + e.what());
  }
}

Json to_json(const SolverConfig& cfg) {
  Json j;
  j["method"] = std::string(to_string(cfg.method));
  j["lambda"] = optional_json(cfg.lambda);
  j["lambda_grid"] = cfg.lambda_grid;
  j["oasis_aggressiveness"] = cfg.oasis_aggressiveness;
  j["oasis_iterations"] = cfg.oasis_iterations;
  j["seed"] = optional_json(cfg.seed);
  j["tolerance"] = cfg.tolerance;
  j["max_sweeps"] = cfg.max_sweeps;
  return j;
}

SolverConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw UsageError("solver config must be a JSON object");
  static const std::set<std::string> kKeys = {"method",    "lambda", "lambda_grid", "oasis_aggressiveness", "oasis_iterations",
                                              "seed",      "tolerance", "max_sweeps"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw UsageError("unknown solver config key '" + key + "'");
  }
  SolverConfig cfg;
  try {
    if (j.contains("method")) cfg.method = parse_method(j.at("method").get<std::string>());
    if (j.contains("lambda")) cfg.lambda = optional_from<double>(j, "lambda");
    if (j.contains("lambda_grid")) cfg.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
    if (j.contains("oasis_aggressiveness")) cfg.oasis_aggressiveness = j.at("oasis_aggressiveness").get<double>();
    if (j.contains("oasis_iterations")) cfg.oasis_iterations = j.at("oasis_iterations").get<std::int64_t>();
    if (j.contains("seed")) cfg.seed = optional_from<std::uint64_t>(j, "seed");
    if (j.contains("tolerance")) cfg.tolerance = j.at("tolerance").get<double>();
    if (j.contains("max_sweeps")) cfg.max_sweeps = j.at("max_sweeps").get<std::int64_t>();
  } catch (const Json::exception& e) {
    throw UsageError(std::string("bad solver config value: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

Json to_json(const EvaluationReport& r, bool include_models) {
  Json j;
  j["method"] = std::string(to_string(r.method));
  j["theory"] = r.theory;
  j["mean_rho"] = r.mean_rho;
  j["sd_rho"] = r.sd_rho;
  Json folds = Json::array();
  for (const auto& f : r.folds) {
    Json fj;
    fj["left_out"] = f.left_out;
    fj["rho"] = f.rho;
    fj["lambda"] = optional_json(f.selected_lambda);
    if (!f.skipped_lambdas.empty()) fj["skipped_lambdas"] = f.skipped_lambdas;
    if (include_models && f.model) fj["model"] = to_json(*f.model);
    folds.push_back(std::move(fj));
  }
  j["folds"] = std::move(folds);
  return j;
}

Json to_json(const ComparisonResult& c) {
  Json j;
  j["method_a"] = c.method_a;
  j["method_b"] = c.method_b;
  j["test"] = std::string(to_string(c.test));
  j["statistic"] = c.statistic;
  j["p_value"] = c.p_value;
  return j;
}

Json to_json(const AblationReport& r) {
  Json j;
  j["full_mean_rho"] = r.full_mean_rho;
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"feature", e.feature}, {"delta", e.delta}, {"mean_rho", e.mean_rho}, {"folds", e.folds}});
  }
  j["entries"] = std::move(entries);
  return j;
}

Json to_json(const SaliencyReport& r) {
  Json j;
  j["theory"] = r.theory.name();
  j["models"] = r.models;
  Json features = Json::array();
  for (std::size_t k = 0; k < r.theory.arity(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    features.push_back({{"feature", r.theory.feature_names()[k]}, {"mean", r.mean(i)}, {"sd", r.sd(i)}});
  }
  j["features"] = std::move(features);
  return j;
}

Json to_json(const NaturalClassSet& s) {
  Json classes = Json::array();
  for (std::size_t c = 0; c < s.size(); ++c) classes.push_back(s.members(c));
  return {{"phonemes", s.labels}, {"count", s.size()}, {"classes", std::move(classes)}};
}

Json to_json(const MinimalPairAnalysis& a) {
  Json j;
  j["datasets"] = a.datasets;
  j["shared"] = a.shared;
  Json pairs = Json::array();
  for (std::size_t k = 0; k < a.pairs.size(); ++k) {
    Json ranks = Json::object();
    for (std::size_t d = 0; d < a.datasets.size(); ++d) ranks[a.datasets[d]] = a.ranks[d][k];
    pairs.push_back({{"pair", {a.pairs[k].first, a.pairs[k].second}}, {"ranks", std::move(ranks)}});
  }
  j["pairs"] = std::move(pairs);
  j["differences"] = a.differences;
  j["test"] = to_json(a.test);
  return j;
}

Json to_json(const Embedding& e) {
  Json j;
  j["stress"] = e.stress;
  j["eigenvalue_share"] = e.eigenvalue_share;
  Json points = Json::array();
  for (std::size_t i = 0; i < e.labels.size(); ++i) {
    points.push_back({{"label", e.labels[i]}, {"coords", vector_json(e.coords.row(static_cast<Eigen::Index>(i)).transpose())}});
  }
  j["points"] = std::move(points);
  return j;
}

std::string folds_csv(const EvaluationReport& r) {
  std::string out = "left_out,rho,lambda\n";
  for (const auto& f : r.folds) {
    out += csv::escape(f.left_out) + ',' + csv::format_double(f.rho) + ',';
    if (f.selected_lambda) out += csv::format_double(*f.selected_lambda);
    out += '\n';
  }
  return out;
}

}  // namespace confmetric
