#pragma once

#include <json.hpp>
#include <string>

#include "confmetric/baselines.hpp"
#include "confmetric/embedding.hpp"
#include "confmetric/evaluation.hpp"
#include "confmetric/metric.hpp"
#include "confmetric/solvers.hpp"

namespace confmetric {

using Json = nlohmann::ordered_json;

Json to_json(const Provenance& p);
/// {theory, features, kind, weights, psd_certified, provenance}; weights are
/// the stored parameters (upper triangle row by row, or the diagonal).
Json to_json(const MetricModel& m);
/// Throws DataError on a malformed document or a psd_certified flag that
/// disagrees with the weights.
MetricModel model_from_json(const Json& j);

Json to_json(const SolverConfig& cfg);
/// Missing keys keep their defaults; unknown keys and bad values throw
/// UsageError.
SolverConfig config_from_json(const Json& j);

Json to_json(const EvaluationReport& r, bool include_models = false);
Json to_json(const ComparisonResult& c);
Json to_json(const AblationReport& r);
Json to_json(const SaliencyReport& r);
Json to_json(const NaturalClassSet& s);
Json to_json(const MinimalPairAnalysis& a);
Json to_json(const Embedding& e);

/// "left_out,rho,lambda" with an empty lambda cell for baselines and OASIS.
std::string folds_csv(const EvaluationReport& r);

}  // namespace confmetric
