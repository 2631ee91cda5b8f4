#include "app.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

#include "confmetric/baselines.hpp"
#include "confmetric/csv.hpp"
#include "confmetric/embedding.hpp"
#include "confmetric/error.hpp"
#include "confmetric/evaluation.hpp"
#include "confmetric/json_io.hpp"
#include "manifest.hpp"

namespace confmetric::cli {

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

// ---------------------------------------------------------------------------
// Data sources

struct Source {
  std::string name;  // dataset name used in reports
  DistanceMatrix dm;
  std::optional<SimilarityMatrix> similarity;
  ManifestInput input;
};

/// bundled:<dataset>, distances:<csv> or a confusion-count CSV path.
Source load_source(const std::string& spec, double smoothing) {
  if (!(smoothing >= 0.0)) throw UsageError("--smoothing must be nonnegative");
  if (starts_with(spec, "bundled:")) {
    const std::string name = spec.substr(8);
    const DatasetId id = parse_dataset_id(name);
    std::optional<ConfusionMatrix> cm;
    ManifestInput in{spec, "built-in:" + name, ""};
    if (const char* dir = std::getenv("CONFMETRIC_DATA_DIR"); dir && *dir) {
      const fs::path path = fs::path(dir) / (std::string(to_string(id)) + ".csv");
      if (fs::exists(path)) {
        const std::string text = read_file(path.string());
        cm = parse_confusion_csv(text);
        in.resolved = path.string();
        in.sha256 = sha256_hex(text);
      }
    }
    if (!cm) cm = bundled_confusion(id);
    SimilarityMatrix s = shepard_similarity(*cm, smoothing);
    DistanceMatrix d = shepard_distance(s);
    return {name, std::move(d), std::move(s), std::move(in)};
  }
  if (starts_with(spec, "distances:")) {
    const std::string path = spec.substr(10);
    const std::string text = read_file(path);
    try {
      return {fs::path(path).stem().string(), parse_distance_csv(text), std::nullopt, {spec, path, sha256_hex(text)}};
    } catch (const DataError& e) {
      throw DataError(path + ": " + e.what());
    }
  }
  const std::string text = read_file(spec);
  try {
    SimilarityMatrix s = shepard_similarity(parse_confusion_csv(text), smoothing);
    DistanceMatrix d = shepard_distance(s);
    return {fs::path(spec).stem().string(), std::move(d), std::move(s), {spec, spec, sha256_hex(text)}};
  } catch (const DataError& e) {
    throw DataError(spec + ": " + e.what());
  }
}

struct DataOptions {
  std::string confusion;
  std::string distances;
  double smoothing = 0.0;
  std::string theory = "articulatory";
  std::string features;
};

void add_data_options(CLI::App* cmd, DataOptions& d, bool with_theory) {
  cmd->add_option("--confusion", d.confusion, "Confusion counts: bundled:<dataset> or a CSV path");
  cmd->add_option("--distances", d.distances, "Distance matrix CSV (square or long form)");
  cmd->add_option("--smoothing", d.smoothing, "Additive smoothing alpha for zero confusion pairs")->capture_default_str();
  if (with_theory) {
    cmd->add_option("--theory", d.theory, "Feature theory: articulatory or phonological")->capture_default_str();
    cmd->add_option("--features", d.features, "Custom feature table CSV (overrides the bundled table)");
  }
}

Source load_data(const DataOptions& d) {
  if (!d.confusion.empty() && !d.distances.empty()) throw UsageError("give either --confusion or --distances, not both");
  if (d.confusion.empty() && d.distances.empty()) throw UsageError("one of --confusion or --distances is required");
  if (!d.confusion.empty()) return load_source(d.confusion, d.smoothing);
  return load_source("distances:" + d.distances, d.smoothing);
}

/// The feature table for the chosen theory, restricted to the distance labels
/// in their order.
Inventory load_inventory_for(const DataOptions& d, const std::vector<std::string>& labels, RunManifest* manifest) {
  Inventory table = [&] {
    if (d.features.empty()) return bundled_table(parse_theory_id(d.theory));
    const std::string text = read_file(d.features);
    if (manifest) manifest->add_input({d.features, d.features, sha256_hex(text)});
    try {
      return parse_feature_table(text, fs::path(d.features).stem().string());
    } catch (const DataError& e) {
      throw DataError(d.features + ": " + e.what());
    }
  }();
  for (const auto& l : labels) {
    if (!table.find(l)) throw DataError("phoneme '" + l + "' has no row in the " + table.theory().name() + " feature table");
  }
  return table.select(labels);
}

// ---------------------------------------------------------------------------
// Solver flags

struct SolverOptions {
  std::string config;
  double lambda = 0.0;
  double c = 0.1;
  std::int64_t iterations = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  std::int64_t max_sweeps = 0;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* c_opt = nullptr;
  CLI::Option* iterations_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* tolerance_opt = nullptr;
  CLI::Option* max_sweeps_opt = nullptr;
};

void add_solver_options(CLI::App* cmd, SolverOptions& s) {
  cmd->add_option("--config", s.config, "Solver config JSON (see `defaults`); flags override it");
  s.lambda_opt = cmd->add_option("--lambda", s.lambda, "Fixed L1 weight for ls/ls-diag (default: nested selection)");
  s.c_opt = cmd->add_option("--C", s.c, "OASIS aggressiveness");
  s.iterations_opt = cmd->add_option("--iterations", s.iterations, "OASIS triplet count");
  s.seed_opt = cmd->add_option("--seed", s.seed, "Seed for every random draw");
  s.tolerance_opt = cmd->add_option("--tolerance", s.tolerance, "Coordinate-descent tolerance");
  s.max_sweeps_opt = cmd->add_option("--max-sweeps", s.max_sweeps, "Coordinate-descent sweep limit");
}

SolverConfig build_config(const SolverOptions& s, RunManifest* manifest) {
  SolverConfig cfg;
  if (!s.config.empty()) {
    const std::string text = read_file(s.config);
    if (manifest) manifest->add_input({s.config, s.config, sha256_hex(text)});
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::exception& e) {
      throw UsageError(s.config + ": " + e.what());
    }
    cfg = config_from_json(j);
  }
  if (s.lambda_opt->count()) cfg.lambda = s.lambda;
  if (s.c_opt->count()) cfg.oasis_aggressiveness = s.c;
  if (s.iterations_opt->count()) cfg.oasis_iterations = s.iterations;
  if (s.seed_opt->count()) cfg.seed = s.seed;
  if (s.tolerance_opt->count()) cfg.tolerance = s.tolerance;
  if (s.max_sweeps_opt->count()) cfg.max_sweeps = s.max_sweeps;
  cfg.validate();
  return cfg;
}

bool is_ls(Method m) { return m == Method::ls || m == Method::ls_diag; }
bool is_oasis(Method m) { return m == Method::oasis || m == Method::oasis_diag; }

void check_method_flags(Method m, const SolverOptions& s, const DataOptions& d) {
  const std::string name(to_string(m));
  if (!is_ls(m) && s.lambda_opt->count()) throw UsageError("--lambda applies to ls and ls-diag, not " + name);
  if (!is_oasis(m) && (s.c_opt->count() || s.iterations_opt->count())) {
    throw UsageError("--C and --iterations apply to oasis and oasis-diag, not " + name);
  }
  if (m == Method::pmv && d.features.empty() && parse_theory_id(d.theory) != TheoryId::articulatory) {
    throw UsageError("pmv reads place, manner and voicing from the articulatory table; use --theory articulatory");
  }
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& n : names) {
    const Method m = parse_method(n);
    if (std::find(out.begin(), out.end(), m) != out.end()) throw UsageError("method '" + n + "' given twice");
    out.push_back(m);
  }
  return out;
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(precision) << v;
  return ss.str();
}

std::string square_csv(const std::vector<std::string>& labels, const std::function<double(std::size_t, std::size_t)>& value) {
  std::string out = "phoneme";
  for (const auto& l : labels) out += ',' + csv::escape(l);
  out += '\n';
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out += csv::escape(labels[i]);
    for (std::size_t j = 0; j < labels.size(); ++j) out += ',' + csv::format_double(value(i, j));
    out += '\n';
  }
  return out;
}

std::string saliency_csv(const SaliencyReport& r) {
  std::string out = "feature,mean,sd\n";
  for (std::size_t k = 0; k < r.theory.arity(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    out += csv::escape(r.theory.feature_names()[k]) + ',' + csv::format_double(r.mean(i)) + ',' + csv::format_double(r.sd(i)) + '\n';
  }
  return out;
}

/// name=source
std::pair<std::string, std::string> split_dataset(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size()) {
    throw UsageError("--dataset expects name=source, got '" + arg + "'");
  }
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

PhonemePair split_pair(const std::string& arg) {
  const auto dash = arg.find('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 == arg.size()) throw UsageError("--pair expects a-b, got '" + arg + "'");
  return {arg.substr(0, dash), arg.substr(dash + 1)};
}

// ---------------------------------------------------------------------------
// Commands

struct Context {
  std::vector<std::string> args;
  std::ostream& out;
  std::string out_dir = ".";
  unsigned jobs = 1;
};

void cmd_distances(Context& ctx, const DataOptions& d) {
  if (!d.distances.empty()) throw UsageError("distances derives matrices from --confusion counts");
  RunManifest m("distances", ctx.args, ctx.out_dir);
  const Source src = load_data(d);
  m.add_input(src.input);
  m.set_extra("smoothing", d.smoothing);
  m.write("similarity.csv", to_square_csv(*src.similarity));
  m.write("distances.csv", to_square_csv(src.dm));
  m.write("distances_long.csv", to_long_csv(src.dm));
  m.finish();
  ctx.out << src.dm.size() << " phonemes, " << src.dm.pair_count() << " pairs -> " << (fs::path(ctx.out_dir) / "distances.csv").string()
          << '\n';
}

void cmd_fit(Context& ctx, const DataOptions& d, const SolverOptions& s, const std::string& method_name) {
  const Method method = parse_method(method_name);
  check_method_flags(method, s, d);
  RunManifest m("fit", ctx.args, ctx.out_dir);
  SolverConfig cfg = build_config(s, &m);
  cfg.method = method;
  const Source src = load_data(d);
  m.add_input(src.input);
  const Inventory inv = load_inventory_for(d, src.dm.labels(), &m);

  if (method == Method::pmv || method == Method::frisch) {
    m.set_config(to_json(cfg));
    const auto& labels = inv.phonemes();
    if (method == Method::pmv) {
      const PmvSpec spec = PmvSpec::from_articulatory(inv);
      m.write("scores.csv", square_csv(labels, [&](std::size_t i, std::size_t j) {
                return static_cast<double>(pmv_similarity(spec, labels[i], labels[j]));
              }));
    } else {
      const NaturalClassSet ncs = enumerate_natural_classes(inv);
      m.write("scores.csv", square_csv(labels, [&](std::size_t i, std::size_t j) { return frisch_similarity(ncs, i, j); }));
      m.write("natural_classes.json", to_json(ncs).dump(2) + "\n");
    }
    m.finish();
    ctx.out << to_string(method) << " similarity scores for " << labels.size() << " phonemes\n";
    return;
  }

  std::optional<MetricModel> model;
  if (method == Method::uniform) {
    model = uniform_model(inv.theory());
  } else {
    if (is_ls(method) && !cfg.lambda) {
      const LambdaSelection sel = select_lambda(inv, src.dm, cfg, ctx.jobs);
      cfg.lambda = sel.lambda;
      ctx.out << "selected lambda " << sel.lambda << " by leave-one-phoneme-out\n";
    }
    model = fit_metric(inv, src.dm, cfg);
  }
  m.set_config(to_json(cfg));
  m.write("model.json", to_json(*model).dump(2) + "\n");
  m.finish();
  ctx.out << to_string(method) << " model over " << model->arity() << " " << inv.theory().name() << " features"
          << (model->psd_certified() ? " (PSD)" : "") << '\n';
}

void cmd_evaluate(Context& ctx, const DataOptions& d, const SolverOptions& s, const std::vector<std::string>& method_names,
                  bool include_models) {
  const auto methods = parse_methods(method_names);
  if (methods.empty()) throw UsageError("evaluate needs at least one --method");
  for (Method mth : methods) {
    // --lambda with a mix of methods applies to the LS ones only.
    if (!is_ls(mth) && s.lambda_opt->count() && std::none_of(methods.begin(), methods.end(), is_ls)) check_method_flags(mth, s, d);
    if (mth == Method::pmv) check_method_flags(mth, s, d);
  }
  RunManifest m("evaluate", ctx.args, ctx.out_dir);
  const SolverConfig cfg = build_config(s, &m);
  m.set_config(to_json(cfg));
  const Source src = load_data(d);
  m.add_input(src.input);
  const Inventory inv = load_inventory_for(d, src.dm.labels(), &m);

  std::vector<EvaluationReport> reports;
  for (Method mth : methods) {
    SolverConfig mc = cfg;
    mc.method = is_learner(mth) ? mth : cfg.method;
    try {
      reports.push_back(lopo_evaluate(inv, src.dm, mth, mc, ctx.jobs));
    } catch (const SolverError& e) {
      throw SolverError(std::string(to_string(mth)) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(std::string(to_string(mth)) + ": " + e.what());
    }
  }
  Json j;
  j["dataset"] = src.name;
  j["theory"] = inv.theory().name();
  Json rj = Json::array();
  for (const auto& r : reports) rj.push_back(to_json(r, include_models));
  j["reports"] = std::move(rj);
  std::vector<ComparisonResult> comparisons;
  if (reports.size() >= 2) {
    Json cj = Json::array();
    for (std::size_t a = 0; a < reports.size(); ++a) {
      for (std::size_t b = a + 1; b < reports.size(); ++b) {
        comparisons.push_back(compare_methods(reports[a], reports[b]));
        cj.push_back(to_json(comparisons.back()));
      }
    }
    j["comparisons"] = std::move(cj);
  }
  m.write("evaluation.json", j.dump(2) + "\n");
  for (const auto& r : reports) m.write("folds_" + std::string(to_string(r.method)) + ".csv", folds_csv(r));
  m.finish();

  ctx.out << "method        mean_rho  sd_rho\n";
  for (const auto& r : reports) {
    ctx.out << std::left << std::setw(12) << to_string(r.method) << std::right << std::setw(10) << fmt(r.mean_rho) << std::setw(8)
            << fmt(r.sd_rho) << '\n';
  }
  for (const auto& c : comparisons) {
    ctx.out << c.method_a << " vs " << c.method_b << ": t = " << fmt(c.statistic, 3) << ", p = " << std::setprecision(3) << c.p_value
            << '\n';
  }
}

void cmd_ablate(Context& ctx, const DataOptions& d, const SolverOptions& s) {
  check_method_flags(Method::ls_diag, s, d);
  RunManifest m("ablate", ctx.args, ctx.out_dir);
  SolverConfig cfg = build_config(s, &m);
  cfg.method = Method::ls_diag;
  m.set_config(to_json(cfg));
  const Source src = load_data(d);
  m.add_input(src.input);
  const Inventory inv = load_inventory_for(d, src.dm.labels(), &m);
  const AblationReport r = ablate_features(inv, src.dm, cfg, ctx.jobs);
  std::string table = "feature,delta,mean_rho\n";
  for (const auto& e : r.entries) table += csv::escape(e.feature) + ',' + csv::format_double(e.delta) + ',' + csv::format_double(e.mean_rho) + '\n';
  m.write("ablation.csv", table);
  m.write("ablation.json", to_json(r).dump(2) + "\n");
  m.finish();
  ctx.out << "full mean_rho " << fmt(r.full_mean_rho) << "\nfeature  delta\n";
  for (auto it = r.entries.rbegin(); it != r.entries.rend(); ++it) ctx.out << std::left << std::setw(8) << it->feature << fmt(it->delta) << '\n';
}

Method diagonal_learner(const std::string& name) {
  const Method m = parse_method(name);
  if (m != Method::ls_diag && m != Method::oasis_diag) throw UsageError("saliency needs a diagonal learner (ls-diag or oasis-diag)");
  return m;
}

void cmd_saliency(Context& ctx, const DataOptions& d, const SolverOptions& s, const std::string& method_name) {
  const Method method = diagonal_learner(method_name);
  check_method_flags(method, s, d);
  RunManifest m("saliency", ctx.args, ctx.out_dir);
  SolverConfig cfg = build_config(s, &m);
  cfg.method = method;
  m.set_config(to_json(cfg));
  const Source src = load_data(d);
  m.add_input(src.input);
  const Inventory inv = load_inventory_for(d, src.dm.labels(), &m);
  const EvaluationReport r = lopo_evaluate(inv, src.dm, method, cfg, ctx.jobs);
  const SaliencyReport sal = feature_saliency(r);
  m.write("saliency.csv", saliency_csv(sal));
  Json j = to_json(sal);
  j["method"] = std::string(to_string(method));
  j["mean_rho"] = r.mean_rho;
  m.write("saliency.json", j.dump(2) + "\n");
  m.finish();
  std::vector<std::size_t> order(inv.arity());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sal.mean(static_cast<Eigen::Index>(a)) > sal.mean(static_cast<Eigen::Index>(b));
  });
  ctx.out << "feature     mean      sd\n";
  for (std::size_t k : order) {
    const auto i = static_cast<Eigen::Index>(k);
    ctx.out << std::left << std::setw(8) << inv.theory().feature_names()[k] << std::right << std::setw(8) << fmt(sal.mean(i))
            << std::setw(8) << fmt(sal.sd(i)) << '\n';
  }
}

void cmd_mds(Context& ctx, const DataOptions& d, int dims, const std::vector<std::string>& overlay_names) {
  std::vector<Overlay> overlays;
  for (const auto& o : overlay_names) overlays.push_back(parse_overlay(o));
  RunManifest m("mds", ctx.args, ctx.out_dir);
  const Source src = load_data(d);
  m.add_input(src.input);
  const Embedding e = classical_mds(src.dm, dims);
  m.write("embedding.csv", embedding_csv(e));
  m.write("embedding.json", to_json(e).dump(2) + "\n");
  if (dims >= 2) {
    const ScatterPlot plot = embedding_plot(e, overlays, "MDS of perceptual distances (" + src.name + ")");
    m.write("embedding.svg", render_svg(plot));
  } else if (!overlays.empty()) {
    throw UsageError("overlays need a 2-D embedding");
  }
  m.finish();
  ctx.out << "stress " << fmt(e.stress) << ", eigenvalue share " << fmt(e.eigenvalue_share) << '\n';
}

std::vector<Source> load_datasets(const std::vector<std::string>& args, double smoothing, RunManifest& m) {
  std::vector<Source> out;
  for (const auto& a : args) {
    auto [name, spec] = split_dataset(a);
    for (const auto& s : out)
      if (s.name == name) throw UsageError("dataset name '" + name + "' given twice");
    Source s = load_source(spec, smoothing);
    s.name = name;
    m.add_input(s.input);
    out.push_back(std::move(s));
  }
  return out;
}

void cmd_compare_languages(Context& ctx, const DataOptions& d, const SolverOptions& s, const std::vector<std::string>& datasets,
                           const std::string& method_name) {
  if (datasets.size() != 2) throw UsageError("compare-languages needs exactly two --dataset name=source arguments");
  const Method method = diagonal_learner(method_name);
  check_method_flags(method, s, d);
  RunManifest m("compare-languages", ctx.args, ctx.out_dir);
  SolverConfig cfg = build_config(s, &m);
  cfg.method = method;
  m.set_config(to_json(cfg));
  const auto sources = load_datasets(datasets, d.smoothing, m);
  std::vector<SaliencyReport> reports;
  Json j;
  j["method"] = std::string(to_string(method));
  Json per = Json::array();
  for (const auto& src : sources) {
    const Inventory inv = load_inventory_for(d, src.dm.labels(), &m);
    const EvaluationReport r = lopo_evaluate(inv, src.dm, method, cfg, ctx.jobs);
    reports.push_back(feature_saliency(r));
    Json sj = to_json(reports.back());
    sj["dataset"] = src.name;
    sj["mean_rho"] = r.mean_rho;
    per.push_back(std::move(sj));
  }
  const auto cmp = normalized_weight_comparison(reports[0], reports[1]);
  j["saliency"] = std::move(per);
  std::string table = "feature," + csv::escape(sources[0].name) + ',' + csv::escape(sources[1].name) + '\n';
  ScatterPlot plot;
  plot.title = "Normalised feature weights";
  plot.x_label = sources[0].name;
  plot.y_label = sources[1].name;
  plot.identity_line = true;
  Json cj = Json::array();
  for (const auto& w : cmp) {
    table += csv::escape(w.feature) + ',' + csv::format_double(w.a) + ',' + csv::format_double(w.b) + '\n';
    plot.points.push_back({w.feature, w.a, w.b});
    cj.push_back({{"feature", w.feature}, {sources[0].name, w.a}, {sources[1].name, w.b}});
  }
  j["normalized"] = std::move(cj);
  m.write("weights.csv", table);
  m.write("comparison.json", j.dump(2) + "\n");
  m.write("weights.svg", render_svg(plot));
  m.finish();
  ctx.out << "feature  " << sources[0].name << "  " << sources[1].name << '\n';
  for (const auto& w : cmp) ctx.out << std::left << std::setw(8) << w.feature << ' ' << fmt(w.a) << "  " << fmt(w.b) << '\n';
}

void cmd_minimal_pairs(Context& ctx, const DataOptions& d, const std::vector<std::string>& datasets,
                       const std::vector<std::string>& pair_args, const std::string& alternative) {
  if (datasets.size() < 2) throw UsageError("minimal-pairs needs a reference --dataset and at least one other");
  stats::Alternative alt = stats::Alternative::two_sided;
  if (alternative == "greater") {
    alt = stats::Alternative::greater;
  } else if (alternative == "less") {
    alt = stats::Alternative::less;
  } else if (alternative != "two-sided") {
    throw UsageError("--alternative must be two-sided, greater or less");
  }
  std::vector<PhonemePair> pairs;
  for (const auto& p : pair_args) pairs.push_back(split_pair(p));
  if (pairs.empty()) pairs = voicing_pairs();

  RunManifest m("minimal-pairs", ctx.args, ctx.out_dir);
  const auto sources = load_datasets(datasets, d.smoothing, m);
  std::vector<LabeledDistances> dms;
  for (const auto& s : sources) dms.push_back({s.name, s.dm});
  const MinimalPairAnalysis a = minimal_pair_analysis(dms, pairs, alt);

  std::string table = "pair";
  for (const auto& n : a.datasets) table += ',' + csv::escape(n);
  table += '\n';
  for (std::size_t k = 0; k < a.pairs.size(); ++k) {
    table += csv::escape(a.pairs[k].first + "-" + a.pairs[k].second);
    for (std::size_t ds = 0; ds < a.datasets.size(); ++ds) table += ',' + csv::format_double(a.ranks[ds][k]);
    table += '\n';
  }
  ScatterPlot plot;
  plot.title = "Minimal-pair distance ranks";
  plot.x_label = a.datasets.size() == 2 ? a.datasets[1] + " rank" : "other dataset rank";
  plot.y_label = a.datasets[0] + " rank";
  plot.identity_line = true;
  for (std::size_t ds = 1; ds < a.datasets.size(); ++ds) {
    for (std::size_t k = 0; k < a.pairs.size(); ++k) {
      std::string label = a.pairs[k].first + "-" + a.pairs[k].second;
      if (a.datasets.size() > 2) label += " (" + a.datasets[ds] + ")";
      plot.points.push_back({label, a.ranks[ds][k], a.ranks[0][k]});
    }
  }
  Json j = to_json(a);
  j["alternative"] = alternative;
  m.write("ranks.csv", table);
  m.write("minimal_pairs.json", j.dump(2) + "\n");
  m.write("ranks.svg", render_svg(plot));
  m.finish();
  ctx.out << a.shared.size() << " shared phonemes; Wilcoxon W+ = " << a.test.statistic << ", p = " << std::setprecision(4)
          << a.test.p_value << " (" << alternative << ")\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learn and evaluate perceptual metrics over phoneme feature vectors", "confmetric"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "confmetric 1.0.0");

  Context ctx{args, out};
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", ctx.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--jobs", ctx.jobs, "Worker threads for folds")->capture_default_str()->check(CLI::PositiveNumber);
  };

  DataOptions data;
  SolverOptions fit_solver, eval_solver, ablate_solver, saliency_solver, compare_solver;
  std::string method = "ls-diag";
  std::vector<std::string> methods;
  std::vector<std::string> overlays;
  std::vector<std::string> datasets;
  std::vector<std::string> pair_args;
  std::string alternative = "two-sided";
  int dims = 2;
  bool include_models = false;

  auto* distances = app.add_subcommand("distances", "Shepard similarities and distances from confusion counts");
  add_data_options(distances, data, false);
  add_common(distances);

  auto* fit = app.add_subcommand("fit", "Fit one metric (or baseline) on all pairs");
  add_data_options(fit, data, true);
  add_solver_options(fit, fit_solver);
  fit->add_option("--method", method, "ls, ls-diag, oasis, oasis-diag, uniform, pmv or frisch")->required();
  add_common(fit);

  auto* evaluate = app.add_subcommand("evaluate", "Leave-one-phoneme-out evaluation with pairwise t-tests");
  add_data_options(evaluate, data, true);
  add_solver_options(evaluate, eval_solver);
  evaluate->add_option("--method", methods, "Method to evaluate (repeatable)")->required();
  evaluate->add_flag("--models", include_models, "Include per-fold models in evaluation.json");
  add_common(evaluate);

  auto* ablate = app.add_subcommand("ablate", "Leave-one-feature-out ablation with ls-diag");
  add_data_options(ablate, data, true);
  add_solver_options(ablate, ablate_solver);
  add_common(ablate);

  auto* saliency = app.add_subcommand("saliency", "Per-feature weights across cross-validation folds");
  add_data_options(saliency, data, true);
  add_solver_options(saliency, saliency_solver);
  saliency->add_option("--method", method, "ls-diag or oasis-diag")->capture_default_str();
  add_common(saliency);

  auto* mds = app.add_subcommand("mds", "Classical MDS embedding with optional class ovals");
  add_data_options(mds, data, false);
  mds->add_option("--dims", dims, "Embedding dimension")->capture_default_str();
  mds->add_option("--overlay", overlays, "voiced, nasal, strident or approximant (repeatable)");
  add_common(mds);

  auto* compare = app.add_subcommand("compare-languages", "Normalised saliency of two datasets");
  add_data_options(compare, data, true);
  add_solver_options(compare, compare_solver);
  compare->add_option("--dataset", datasets, "name=source (exactly two)")->required();
  compare->add_option("--method", method, "ls-diag or oasis-diag")->capture_default_str();
  add_common(compare);

  auto* minimal = app.add_subcommand("minimal-pairs", "Rank comparison of minimal pairs across datasets");
  minimal->add_option("--smoothing", data.smoothing, "Additive smoothing alpha")->capture_default_str();
  minimal->add_option("--dataset", datasets, "name=source; the first is the reference (repeatable)")->required();
  minimal->add_option("--pair", pair_args, "Phoneme pair a-b (repeatable; default b-p d-t g-k z-s v-f)");
  minimal->add_option("--alternative", alternative, "two-sided, greater or less")->capture_default_str();
  add_common(minimal);

  auto* defaults = app.add_subcommand("defaults", "Print the default solver config as JSON");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::Success& e) {
      app.exit(e, out, err);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      app.exit(e, out, err);
      return kExitUsage;
    }
    ctx.args.assign(args.begin() + (args.empty() ? 0 : 1), args.end());

    if (*distances) cmd_distances(ctx, data);
    if (*fit) cmd_fit(ctx, data, fit_solver, method);
    if (*evaluate) cmd_evaluate(ctx, data, eval_solver, methods, include_models);
    if (*ablate) cmd_ablate(ctx, data, ablate_solver);
    if (*saliency) cmd_saliency(ctx, data, saliency_solver, method);
    if (*mds) cmd_mds(ctx, data, dims, overlays);
    if (*compare) cmd_compare_languages(ctx, data, compare_solver, datasets, method);
    if (*minimal) cmd_minimal_pairs(ctx, data, datasets, pair_args, alternative);
    if (*defaults) out << to_json(SolverConfig{}).dump(2) << '\n';
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace confmetric::cli
