#include <doctest.h>

#include "axioms.hpp"
#include "confmetric/baselines.hpp"
#include "confmetric/error.hpp"
#include "confmetric/metric.hpp"
#include "confmetric/spectral.hpp"
#include "generators.hpp"

using namespace confmetric;

TEST_CASE("metric_distance examples") {
  const Inventory phon = bundled_table(TheoryId::phonological);
  const MetricModel id = uniform_model(phon.theory());
  CHECK(metric_distance(id, phon.row("p"), phon.row("p")) == 0.0);
  CHECK(metric_distance(id, phon.row("p"), phon.row("b")) == 1.0);

  Eigen::VectorXd w = Eigen::VectorXd::Zero(3);
  w(0) = 2.0;
  const MetricModel diag = MetricModel::diagonal(testsupport::Gen::theory(3), w, {});
  Eigen::VectorXd a(3), b(3);
  a << 1, 0, 1;
  b << 0, 0, 1;
  CHECK(metric_distance(diag, a, b) == 2.0);
  CHECK_THROWS_AS(metric_distance(diag, a, Eigen::VectorXd::Zero(2)), UsageError);
}

TEST_CASE("full model stores the upper triangle") {
  Eigen::MatrixXd w(2, 2);
  w << 2, 1, 5, 3;  // lower triangle ignored
  const MetricModel m = MetricModel::full(testsupport::Gen::theory(2), w, {});
  CHECK(m.matrix()(1, 0) == 1.0);
  CHECK(m.parameters() == std::vector<double>{2, 1, 3});
  CHECK(m.psd_certified());
  Eigen::MatrixXd neg(2, 2);
  neg << 1, 0, 0, -2;
  CHECK(!MetricModel::full(testsupport::Gen::theory(2), neg, {}).psd_certified());
  CHECK(!MetricModel::diagonal(testsupport::Gen::theory(2), Eigen::Vector2d(1, -1), {}).psd_certified());
}

TEST_CASE("design matrix shape and entries") {
  const Inventory inv = load_inventory(TheoryId::phonological, DatasetId::hebrew);
  testsupport::Gen gen(3);
  const DistanceMatrix dm = gen.distances(inv.phonemes());
  const DesignMatrix full = build_design_matrix(inv, dm, MetricKind::full);
  const DesignMatrix diag = build_design_matrix(inv, dm, MetricKind::diagonal);
  CHECK(full.rows.rows() == 171);
  CHECK(full.rows.cols() == 144);
  CHECK(diag.rows.cols() == 12);
  CHECK(full.rows.cwiseAbs().maxCoeff() <= 1.0);
  for (Eigen::Index r = 0; r < full.rows.rows(); ++r)
    for (Eigen::Index c = 0; c < full.rows.cols(); ++c) CHECK((full.rows(r, c) == 0.0 || std::abs(full.rows(r, c)) == 1.0));

  const std::size_t pi = inv.index("p"), bi = inv.index("b");
  const std::size_t row = dm.pair_index(std::min(pi, bi), std::max(pi, bi));
  CHECK(diag.pairs[row] == std::make_pair(std::min(pi, bi), std::max(pi, bi)));
  const auto vc = static_cast<Eigen::Index>(*inv.theory().index_of("vc"));
  for (Eigen::Index k = 0; k < 12; ++k) CHECK(diag.rows(static_cast<Eigen::Index>(row), k) == (k == vc ? 1.0 : 0.0));
  CHECK(diag.targets(static_cast<Eigen::Index>(row)) == dm(pi, bi));

  const DistanceMatrix other({"x", "y"}, {1.0});
  CHECK_THROWS_AS(build_design_matrix(inv, other, MetricKind::diagonal), DataError);
}

TEST_CASE("property: model distance equals design row times flattened weights") {
  testsupport::Gen gen(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int n_f = gen.integer(2, 6);
    const Inventory inv = gen.inventory(gen.integer(3, std::min(10, 1 << n_f)), n_f);
    const DistanceMatrix dm = gen.distances(inv.phonemes());
    for (MetricKind kind : {MetricKind::full, MetricKind::diagonal}) {
      const MetricModel m = kind == MetricKind::full
                                ? MetricModel::full(inv.theory(), gen.symmetric(n_f), {})
                                : MetricModel::diagonal(inv.theory(), Eigen::VectorXd::Random(n_f), {});
      const DesignMatrix d = build_design_matrix(inv, dm, kind);
      const Eigen::VectorXd pred = d.rows * m.flattened();
      const DistanceMatrix md = model_distances(m, inv);
      for (std::size_t r = 0; r < d.pairs.size(); ++r) {
        const auto [i, j] = d.pairs[r];
        CHECK(std::abs(pred(static_cast<Eigen::Index>(r)) - metric_distance(m, inv.row(i), inv.row(j))) <= 1e-12);
        CHECK(std::abs(md(i, j) - pred(static_cast<Eigen::Index>(r))) <= 1e-12);
      }
    }
  }
}

TEST_CASE("eigendecomposition examples") {
  const Spectrum id = symmetric_eigendecompose(Eigen::MatrixXd::Identity(4, 4));
  CHECK((id.eigenvalues.array() == 1.0).all());
  Eigen::MatrixXd d(2, 2);
  d << 1, 0, 0, 3;
  const Spectrum s = symmetric_eigendecompose(d);
  CHECK(s.eigenvalues(0) == doctest::Approx(3));
  CHECK(s.eigenvalues(1) == doctest::Approx(1));
  CHECK(std::abs(s.eigenvectors(1, 0)) == doctest::Approx(1));
  CHECK(std::abs(s.eigenvectors(0, 1)) == doctest::Approx(1));
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 2, 0, 1;
  CHECK_THROWS_AS(symmetric_eigendecompose(asym), UsageError);
  CHECK_THROWS_AS(symmetric_eigendecompose(Eigen::MatrixXd::Zero(2, 3)), UsageError);
}

TEST_CASE("property: Jacobi agrees with a reference eigensolver") {
  testsupport::Gen gen(23);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = gen.integer(1, 14);
    const Eigen::MatrixXd w = gen.symmetric(n, gen.uniform(0.01, 100.0));
    const Spectrum s = symmetric_eigendecompose(w);
    const double scale = 1.0 + w.cwiseAbs().maxCoeff();
    CHECK((s.reconstruct() - w).cwiseAbs().maxCoeff() <= 1e-8 * scale);
    CHECK((s.eigenvectors.transpose() * s.eigenvectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-8);
    for (int i = 1; i < n; ++i) CHECK(s.eigenvalues(i - 1) >= s.eigenvalues(i));
    Eigen::VectorXd ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(w).eigenvalues().reverse();
    CHECK((ref - s.eigenvalues).cwiseAbs().maxCoeff() <= 1e-9 * scale);
    CHECK(min_eigenvalue(w) == doctest::Approx(ref(n - 1)).epsilon(1e-9).scale(scale));
  }
}

TEST_CASE("project_psd") {
  Eigen::MatrixXd d(2, 2);
  d << 1, 0, 0, -2;
  Eigen::MatrixXd expected(2, 2);
  expected << 1, 0, 0, 0;
  CHECK((project_psd(d) - expected).cwiseAbs().maxCoeff() <= 1e-12);

  testsupport::Gen gen(29);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = gen.integer(2, 10);
    const Eigen::MatrixXd p = gen.psd(n, gen.integer(1, n));
    CHECK((project_psd(p) - p).cwiseAbs().maxCoeff() <= 1e-8 * (1 + p.cwiseAbs().maxCoeff()));
    const Eigen::MatrixXd w = gen.symmetric(n);
    const Eigen::MatrixXd once = project_psd(w);
    CHECK((project_psd(once) - once).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(min_eigenvalue(once) >= -kPsdTolerance);
    // reference: clamp eigenvalues from an independent solver
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
    const Eigen::MatrixXd ref = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() * es.eigenvectors().transpose();
    CHECK((once - ref).cwiseAbs().maxCoeff() <= 1e-9);
    const MetricModel m = MetricModel::full(testsupport::Gen::theory(n), once, {});
    CHECK(m.psd_certified());
  }
}

TEST_CASE("property: PSD models satisfy the metric axioms") {
  testsupport::Gen gen(31);
  for (int trial = 0; trial < 25; ++trial) {
    const int n_f = gen.integer(2, 7);
    const Inventory inv = gen.inventory(gen.integer(3, std::min(12, 1 << n_f)), n_f);
    const MetricModel m = MetricModel::full(inv.theory(), gen.psd(n_f, gen.integer(1, n_f)), {});
    CHECK(testsupport::metric_axiom_violation(m, inv).empty());
  }
}

TEST_CASE("method names") {
  CHECK(parse_method("ls_diag") == Method::ls_diag);
  CHECK(parse_method("oasis-diag") == Method::oasis_diag);
  CHECK(to_string(Method::ls_diag) == "ls-diag");
  CHECK(is_learner(Method::oasis));
  CHECK(!is_learner(Method::frisch));
  CHECK(kind_of(Method::ls) == MetricKind::full);
  CHECK_THROWS_AS(parse_method("svm"), UsageError);
}
