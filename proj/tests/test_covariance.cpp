#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "graph_deconv/bounds.hpp"
#include "graph_deconv/covariance.hpp"
#include "graph_deconv/simulation.hpp"
#include "graph_deconv/synthetic.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace graph_deconv;

namespace {
SignalEnsemble spectral(const Eigen::MatrixXd& m) { return {m, Domain::spectral}; }
}

TEST(EmpiricalCovariance, Examples) {
  EXPECT_EQ(empirical_covariance(spectral(Eigen::Vector2d(1, 2))).entries,
            (Eigen::Matrix2d() << 1, 2, 2, 4).finished());
  EXPECT_EQ(empirical_covariance(spectral(Eigen::Matrix2d::Identity())).entries,
            (Eigen::Matrix2d() << 0.5, 0, 0, 0.5).finished());
}

TEST(EmpiricalCovariance, MatchesNaiveSummation) {
  const Eigen::MatrixXd s = oracle::random_matrix(4, 7, 21);
  EXPECT_LE((empirical_covariance(spectral(s)).entries - oracle::naive_covariance(s)).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(EmpiricalCovariance, SymmetricPositiveSemidefinite) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = empirical_covariance(spectral(oracle::random_matrix(9, 1 + seed % 12, seed))).entries;
    EXPECT_EQ(c, c.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(EmpiricalCovariance, Errors) {
  EXPECT_THROW(empirical_covariance(spectral(Eigen::MatrixXd(3, 0))), InvalidArgument);
  EXPECT_THROW(empirical_covariance(SignalEnsemble{Eigen::MatrixXd::Zero(3, 2), Domain::vertex}),
               InvalidArgument);
}

TEST(EmpiricalKurtosis, Examples) {
  EXPECT_DOUBLE_EQ(empirical_kurtosis(spectral(Eigen::MatrixXd::Constant(3, 5, -1.5))), std::pow(1.5, 4));
  EXPECT_EQ(empirical_kurtosis(spectral(Eigen::MatrixXd::Zero(3, 5))), 0.0);
  const Eigen::MatrixXd s = oracle::random_matrix(6, 40, 8);
  EXPECT_NEAR(empirical_kurtosis(spectral(s)), oracle::naive_fourth_moment(s), 1e-12);
  EXPECT_THROW(empirical_kurtosis(spectral(Eigen::MatrixXd(3, 0))), InvalidArgument);
}

TEST(SourceGraph, DiagonalCovarianceHasNoEdges) {
  const auto sg = build_source_graph({Eigen::Vector3d(1, 2, 3).asDiagonal()}, 0.01);
  EXPECT_TRUE(sg.graph.edges().empty());
  EXPECT_FALSE(sg.connected);
}

TEST(SourceGraph, PositiveCovarianceAtZeroThresholdIsComplete) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Constant(5, 5, 0.3);
  c.diagonal().setOnes();
  const auto sg = build_source_graph({c}, 0.0);
  EXPECT_EQ(sg.graph.edges().size(), 10u);
  EXPECT_TRUE(sg.connected);
}

TEST(SourceGraph, ThresholdsPearsonCorrelation) {
  Eigen::Matrix3d c;
  c << 100, 0.5, 30, 0.5, 1, 0.005, 30, 0.005, 4;
  // rho(1,2) = 0.05, rho(1,3) = 1.5, rho(2,3) = 0.0025
  const auto sg = build_source_graph({c}, 0.01);
  EXPECT_EQ(sg.graph.edges(), (std::vector<Edge>{{0, 1}, {0, 2}}));
  EXPECT_TRUE(sg.connected);
  c(1, 1) = 0.0;
  EXPECT_THROW(build_source_graph({c}, 0.01), NonpositiveVariance);
  EXPECT_THROW(build_source_graph({Eigen::MatrixXd::Identity(2, 2)}, -1.0), InvalidArgument);
}

TEST(ObservationGraph, ZeroThresholdKeepsSourceGraph) {
  const auto src = make_synthetic_source(6, 1);
  const auto cov = src.population_covariance();
  const auto sg = build_source_graph(cov, 0.01);
  const auto obs = build_observation_graph(cov, sg, 0.0);
  EXPECT_EQ(obs.edges, sg.graph.edges());
  EXPECT_TRUE(std::all_of(obs.support.begin(), obs.support.end(), [](bool b) { return b; }));
  ASSERT_EQ(obs.components.size(), 1u);
  EXPECT_EQ(obs.components[0].size(), 6u);
}

TEST(ObservationGraph, ThresholdAboveOneIsEmpty) {
  const auto cov = make_synthetic_source(6, 1).population_covariance();
  const auto obs = build_observation_graph(cov, build_source_graph(cov, 0.01), 1.01);
  EXPECT_TRUE(obs.edges.empty());
  EXPECT_TRUE(obs.components.empty());
  EXPECT_TRUE(std::none_of(obs.support.begin(), obs.support.end(), [](bool b) { return b; }));
}

TEST(ObservationGraph, SubgraphOfSourceAndComponentsPartitionSupport) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto pattern_graph = fixtures::random_graph(8, 0.35, seed);
    std::vector<std::pair<std::size_t, std::size_t>> pattern;
    for (const auto& e : pattern_graph.edges()) pattern.emplace_back(e.i, e.j);
    const SpectralCovariance cov_x{oracle::covariance_with_pattern(8, pattern, seed)};
    const auto sg = build_source_graph(cov_x, 1e-12);
    const SpectralCovariance cov_y{
        empirical_covariance(spectral(oracle::random_matrix(8, 30, seed + 1))).entries};
    const double delta = 0.05 * static_cast<double>(seed % 6);
    const auto obs = build_observation_graph(cov_y, sg, delta);
    std::set<Edge> r(sg.graph.edges().begin(), sg.graph.edges().end());
    for (const auto& e : obs.edges) {
      EXPECT_TRUE(r.count(e));
      EXPECT_TRUE(obs.support[e.i] && obs.support[e.j]);
    }
    std::vector<int> seen(8, 0);
    for (const auto& comp : obs.components) {
      EXPECT_TRUE(std::is_sorted(comp.begin(), comp.end()));
      for (auto v : comp) ++seen[v];
    }
    for (std::size_t v = 0; v < 8; ++v) EXPECT_EQ(seen[v], obs.support[v] ? 1 : 0);
  }
}

TEST(ObservationGraph, DefaultSimulationDropsFewEdges) {
  SimulationConfig cfg;
  cfg.trials = 40;
  const auto bundle = run_simulation(cfg, false);
  EXPECT_TRUE(bundle.source.connected);
  EXPECT_LE(bundle.mean_missing_edges, 0.05 * static_cast<double>(bundle.source.graph.edges().size()));
}

TEST(ObservationGraph, Errors) {
  const auto cov = make_synthetic_source(4, 1).population_covariance();
  const auto sg = build_source_graph(cov, 0.01);
  EXPECT_THROW(build_observation_graph({Eigen::MatrixXd::Identity(3, 3)}, sg, 0.001), DimensionMismatch);
  auto bad = cov;
  bad.entries(2, 2) = -1.0;
  EXPECT_THROW(build_observation_graph(bad, sg, 0.001), NonpositiveVariance);
  EXPECT_THROW(build_observation_graph(cov, sg, -0.1), InvalidArgument);
}

TEST(ObservationGraph, NoiselessEmpiricalCovarianceFactorsExactly) {
  const auto src = make_synthetic_source(8, 4);
  const auto x = src.draw(300, 5);
  const auto h = random_channel(8, 0.2, 6);
  const auto cov_x = empirical_covariance(x);
  const auto cov_y = empirical_covariance(apply_channel(h, x));
  EXPECT_LE((cov_y.entries - oracle::observed_covariance(cov_x.entries, h.gamma, 0.0)).cwiseAbs().maxCoeff(),
            1e-12 * cov_x.entries.cwiseAbs().maxCoeff());
}

TEST(DeltaCap, QuarterOfSmallestSourceCovariance) {
  Eigen::Matrix3d c;
  c << 4, 0.8, -0.4, 0.8, 2, 1.0, -0.4, 1.0, 3;
  const SpectralCovariance cov{c};
  EXPECT_DOUBLE_EQ(delta_cap(cov, build_source_graph(cov, 0.0), 2.0), 4.0 * 0.4 / 8.0);
}

TEST(ConcentrationBound, FormulaPlugIns) {
  EXPECT_DOUBLE_EQ(concentration_bound(1, 1, 0, 100, 0.1, BoundKind::off_diagonal), 1.0);
  EXPECT_DOUBLE_EQ(concentration_bound(1, 1, 0, 100, 0.1, BoundKind::diagonal), 1.0);
  for (bool diag : {false, true})
    EXPECT_NEAR(concentration_bound(3, 1.2, 0.5, 744, 0.05, diag ? BoundKind::diagonal : BoundKind::off_diagonal),
                oracle::bound_reference(3, 1.2, 0.5, 744, 0.05, diag), 1e-12);
}

TEST(ConcentrationBound, Errors) {
  EXPECT_THROW(concentration_bound(1, 1, 0, 0, 0.1, BoundKind::diagonal), InvalidArgument);
  EXPECT_THROW(concentration_bound(1, 1, 0, 10, 0.0, BoundKind::diagonal), InvalidArgument);
  EXPECT_THROW(concentration_bound(-1, 1, 0, 10, 0.1, BoundKind::diagonal), InvalidArgument);
}

TEST(ConcentrationBound, MonotoneInEveryParameter) {
  const double step = 1e-3;
  for (auto kind : {BoundKind::diagonal, BoundKind::off_diagonal})
    for (double c4 : {0.5, 3.0})
      for (double h : {0.8, 1.2})
        for (double s : {0.1, 0.5})
          for (std::size_t m : {50u, 744u})
            for (double eps : {0.05, 0.5}) {
              const double base = concentration_bound(c4, h, s, m, eps, kind);
              EXPECT_GT(base, concentration_bound(c4, h, s, m + 1, eps, kind));
              EXPECT_GT(base, concentration_bound(c4, h, s, m, eps + step, kind));
              EXPECT_LT(base, concentration_bound(c4 + step, h, s, m, eps, kind));
              EXPECT_LT(base, concentration_bound(c4, h + step, s, m, eps, kind));
              EXPECT_LT(base, concentration_bound(c4, h, s + step, m, eps, kind));
            }
}

TEST(ConcentrationBound, EpsForBoundInvertsBound) {
  const double eps = eps_for_bound(3, 1.1, 0.5, 400, 0.3, BoundKind::off_diagonal);
  EXPECT_NEAR(concentration_bound(3, 1.1, 0.5, 400, eps, BoundKind::off_diagonal), 0.3, 1e-12);
}

namespace {
BoundValidationConfig small_config(double sigma, FrequencyResponse h, std::size_t m) {
  return {make_synthetic_source(8, 17, VarianceProfile::flat), std::move(h), sigma, m, {}, 99};
}
} // namespace

TEST(BoundMonteCarlo, HugeEpsNeverExceeded) {
  auto cfg = small_config(0.0, FrequencyResponse{Eigen::VectorXd::Ones(8)}, 50);
  cfg.probes = {{0, 0, {1e6}}, {0, 1, {1e6}}};
  for (const auto& row : validate_bound_monte_carlo(cfg, 100)) {
    EXPECT_EQ(row.empirical, 0.0);
    EXPECT_LE(row.empirical, row.bound);
    EXPECT_FALSE(row.flag);
  }
}

TEST(BoundMonteCarlo, VacuousBoundIsUninformative) {
  auto cfg = small_config(0.5, random_channel(8, 0.2, 1), 20);
  cfg.probes = {{2, 3, {1e-6}}};
  const auto rows = validate_bound_monte_carlo(cfg, 100);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_GE(rows[0].bound, 1.0);
  EXPECT_FALSE(rows[0].informative);
  EXPECT_FALSE(rows[0].flag);
}

TEST(BoundMonteCarlo, InformativeBoundsHoldWithoutFlags) {
  auto cfg = small_config(0.5, random_channel(8, 0.2, 2), 200);
  cfg.probes = {probe_at_levels(cfg, 0, 0, {0.1, 0.5, 0.85}), probe_at_levels(cfg, 0, 1, {0.1, 0.5, 0.85})};
  const auto rows = validate_bound_monte_carlo(cfg, 1000);
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& row : rows) {
    EXPECT_GT(row.bound, 0.05);
    EXPECT_LT(row.bound, 0.9);
    EXPECT_TRUE(row.informative);
    EXPECT_FALSE(row.flag) << "probe (" << row.n + 1 << "," << row.nprime + 1 << ") eps " << row.eps;
  }
}

TEST(BoundMonteCarlo, TrialOrderDoesNotMatterForDeterminism) {
  auto cfg = small_config(0.5, random_channel(8, 0.2, 3), 60);
  cfg.probes = {probe_at_levels(cfg, 1, 2, {0.5})};
  const auto a = validate_bound_monte_carlo(cfg, 150);
  const auto b = validate_bound_monte_carlo(cfg, 150);
  EXPECT_EQ(a[0].empirical, b[0].empirical);
}

TEST(BoundMonteCarlo, InvalidConfig) {
  auto cfg = small_config(0.5, random_channel(8, 0.2, 3), 60);
  cfg.probes = {{0, 1, {0.1}}};
  EXPECT_THROW(validate_bound_monte_carlo(cfg, 99), InvalidArgument);
  cfg.probes = {{0, 8, {0.1}}};
  EXPECT_THROW(validate_bound_monte_carlo(cfg, 100), InvalidArgument);
  cfg.probes = {{0, 1, {0.0}}};
  EXPECT_THROW(validate_bound_monte_carlo(cfg, 100), InvalidArgument);
  cfg.gamma = random_channel(7, 0.2, 3);
  EXPECT_THROW(validate_bound_monte_carlo(cfg, 100), DimensionMismatch);
}
