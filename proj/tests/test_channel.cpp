#include <gtest/gtest.h>

#include "graph_deconv/channel.hpp"
#include "graph_deconv/covariance.hpp"
#include "graph_deconv/synthetic.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace graph_deconv;

namespace {
SignalEnsemble spectral(const Eigen::MatrixXd& m) { return {m, Domain::spectral}; }
}

TEST(ApplyChannel, OnesIsIdentityZerosAnnihilate) {
  const auto e = spectral(oracle::random_matrix(5, 4, 1));
  EXPECT_EQ(apply_channel(FrequencyResponse{Eigen::VectorXd::Ones(5)}, e).samples, e.samples);
  EXPECT_EQ(apply_channel(FrequencyResponse{Eigen::VectorXd::Zero(5)}, e).samples,
            Eigen::MatrixXd::Zero(5, 4));
}

TEST(ApplyChannel, EigenvalueResponseMatchesDenseShift) {
  const Graph g = fixtures::random_graph(9, 0.4, 7);
  const Eigen::MatrixXd S = laplacian(g);
  SpectralBasis b;
  ASSERT_NO_THROW(b = eigendecompose(S));
  const SignalEnsemble x{oracle::random_matrix(9, 6, 2), Domain::vertex};
  const auto filtered = apply_channel(FrequencyResponse{b.eigenvalues}, gft(b, x));
  const auto dense = gft(b, SignalEnsemble{S * x.samples, Domain::vertex});
  EXPECT_LE((filtered.samples - dense.samples).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ApplyChannel, DimensionMismatch) {
  EXPECT_THROW(apply_channel(FrequencyResponse{Eigen::VectorXd::Ones(4)}, spectral(Eigen::MatrixXd::Zero(5, 1))),
               DimensionMismatch);
}

TEST(OperatorNorm, Examples) {
  EXPECT_EQ(operator_norm(FrequencyResponse{Eigen::Vector3d(1, -3, 2)}), 3.0);
  EXPECT_EQ(operator_norm(FrequencyResponse{Eigen::VectorXd::Zero(4)}), 0.0);
}

TEST(OperatorNorm, AgreesWithPowerIterationOnDenseChannel) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto b = fixtures::random_basis(8, seed);
    const auto h = random_channel(8, 0.5, seed + 11);
    const Eigen::MatrixXd dense = b.modes * h.gamma.asDiagonal() * b.modes.transpose();
    EXPECT_NEAR(operator_norm(h), oracle::power_iteration_norm(dense), 1e-8);
  }
}

TEST(PseudoInverse, Examples) {
  const FrequencyResponse h{Eigen::Vector3d(2, 0, -4)};
  const auto inv = pseudo_inverse(h, {true, false, true});
  EXPECT_EQ(inv.gamma_dagger, Eigen::Vector3d(0.5, 0, -0.25));
  EXPECT_EQ(pseudo_inverse(h, {false, false, false}).gamma_dagger, Eigen::Vector3d::Zero());
  EXPECT_THROW(pseudo_inverse(FrequencyResponse{Eigen::Vector3d(2, 1e-15, 1)}, full_support(3)),
               NearZeroResponse);
  EXPECT_THROW(pseudo_inverse(h, {true, true}), DimensionMismatch);
}

TEST(PseudoInverse, InvertsChannelOnSupport) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto h = random_channel(7, 0.9, seed);
    Support w(7, false);
    for (std::size_t n = 0; n < 7; ++n) w[n] = ((seed + n) % 3) != 0;
    const auto e = spectral(oracle::random_matrix(7, 5, seed));
    const auto back = apply_channel(pseudo_inverse(h, w), apply_channel(h, e));
    for (Eigen::Index n = 0; n < 7; ++n) {
      if (w[static_cast<std::size_t>(n)])
        EXPECT_LE((back.samples.row(n) - e.samples.row(n)).cwiseAbs().maxCoeff(), 1e-10);
      else
        EXPECT_EQ(back.samples.row(n).cwiseAbs().maxCoeff(), 0.0);
    }
  }
}

TEST(ApplyChannel, CommutesWithShift) {
  const auto b = fixtures::random_basis(8, 3);
  const auto h = random_channel(8, 0.3, 5);
  const auto e = spectral(oracle::random_matrix(8, 4, 6));
  const FrequencyResponse shift{b.eigenvalues};
  EXPECT_LE((apply_channel(shift, apply_channel(h, e)).samples -
             apply_channel(h, apply_channel(shift, e)).samples).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RandomChannel, AmplitudeZeroGivesUnitMagnitudes) {
  const auto h = random_channel(50, 0.0, 3);
  EXPECT_EQ(h.gamma.cwiseAbs(), Eigen::VectorXd::Ones(50));
}

TEST(RandomChannel, MagnitudesWithinAmplitudeBand) {
  const auto h = random_channel(1000, 0.2, 4);
  EXPECT_GE(h.gamma.cwiseAbs().minCoeff(), 0.8);
  EXPECT_LE(h.gamma.cwiseAbs().maxCoeff(), 1.2);
  const auto negatives = (h.gamma.array() < 0).count();
  EXPECT_GT(negatives, 420);
  EXPECT_LT(negatives, 580);
}

TEST(RandomChannel, DeterministicInSeed) {
  EXPECT_EQ(random_channel(20, 0.2, 9).gamma, random_channel(20, 0.2, 9).gamma);
  EXPECT_NE(random_channel(20, 0.2, 9).gamma, random_channel(20, 0.2, 10).gamma);
  EXPECT_THROW(random_channel(5, 1.0, 1), InvalidArgument);
  EXPECT_THROW(random_channel(5, -0.1, 1), InvalidArgument);
}

TEST(StationarityResidual, IdentityAndSpectralDiagonalCovariances) {
  const auto b = fixtures::random_basis(10, 2);
  const Eigen::MatrixXd S = b.modes * b.eigenvalues.asDiagonal() * b.modes.transpose();
  EXPECT_EQ(stationarity_residual(Eigen::MatrixXd::Identity(10, 10), S), 0.0);
  const Eigen::VectorXd psd = Eigen::VectorXd::LinSpaced(10, 0.5, 3.0);
  const Eigen::MatrixXd stationary = b.modes * psd.asDiagonal() * b.modes.transpose();
  EXPECT_LE(stationarity_residual(stationary, S), 1e-10);
}

TEST(StationarityResidual, NonstationarySourceIsDetected) {
  const auto b = fixtures::random_basis(10, 2);
  const Eigen::MatrixXd S = b.modes * b.eigenvalues.asDiagonal() * b.modes.transpose();
  const auto src = make_synthetic_source(10, 5);
  const Eigen::MatrixXd cov_vertex =
      b.modes * src.population_covariance().entries * b.modes.transpose();
  EXPECT_GT(stationarity_residual(cov_vertex, S), 1e-3);
  EXPECT_THROW(stationarity_residual(Eigen::MatrixXd::Zero(3, 3), S), DimensionMismatch);
}
