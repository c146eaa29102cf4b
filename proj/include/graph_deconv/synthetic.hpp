#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "graph_deconv/covariance.hpp"
#include "graph_deconv/errors.hpp"
#include "graph_deconv/graph.hpp"
#include "graph_deconv/random.hpp"

namespace graph_deconv {

enum class VarianceProfile {
  /// One dominant low-frequency variance, two runners-up, then a geometric
  /// tail; shaped after the hourly temperature spectra.
  decaying,
  flat,
};

inline VarianceProfile parse_variance_profile(const std::string& name) {
  if (name == "decaying") return VarianceProfile::decaying;
  if (name == "flat") return VarianceProfile::flat;
  throw InvalidArgument("unknown variance profile '" + name + "' (expected decaying|flat)");
}

inline std::string to_string(VarianceProfile p) {
  return p == VarianceProfile::decaying ? "decaying" : "flat";
}

/// Target spectral variances C_x(n, n) for n = 1..N.
inline Eigen::VectorXd spectral_variances(std::size_t n, VarianceProfile profile) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  if (profile == VarianceProfile::flat || n == 0) return v;
  constexpr double kHead[] = {177.8017, 5.1511, 5.0201};
  constexpr double kTailFirst = 3.0401;
  constexpr double kTailLast = 0.2584;
  for (std::size_t k = 0; k < n && k < 3; ++k) v(static_cast<Eigen::Index>(k)) = kHead[k];
  if (n > 3) {
    const std::size_t tail = n - 3;
    const double ratio =
        tail > 1 ? std::pow(kTailLast / kTailFirst, 1.0 / static_cast<double>(tail - 1)) : 1.0;
    double value = kTailFirst;
    for (std::size_t k = 0; k < tail; ++k, value *= ratio)
      v(static_cast<Eigen::Index>(k + 3)) = value;
  }
  return v;
}

/// Zero-mean Gaussian nonstationary source in the spectral domain,
/// x_hat = A z with z ~ N(0, I_{N+1}).
///
/// Row n of the mixing matrix A is [sqrt(c N), g_n] rescaled to norm
/// sqrt(var(n)), with g_n a row of i.i.d. standard normals and c the
/// common-factor weight. The shared first column keeps every pairwise
/// correlation near c / (1 + c), so the source graph is complete and
/// no correlation sits near zero.
class SyntheticSource {
public:
  SyntheticSource() = default;
  explicit SyntheticSource(Eigen::MatrixXd mixing) : mixing_(std::move(mixing)) {}

  const Eigen::MatrixXd& mixing() const noexcept { return mixing_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(mixing_.rows()); }

  SpectralCovariance population_covariance() const { return {mixing_ * mixing_.transpose()}; }

  /// max_n E|x_hat(n)|^4 = 3 max_n C_x(n,n)^2 for a Gaussian source.
  double fourth_moment() const {
    const double v = (mixing_.rowwise().squaredNorm()).maxCoeff();
    return 3.0 * v * v;
  }

  SignalEnsemble draw(std::size_t m, std::uint64_t seed) const {
    SplitMix64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd z(mixing_.cols(), static_cast<Eigen::Index>(m));
    for (Eigen::Index c = 0; c < z.cols(); ++c)
      for (Eigen::Index r = 0; r < z.rows(); ++r) z(r, c) = normal(rng);
    return {mixing_ * z, Domain::spectral};
  }

private:
  Eigen::MatrixXd mixing_;
};

inline constexpr double kDefaultCommonFactor = 1.0;

inline SyntheticSource make_synthetic_source(std::size_t n, std::uint64_t seed,
                                             VarianceProfile profile = VarianceProfile::decaying,
                                             double common_factor = kDefaultCommonFactor) {
  if (n < 2) throw InvalidArgument("synthetic source needs at least 2 frequencies");
  if (!(common_factor >= 0.0)) throw InvalidArgument("common factor weight must be >= 0");
  SplitMix64 rng(seed);
  std::normal_distribution<double> normal;
  const auto rows = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd a(rows, rows + 1);
  const double loading = std::sqrt(common_factor * static_cast<double>(n));
  for (Eigen::Index r = 0; r < rows; ++r) {
    a(r, 0) = loading;
    for (Eigen::Index c = 1; c <= rows; ++c) a(r, c) = normal(rng);
  }
  const Eigen::VectorXd target = spectral_variances(n, profile);
  for (Eigen::Index r = 0; r < rows; ++r) a.row(r) *= std::sqrt(target(r)) / a.row(r).norm();
  return SyntheticSource(std::move(a));
}

/// White Gaussian noise N(0, sigma^2) in the spectral domain.
inline SignalEnsemble draw_noise(std::size_t n, std::size_t m, double sigma, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd e(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (Eigen::Index c = 0; c < e.cols(); ++c)
    for (Eigen::Index r = 0; r < e.rows(); ++r) e(r, c) = sigma * normal(rng);
  return {std::move(e), Domain::spectral};
}

} // namespace graph_deconv
