#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "graph_deconv/errors.hpp"
#include "graph_deconv/graph.hpp"
#include "graph_deconv/random.hpp"

namespace graph_deconv {

/// Frequency responses gamma(1..N) of a shift-invariant channel U diag(gamma) U^T.
struct FrequencyResponse {
  Eigen::VectorXd gamma;

  std::size_t size() const noexcept { return static_cast<std::size_t>(gamma.size()); }
};

/// Subset W of the frequency indices, as a membership mask.
using Support = std::vector<bool>;

inline Support full_support(std::size_t n) { return Support(n, true); }

/// Pseudo-inverse of a frequency response restricted to a support set.
struct PseudoInverseResponse {
  Eigen::VectorXd gamma_dagger;
  Support support;
};

inline constexpr double kNearZeroResponse = 1e-12;

/// Componentwise filtering in the spectral domain: out(n) = gamma(n) * in(n).
inline SignalEnsemble apply_channel(const Eigen::VectorXd& gamma, const SignalEnsemble& e) {
  detail::require_domain(e, Domain::spectral, "apply_channel");
  detail::require_dimension(static_cast<std::size_t>(gamma.size()), e.dimension(),
                            "apply_channel");
  return {gamma.asDiagonal() * e.samples, Domain::spectral};
}

inline SignalEnsemble apply_channel(const FrequencyResponse& h, const SignalEnsemble& e) {
  return apply_channel(h.gamma, e);
}

inline SignalEnsemble apply_channel(const PseudoInverseResponse& h, const SignalEnsemble& e) {
  return apply_channel(h.gamma_dagger, e);
}

/// Operator norm of a shift-invariant channel: max |gamma(n)|.
inline double operator_norm(const FrequencyResponse& h) {
  return h.gamma.size() == 0 ? 0.0 : h.gamma.cwiseAbs().maxCoeff();
}

/// gamma_dagger(n) = 1/gamma(n) on the support, 0 elsewhere.
inline PseudoInverseResponse pseudo_inverse(const FrequencyResponse& h, const Support& support) {
  if (support.size() != h.size())
    throw DimensionMismatch("pseudo_inverse: support mask length differs from response");
  PseudoInverseResponse out{Eigen::VectorXd::Zero(h.gamma.size()), support};
  for (std::size_t n = 0; n < support.size(); ++n) {
    if (!support[n]) continue;
    const double g = h.gamma(static_cast<Eigen::Index>(n));
    if (!(std::abs(g) > kNearZeroResponse))
      throw NearZeroResponse("frequency response at n=" + std::to_string(n + 1) +
                             " is too small to invert");
    out.gamma_dagger(static_cast<Eigen::Index>(n)) = 1.0 / g;
  }
  return out;
}

/// Random channel gamma(n) = eps(n) * (1 + u(n)) with u uniform on
/// [-amplitude, amplitude] and eps a fair random sign. Deterministic in `seed`.
inline FrequencyResponse random_channel(std::size_t n, double amplitude, std::uint64_t seed) {
  if (!(amplitude >= 0.0 && amplitude < 1.0))
    throw InvalidArgument("channel amplitude must lie in [0, 1)");
  SplitMix64 rng(seed);
  FrequencyResponse h{Eigen::VectorXd(static_cast<Eigen::Index>(n))};
  for (Eigen::Index k = 0; k < h.gamma.size(); ++k) {
    const double u = amplitude * (2.0 * rng.uniform01() - 1.0);
    h.gamma(k) = rng.sign() * (1.0 + u);
  }
  return h;
}

/// Max-norm of the commutator cov*S - S*cov; zero exactly when the
/// covariance is stationary with respect to the shift.
inline double stationarity_residual(const Eigen::MatrixXd& cov_vertex,
                                    const Eigen::MatrixXd& shift) {
  if (cov_vertex.rows() != cov_vertex.cols() || shift.rows() != shift.cols() ||
      cov_vertex.rows() != shift.rows())
    throw DimensionMismatch("stationarity_residual: matrices must be N x N of equal size");
  if (cov_vertex.size() == 0) return 0.0;
  return (cov_vertex * shift - shift * cov_vertex).cwiseAbs().maxCoeff();
}

} // namespace graph_deconv
