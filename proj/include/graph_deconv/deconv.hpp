#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "graph_deconv/channel.hpp"
#include "graph_deconv/covariance.hpp"
#include "graph_deconv/csice.hpp"
#include "graph_deconv/errors.hpp"
#include "graph_deconv/graph.hpp"

namespace graph_deconv {

struct DeconvolutionResult {
  SignalEnsemble reconstructed;  ///< vertex domain
  SignalEnsemble spectral;       ///< exactly zero outside the support
  Support support;
};

/// x_tilde_m = U diag(gamma_M^dagger) U^T y_m, the pseudo-inverse taken on the
/// estimate's support.
inline DeconvolutionResult blind_deconvolve(const ChannelEstimate& estimate,
                                            const SignalEnsemble& observations,
                                            const SpectralBasis& basis) {
  if (std::none_of(estimate.support.begin(), estimate.support.end(), [](bool b) { return b; }))
    throw InvalidArgument("blind_deconvolve: estimate has an empty support");
  detail::require_dimension(basis.size(), estimate.support.size(), "blind_deconvolve");
  const auto inverse = pseudo_inverse(estimate.response(), estimate.support);
  DeconvolutionResult out;
  out.spectral = apply_channel(inverse, gft(basis, observations));
  out.reconstructed = igft(basis, out.spectral);
  out.support = estimate.support;
  return out;
}

/// Empirical covariance of the reconstructed spectra on W x W, zero elsewhere.
inline SpectralCovariance reconstructed_covariance(const DeconvolutionResult& result) {
  auto cov = empirical_covariance(result.spectral);
  const auto n = static_cast<Eigen::Index>(result.support.size());
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      if (!result.support[static_cast<std::size_t>(a)] ||
          !result.support[static_cast<std::size_t>(b)])
        cov.entries(a, b) = 0.0;
  return cov;
}

inline constexpr double kDbOffset = 1e-5;
inline constexpr double kDiagnosticFloorDb = -20.0;
inline constexpr double kCovarianceDisplayFloorDb = -30.0;

/// max(10 log10(|value| + 1e-5), floor_db).
inline double to_db(double value, double floor_db) {
  return std::max(10.0 * std::log10(std::abs(value) + kDbOffset), floor_db);
}

inline Eigen::MatrixXd to_db(const Eigen::MatrixXd& m, double floor_db) {
  return m.unaryExpr([floor_db](double v) { return to_db(v, floor_db); });
}

struct DiagnosticMatrices {
  Eigen::MatrixXd abs_diff_db;
  Eigen::MatrixXd rel_diff_db;
  Eigen::VectorXd diagonal_inflation;
};

/// dB-scale discrepancy between reconstructed and source spectral covariances.
/// The relative variant divides by sqrt(C_x(n,n) C_x(n',n')).
inline DiagnosticMatrices covariance_diagnostics(const SpectralCovariance& c_recon,
                                                 const SpectralCovariance& c_source,
                                                 double floor_db = kDiagnosticFloorDb) {
  detail::require_square(c_recon, "covariance_diagnostics");
  detail::require_square(c_source, "covariance_diagnostics");
  if (c_recon.size() != c_source.size())
    throw DimensionMismatch("covariance_diagnostics: covariance sizes differ");
  detail::require_positive_diagonal(c_source, "covariance_diagnostics");

  const Eigen::MatrixXd delta = c_recon.entries - c_source.entries;
  const Eigen::VectorXd scale = c_source.entries.diagonal().cwiseSqrt();
  const Eigen::MatrixXd relative = delta.cwiseQuotient(scale * scale.transpose());
  return {to_db(delta, floor_db), to_db(relative, floor_db), delta.diagonal()};
}

struct GapSummary {
  double mean_diagonal_db = 0.0;
  double mean_off_diagonal_db = 0.0;
  /// mean_off_diagonal_db - mean_diagonal_db; negative when cross-frequency
  /// structure is recovered better than the individual variances.
  double gap_db = 0.0;
};

inline GapSummary summarize_gap(const Eigen::MatrixXd& db) {
  if (db.rows() != db.cols() || db.rows() == 0)
    throw DimensionMismatch("summarize_gap: expected a non-empty square matrix");
  const Eigen::Index n = db.rows();
  GapSummary s;
  s.mean_diagonal_db = db.diagonal().mean();
  if (n > 1) s.mean_off_diagonal_db = (db.sum() - db.diagonal().sum()) / static_cast<double>(n * (n - 1));
  else s.mean_off_diagonal_db = s.mean_diagonal_db;
  s.gap_db = s.mean_off_diagonal_db - s.mean_diagonal_db;
  return s;
}

inline GapSummary summarize_gap(const DiagnosticMatrices& d) { return summarize_gap(d.abs_diff_db); }

/// Per-component sign s_k in {-1, +1} that best matches `reference` (e.g. the
/// true gamma) in least squares over the component's vertices.
inline std::vector<int> component_alignment(const ChannelEstimate& estimate,
                                            const Eigen::VectorXd& estimated,
                                            const Eigen::VectorXd& reference) {
  std::vector<int> signs;
  signs.reserve(estimate.components.size());
  for (const auto& comp : estimate.components) {
    double same = 0.0, flipped = 0.0;
    for (std::size_t v : comp.vertices) {
      const auto i = static_cast<Eigen::Index>(v);
      same += (estimated(i) - reference(i)) * (estimated(i) - reference(i));
      flipped += (estimated(i) + reference(i)) * (estimated(i) + reference(i));
    }
    signs.push_back(flipped < same ? -1 : 1);
  }
  return signs;
}

/// Applies per-component sign alignment to reconstructed spectra so that they
/// can be compared with ground-truth sources. Each component's sign minimizes
/// its own squared error.
inline SignalEnsemble align_reconstruction(const ChannelEstimate& estimate,
                                           const SignalEnsemble& recon_spectral,
                                           const SignalEnsemble& truth_spectral) {
  detail::require_domain(recon_spectral, Domain::spectral, "align_reconstruction");
  detail::require_domain(truth_spectral, Domain::spectral, "align_reconstruction");
  if (recon_spectral.samples.rows() != truth_spectral.samples.rows() ||
      recon_spectral.samples.cols() != truth_spectral.samples.cols())
    throw DimensionMismatch("align_reconstruction: ensembles differ in shape");
  SignalEnsemble aligned = recon_spectral;
  for (const auto& comp : estimate.components) {
    double same = 0.0, flipped = 0.0;
    for (std::size_t v : comp.vertices) {
      const auto i = static_cast<Eigen::Index>(v);
      same += (recon_spectral.samples.row(i) - truth_spectral.samples.row(i)).squaredNorm();
      flipped += (recon_spectral.samples.row(i) + truth_spectral.samples.row(i)).squaredNorm();
    }
    if (flipped < same)
      for (std::size_t v : comp.vertices) aligned.samples.row(static_cast<Eigen::Index>(v)) *= -1.0;
  }
  return aligned;
}

} // namespace graph_deconv
