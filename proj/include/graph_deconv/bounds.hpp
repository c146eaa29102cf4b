#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graph_deconv/channel.hpp"
#include "graph_deconv/covariance.hpp"
#include "graph_deconv/errors.hpp"
#include "graph_deconv/random.hpp"
#include "graph_deconv/synthetic.hpp"

namespace graph_deconv {

/// One covariance entry (0-based n, n') and the deviations eps to probe it at.
struct BoundProbe {
  std::size_t n = 0;
  std::size_t nprime = 0;
  std::vector<double> eps;
};

struct BoundValidationConfig {
  SyntheticSource source;
  FrequencyResponse gamma;
  double sigma = 0.0;
  std::size_t sample_count = 0;
  std::vector<BoundProbe> probes;
  std::uint64_t seed = 0;
};

struct BoundReportRow {
  std::size_t n = 0;       ///< 0-based
  std::size_t nprime = 0;  ///< 0-based
  double eps = 0.0;
  double empirical = 0.0;  ///< fraction of trials with |C_y,M - C_y| >= eps
  double bound = 0.0;
  /// False when the bound is >= 1 and the check is vacuous.
  bool informative = true;
  /// Empirical frequency exceeds the bound by more than 3 binomial standard errors.
  bool flag = false;
};

inline constexpr std::size_t kMinBoundTrials = 100;

/// Standard error of a frequency estimated from `trials` Bernoulli(p) draws.
inline double binomial_standard_error(double p, std::size_t trials) {
  p = std::clamp(p, 0.0, 1.0);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

/// Population covariance of the observed spectra: Gamma C_x Gamma + sigma^2 I.
inline SpectralCovariance observed_population_covariance(const SpectralCovariance& cov_x,
                                                         const FrequencyResponse& h,
                                                         double sigma) {
  Eigen::MatrixXd c = h.gamma.asDiagonal() * cov_x.entries * h.gamma.asDiagonal();
  c.diagonal().array() += sigma * sigma;
  return {std::move(c)};
}

inline double probe_bound(const BoundValidationConfig& cfg, const BoundProbe& p, double eps) {
  return concentration_bound(cfg.source.fourth_moment(), operator_norm(cfg.gamma), cfg.sigma,
                             cfg.sample_count, eps,
                             p.n == p.nprime ? BoundKind::diagonal : BoundKind::off_diagonal);
}

/// Monte Carlo check of the covariance concentration bounds. Trial t draws
/// fresh sources and noise from seed + t; the exceedance frequency of every
/// (probe, eps) pair is reported next to its bound.
inline std::vector<BoundReportRow> validate_bound_monte_carlo(const BoundValidationConfig& cfg,
                                                              std::size_t trials) {
  const std::size_t n = cfg.source.dimension();
  if (trials < kMinBoundTrials)
    throw InvalidArgument("validate_bound_monte_carlo: need at least 100 trials");
  if (cfg.sample_count == 0) throw InvalidArgument("validate_bound_monte_carlo: sample count is 0");
  if (cfg.gamma.size() != n || n == 0)
    throw DimensionMismatch("validate_bound_monte_carlo: channel and source sizes differ");
  if (!(cfg.sigma >= 0.0)) throw InvalidArgument("validate_bound_monte_carlo: sigma < 0");
  for (const auto& p : cfg.probes) {
    if (p.n >= n || p.nprime >= n)
      throw InvalidArgument("validate_bound_monte_carlo: probe index out of range");
    for (double e : p.eps)
      if (!(e > 0.0)) throw InvalidArgument("validate_bound_monte_carlo: eps must be positive");
  }

  const auto truth = observed_population_covariance(cfg.source.population_covariance(), cfg.gamma,
                                                    cfg.sigma);
  std::vector<std::vector<std::size_t>> hits(cfg.probes.size());
  for (std::size_t k = 0; k < cfg.probes.size(); ++k) hits[k].assign(cfg.probes[k].eps.size(), 0);

  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = cfg.seed + t;
    auto y = cfg.source.draw(cfg.sample_count, derive_seed(trial_seed, 0));
    y.samples = cfg.gamma.gamma.asDiagonal() * y.samples;
    y.samples += draw_noise(n, cfg.sample_count, cfg.sigma, derive_seed(trial_seed, 1)).samples;
    for (std::size_t k = 0; k < cfg.probes.size(); ++k) {
      const auto& p = cfg.probes[k];
      const auto a = static_cast<Eigen::Index>(p.n);
      const auto b = static_cast<Eigen::Index>(p.nprime);
      const double estimate =
          y.samples.row(a).dot(y.samples.row(b)) / static_cast<double>(cfg.sample_count);
      const double deviation = std::abs(estimate - truth(p.n, p.nprime));
      for (std::size_t e = 0; e < p.eps.size(); ++e)
        if (deviation >= p.eps[e]) ++hits[k][e];
    }
  }

  std::vector<BoundReportRow> report;
  for (std::size_t k = 0; k < cfg.probes.size(); ++k) {
    const auto& p = cfg.probes[k];
    for (std::size_t e = 0; e < p.eps.size(); ++e) {
      BoundReportRow row;
      row.n = p.n;
      row.nprime = p.nprime;
      row.eps = p.eps[e];
      row.empirical = static_cast<double>(hits[k][e]) / static_cast<double>(trials);
      row.bound = probe_bound(cfg, p, p.eps[e]);
      row.informative = row.bound < 1.0;
      row.flag = row.informative &&
                 row.empirical > row.bound + 3.0 * binomial_standard_error(row.bound, trials);
      report.push_back(row);
    }
  }
  return report;
}

/// Builds a probe whose eps values put the bound at each requested level.
inline BoundProbe probe_at_levels(const BoundValidationConfig& cfg, std::size_t n,
                                  std::size_t nprime, const std::vector<double>& levels) {
  BoundProbe p{n, nprime, {}};
  const auto kind = n == nprime ? BoundKind::diagonal : BoundKind::off_diagonal;
  for (double level : levels)
    p.eps.push_back(eps_for_bound(cfg.source.fourth_moment(), operator_norm(cfg.gamma), cfg.sigma,
                                  cfg.sample_count, level, kind));
  return p;
}

} // namespace graph_deconv
