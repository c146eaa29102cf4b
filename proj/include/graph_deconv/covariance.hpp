#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graph_deconv/channel.hpp"
#include "graph_deconv/errors.hpp"
#include "graph_deconv/graph.hpp"
#include "graph_deconv/traversal.hpp"

namespace graph_deconv {

/// Symmetric N x N covariance of graph Fourier coefficients.
struct SpectralCovariance {
  Eigen::MatrixXd entries;

  std::size_t size() const noexcept { return static_cast<std::size_t>(entries.rows()); }
  double operator()(std::size_t a, std::size_t b) const {
    return entries(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
};

/// Graph on frequency indices whose edges mark significantly correlated pairs.
struct SourceGraph {
  Graph graph;
  bool connected = false;

  std::size_t n_vertices() const noexcept { return graph.n_vertices(); }
  std::size_t degree(std::size_t n) const { return graph.degree(n); }
};

/// Thresholded subgraph (W, T) of the source graph, with its components
/// listed by lowest vertex.
struct ObservationGraph {
  Support support;
  std::vector<Edge> edges;
  AdjacencyList adjacency;
  std::vector<std::vector<std::size_t>> components;
};

/// C(n, n') = (1/M) sum_m y_m(n) y_m(n').
inline SpectralCovariance empirical_covariance(const SignalEnsemble& e) {
  detail::require_domain(e, Domain::spectral, "empirical_covariance");
  if (e.count() == 0) throw InvalidArgument("empirical_covariance: empty ensemble");
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(e.samples.rows(), e.samples.rows());
  c.selfadjointView<Eigen::Lower>().rankUpdate(e.samples);
  c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
  c /= static_cast<double>(e.count());
  return {std::move(c)};
}

/// max_n (1/M) sum_m |x_m(n)|^4, the empirical fourth-moment constant.
inline double empirical_kurtosis(const SignalEnsemble& e) {
  detail::require_domain(e, Domain::spectral, "empirical_kurtosis");
  if (e.count() == 0) throw InvalidArgument("empirical_kurtosis: empty ensemble");
  if (e.dimension() == 0) return 0.0;
  const Eigen::VectorXd fourth = e.samples.array().square().square().rowwise().mean();
  return fourth.maxCoeff();
}

namespace detail {
inline void require_square(const SpectralCovariance& c, const char* op) {
  if (c.entries.rows() != c.entries.cols())
    throw DimensionMismatch(std::string(op) + ": covariance is not square");
}
inline void require_positive_diagonal(const SpectralCovariance& c, const char* op) {
  for (std::size_t n = 0; n < c.size(); ++n)
    if (!(c(n, n) > 0.0))
      throw NonpositiveVariance(std::string(op) + ": variance at n=" + std::to_string(n + 1) +
                                " is not positive");
}
inline double correlation(const SpectralCovariance& c, std::size_t a, std::size_t b) {
  return std::abs(c(a, b)) / std::sqrt(c(a, a) * c(b, b));
}
} // namespace detail

inline constexpr double kDefaultPearsonThreshold = 0.01;
inline constexpr double kDefaultDelta = 0.001;

/// Edge (n, n') iff |C(n,n')| / sqrt(C(n,n) C(n',n')) >= threshold.
/// Connectivity is reported rather than enforced.
inline SourceGraph build_source_graph(const SpectralCovariance& cov_x, double pearson_threshold) {
  detail::require_square(cov_x, "build_source_graph");
  if (!(pearson_threshold >= 0.0)) throw InvalidArgument("pearson threshold must be >= 0");
  detail::require_positive_diagonal(cov_x, "build_source_graph");
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < cov_x.size(); ++a)
    for (std::size_t b = a + 1; b < cov_x.size(); ++b)
      if (detail::correlation(cov_x, a, b) >= pearson_threshold) edges.push_back({a, b});
  SourceGraph out{Graph(cov_x.size(), std::move(edges)), false};
  out.connected = is_connected(out.graph.adjacency());
  return out;
}

/// T = {(n,n') in R : rho_M(n,n') >= delta}; W = endpoints of T.
inline ObservationGraph build_observation_graph(const SpectralCovariance& cov_y_m,
                                                const SourceGraph& source, double delta) {
  detail::require_square(cov_y_m, "build_observation_graph");
  if (cov_y_m.size() != source.n_vertices())
    throw DimensionMismatch("build_observation_graph: covariance and source graph differ in size");
  if (!(delta >= 0.0)) throw InvalidArgument("delta must be >= 0");
  detail::require_positive_diagonal(cov_y_m, "build_observation_graph");

  const std::size_t n = cov_y_m.size();
  ObservationGraph obs;
  obs.support.assign(n, false);
  obs.adjacency.assign(n, {});
  for (const Edge& e : source.graph.edges()) {
    if (detail::correlation(cov_y_m, e.i, e.j) < delta) continue;
    obs.edges.push_back(e);
    obs.support[e.i] = true;
    obs.support[e.j] = true;
    obs.adjacency[e.i].push_back(e.j);
    obs.adjacency[e.j].push_back(e.i);
  }
  for (auto& nbrs : obs.adjacency) std::sort(nbrs.begin(), nbrs.end());
  obs.components = connected_components(obs.adjacency, obs.support);
  return obs;
}

/// Cap ||H||^2 * delta_0 / 8 on the observation threshold, where delta_0 is the
/// smallest |C_x(n,n')| over source edges. Needs the true channel norm, so it
/// is only usable in simulation.
inline double delta_cap(const SpectralCovariance& cov_x, const SourceGraph& source,
                        double h_norm) {
  if (source.graph.edges().empty()) throw InvalidArgument("delta_cap: source graph has no edges");
  double delta0 = std::numeric_limits<double>::infinity();
  for (const Edge& e : source.graph.edges()) delta0 = std::min(delta0, std::abs(cov_x(e.i, e.j)));
  return h_norm * h_norm * delta0 / 8.0;
}

enum class BoundKind { off_diagonal, diagonal };

/// Chebyshev-type tail bound on |C_y,M(n,n') - C_y(n,n')| >= eps.
///   off-diagonal: (sqrt(C4) ||H||^2 + sigma^2)^2 / (M eps^2)
///   diagonal:     (C4 ||H||^4 + 6 sqrt(C4) ||H||^2 sigma^2 + 3 sigma^4) / (M eps^2)
inline double concentration_bound(double c4, double h_norm, double sigma, std::size_t m,
                                  double eps, BoundKind kind) {
  if (m == 0) throw InvalidArgument("concentration_bound: sample count must be positive");
  if (!(eps > 0.0)) throw InvalidArgument("concentration_bound: eps must be positive");
  if (!(c4 >= 0.0) || !(h_norm >= 0.0) || !(sigma >= 0.0))
    throw InvalidArgument("concentration_bound: c4, h_norm and sigma must be nonnegative");
  const double h2 = h_norm * h_norm;
  const double s2 = sigma * sigma;
  const double root_c4 = std::sqrt(c4);
  double numerator = 0.0;
  if (kind == BoundKind::off_diagonal) {
    const double t = root_c4 * h2 + s2;
    numerator = t * t;
  } else {
    numerator = c4 * h2 * h2 + 6.0 * root_c4 * h2 * s2 + 3.0 * s2 * s2;
  }
  return numerator / (static_cast<double>(m) * eps * eps);
}

/// Inverse of concentration_bound in eps: the eps at which the bound equals `level`.
inline double eps_for_bound(double c4, double h_norm, double sigma, std::size_t m, double level,
                            BoundKind kind) {
  if (!(level > 0.0)) throw InvalidArgument("eps_for_bound: level must be positive");
  const double at_unit_eps = concentration_bound(c4, h_norm, sigma, m, 1.0, kind);
  return std::sqrt(at_unit_eps / level);
}

} // namespace graph_deconv
