#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graph_deconv/covariance.hpp"
#include "graph_deconv/errors.hpp"
#include "graph_deconv/graph.hpp"
#include "graph_deconv/traversal.hpp"

namespace graph_deconv {

/// One connected component of the observation graph after sign assignment.
struct ComponentSigns {
  std::vector<std::size_t> vertices;  ///< sorted ascending
  std::size_t anchor = 0;
  int anchor_sign = 1;
  /// BFS spanning tree: parent[k] is the parent of vertices[k], kNoParent for the anchor.
  std::vector<std::size_t> parent;
};

/// Estimated frequency responses gamma_M with the structure used to sign them.
struct ChannelEstimate {
  Eigen::VectorXd gamma_m;
  Support support;
  /// sign(gamma_M(n)) as assigned, kept separately so zero magnitudes keep their sign.
  std::vector<int> signs;
  std::vector<ComponentSigns> components;
  /// Radicands sqrt(mu_M) + alpha_M that came out negative and were clamped to 0.
  std::size_t clamped_radicands = 0;
  /// Tree edges whose beta_M was exactly zero (sign taken as +1).
  std::size_t zero_beta_tree_edges = 0;

  FrequencyResponse response() const { return {gamma_m}; }

  /// Component index of vertex n, or nullopt when n is outside the support.
  std::optional<std::size_t> component_of(std::size_t n) const {
    for (std::size_t k = 0; k < components.size(); ++k)
      for (std::size_t v : components[k].vertices)
        if (v == n) return k;
    return std::nullopt;
  }
};

struct MagnitudeEstimate {
  Eigen::VectorXd magnitudes;
  std::size_t clamped_radicands = 0;
};

namespace detail {
inline int sign_of(double v) { return v < 0.0 ? -1 : 1; }

/// sign(beta_M(a,b)) = sign(C_y,M(a,b)) * sign(C_x(a,b)); 0 when C_y,M(a,b) == 0.
inline int beta_sign(const SpectralCovariance& cov_x, const SpectralCovariance& cov_y_m,
                     std::size_t a, std::size_t b) {
  const double cy = cov_y_m(a, b);
  if (cy == 0.0) return 0;
  return sign_of(cy) * sign_of(cov_x(a, b));
}
} // namespace detail

/// Per-edge solution of the quadratic covariance relations, averaged over the
/// source-graph neighbors of each frequency:
///
///   |gamma_M(n)| = (1/theta(n)) sum_{n'} sqrt((sqrt(mu_M) + alpha_M) / (2 C_x(n,n)))
///
/// with alpha_M = C_y,M(n,n) - C_y,M(n',n'), beta_M = C_y,M(n,n') / C_x(n,n') and
/// mu_M = 4 C_x(n,n) C_x(n',n') beta_M^2 + alpha_M^2. Negative radicands are
/// clamped to zero and counted.
inline MagnitudeEstimate estimate_magnitudes(const SpectralCovariance& cov_x,
                                             const SpectralCovariance& cov_y_m,
                                             const SourceGraph& source) {
  detail::require_square(cov_x, "estimate_magnitudes");
  detail::require_square(cov_y_m, "estimate_magnitudes");
  const std::size_t n_freq = cov_x.size();
  if (cov_y_m.size() != n_freq || source.n_vertices() != n_freq)
    throw DimensionMismatch("estimate_magnitudes: covariance and source graph sizes differ");
  detail::require_positive_diagonal(cov_x, "estimate_magnitudes");

  MagnitudeEstimate out{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_freq)), 0};
  for (std::size_t n = 0; n < n_freq; ++n) {
    const auto& nbrs = source.graph.adjacency()[n];
    if (nbrs.empty())
      throw IsolatedVertex("frequency n=" + std::to_string(n + 1) +
                           " has no edge in the source graph");
    const double cxx_n = cov_x(n, n);
    double sum = 0.0;
    for (std::size_t np : nbrs) {
      const double cx_cross = cov_x(n, np);
      if (cx_cross == 0.0)
        throw InvalidArgument("source covariance vanishes on edge (" + std::to_string(n + 1) +
                              "," + std::to_string(np + 1) + ")");
      const double alpha = cov_y_m(n, n) - cov_y_m(np, np);
      const double beta = cov_y_m(n, np) / cx_cross;
      const double mu = 4.0 * cxx_n * cov_x(np, np) * beta * beta + alpha * alpha;
      double radicand = std::sqrt(mu) + alpha;
      if (radicand < 0.0) {
        radicand = 0.0;
        ++out.clamped_radicands;
      }
      sum += std::sqrt(radicand / (2.0 * cxx_n));
    }
    out.magnitudes(static_cast<Eigen::Index>(n)) = sum / static_cast<double>(nbrs.size());
  }
  return out;
}

/// Signs each component of the observation graph from its anchor (lowest
/// vertex) along a BFS spanning tree so that
///   sign(gamma_M(n)) * sign(gamma_M(parent)) = sign(beta_M(n, parent))
/// holds on every tree edge. Frequencies outside the support get sign +1.
/// `anchor_signs` holds one entry in {-1, +1} per component; empty means all +1.
inline ChannelEstimate assign_signs(const Eigen::VectorXd& magnitudes, const ObservationGraph& obs,
                                    const SpectralCovariance& cov_x,
                                    const SpectralCovariance& cov_y_m,
                                    const std::vector<int>& anchor_signs = {}) {
  const std::size_t n_freq = static_cast<std::size_t>(magnitudes.size());
  if (obs.support.size() != n_freq || cov_x.size() != n_freq || cov_y_m.size() != n_freq)
    throw DimensionMismatch("assign_signs: inputs disagree on the number of frequencies");
  if (!anchor_signs.empty() && anchor_signs.size() != obs.components.size())
    throw InvalidArgument("assign_signs: need one anchor sign per component");
  for (int s : anchor_signs)
    if (s != 1 && s != -1) throw InvalidArgument("assign_signs: anchor signs must be +1 or -1");

  ChannelEstimate est;
  est.gamma_m = magnitudes.cwiseAbs();
  est.support = obs.support;
  std::vector<int> sign(n_freq, 1);
  std::vector<std::size_t> parent(n_freq, kNoParent);

  for (std::size_t k = 0; k < obs.components.size(); ++k) {
    const auto& members = obs.components[k];
    if (members.empty()) throw EmptyComponent("observation graph has an empty component");
    ComponentSigns comp;
    comp.vertices = members;
    comp.anchor = members.front();
    comp.anchor_sign = anchor_signs.empty() ? 1 : anchor_signs[k];

    const auto order = bfs_visit(obs.adjacency, obs.support, comp.anchor, parent);
    sign[comp.anchor] = comp.anchor_sign;
    for (std::size_t v : order) {
      if (v == comp.anchor) continue;
      int rel = detail::beta_sign(cov_x, cov_y_m, v, parent[v]);
      if (rel == 0) {
        rel = 1;
        ++est.zero_beta_tree_edges;
      }
      sign[v] = rel * sign[parent[v]];
    }
    comp.parent.reserve(members.size());
    for (std::size_t v : members) comp.parent.push_back(parent[v]);
    est.components.push_back(std::move(comp));
  }
  for (std::size_t n = 0; n < n_freq; ++n)
    est.gamma_m(static_cast<Eigen::Index>(n)) *= sign[n];
  est.signs = std::move(sign);
  return est;
}

/// CSICE on precomputed spectral covariances: magnitudes, observation graph,
/// then anchored sign propagation.
inline ChannelEstimate csice_from_covariances(const SpectralCovariance& cov_x,
                                              const SpectralCovariance& cov_y_m,
                                              const SourceGraph& source, double delta,
                                              const std::vector<int>& anchor_signs = {}) {
  const auto mags = estimate_magnitudes(cov_x, cov_y_m, source);
  const auto obs = build_observation_graph(cov_y_m, source, delta);
  auto est = assign_signs(mags.magnitudes, obs, cov_x, cov_y_m, anchor_signs);
  est.clamped_radicands = mags.clamped_radicands;
  return est;
}

/// Channel estimation from vertex-domain observations.
inline ChannelEstimate csice(const SpectralCovariance& cov_x, const SignalEnsemble& observations,
                             const SpectralBasis& basis, const SourceGraph& source, double delta) {
  if (cov_x.size() != basis.size())
    throw DimensionMismatch("csice: source covariance and basis differ in size");
  const auto cov_y_m = empirical_covariance(gft(basis, observations));
  return csice_from_covariances(cov_x, cov_y_m, source, delta);
}

/// Observation-graph edges where the estimated signs disagree with sign(beta_M).
/// Tree edges never appear here unless beta_M vanished on them.
inline std::vector<Edge> sign_consistency_report(const ChannelEstimate& est,
                                                 const ObservationGraph& obs,
                                                 const SpectralCovariance& cov_x,
                                                 const SpectralCovariance& cov_y_m) {
  std::vector<Edge> violated;
  for (const Edge& e : obs.edges) {
    const int product = est.signs.at(e.i) * est.signs.at(e.j);
    if (product != detail::beta_sign(cov_x, cov_y_m, e.i, e.j)) violated.push_back(e);
  }
  return violated;
}

} // namespace graph_deconv
