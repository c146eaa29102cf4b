#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "graph_deconv/errors.hpp"
#include "graph_deconv/traversal.hpp"

namespace graph_deconv {

/// Undirected edge between 0-based vertices, normalized so that i < j.
/// File formats and user-facing output use 1-based indices.
struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected, unweighted, finite graph without self-loops or duplicate edges.
class Graph {
public:
  Graph() = default;

  Graph(std::size_t n_vertices, std::vector<Edge> edges)
      : n_vertices_(n_vertices), adjacency_(n_vertices) {
    std::set<Edge> unique;
    for (Edge e : edges) {
      if (e.i == e.j)
        throw InvalidArgument("self-loop at vertex " + std::to_string(e.i + 1));
      if (e.i >= n_vertices || e.j >= n_vertices)
        throw InvalidArgument("edge endpoint outside 1.." + std::to_string(n_vertices));
      if (e.i > e.j) std::swap(e.i, e.j);
      if (!unique.insert(e).second)
        throw InvalidArgument("duplicate edge (" + std::to_string(e.i + 1) + "," +
                              std::to_string(e.j + 1) + ")");
    }
    edges_.assign(unique.begin(), unique.end());
    for (const Edge& e : edges_) {
      adjacency_[e.i].push_back(e.j);
      adjacency_[e.j].push_back(e.i);
    }
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
  }

  std::size_t n_vertices() const noexcept { return n_vertices_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const AdjacencyList& adjacency() const noexcept { return adjacency_; }
  std::size_t degree(std::size_t v) const { return adjacency_.at(v).size(); }

  bool has_edge(std::size_t a, std::size_t b) const {
    const auto& nbrs = adjacency_.at(a);
    return std::binary_search(nbrs.begin(), nbrs.end(), b);
  }

private:
  std::size_t n_vertices_ = 0;
  std::vector<Edge> edges_;
  AdjacencyList adjacency_;
};

struct StationCoord {
  std::string id;
  double x = 0.0;
  double y = 0.0;
};

/// Connects every pair of stations within Euclidean distance `radius`.
/// Vertices are numbered in input order.
inline Graph build_radius_graph(std::span<const StationCoord> coords, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  if (coords.size() < 2) throw InvalidArgument("radius graph needs at least 2 vertices");
  std::set<std::string> ids;
  for (const auto& c : coords)
    if (!ids.insert(c.id).second) throw InvalidArgument("duplicate station id '" + c.id + "'");

  std::vector<Edge> edges;
  for (std::size_t a = 0; a < coords.size(); ++a)
    for (std::size_t b = a + 1; b < coords.size(); ++b)
      if (std::hypot(coords[a].x - coords[b].x, coords[a].y - coords[b].y) <= radius)
        edges.push_back({a, b});
  return Graph(coords.size(), std::move(edges));
}

/// Combinatorial Laplacian L = D - A.
inline Eigen::MatrixXd laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.n_vertices());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    const auto i = static_cast<Eigen::Index>(e.i);
    const auto j = static_cast<Eigen::Index>(e.j);
    L(i, j) = -1.0;
    L(j, i) = -1.0;
    L(i, i) += 1.0;
    L(j, j) += 1.0;
  }
  return L;
}

/// Orthonormal modes (columns) and eigenvalues ordered by magnitude.
struct SpectralBasis {
  Eigen::MatrixXd modes;
  Eigen::VectorXd eigenvalues;

  std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
};

namespace tolerance {
inline constexpr double kSymmetry = 1e-10;
inline constexpr double kDistinctEigenvalues = 1e-9;
inline constexpr double kSignPivot = 1e-12;
} // namespace tolerance

/// Eigendecomposition S = U diag(lambda) U^T of a symmetric shift.
///
/// Eigenpairs are sorted by |lambda| ascending, with -lambda before +lambda on
/// a magnitude tie. Each mode is flipped so that its first entry with
/// magnitude above 1e-12 is positive. Throws DegenerateSpectrum when two
/// eigenvalues lie within 1e-9 * max(1, max|lambda|) of each other.
inline SpectralBasis eigendecompose(const Eigen::MatrixXd& shift) {
  if (shift.rows() != shift.cols() || shift.rows() == 0)
    throw DimensionMismatch("shift must be a non-empty square matrix");
  if ((shift - shift.transpose()).cwiseAbs().maxCoeff() > tolerance::kSymmetry)
    throw InvalidArgument("shift is not symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(shift);
  if (solver.info() != Eigen::Success) throw Error("eigensolver failed to converge");
  const Eigen::VectorXd& values = solver.eigenvalues();
  const Eigen::MatrixXd& vectors = solver.eigenvectors();
  const Eigen::Index n = values.size();

  // Ascending values: adjacent gaps are the only candidates for coincidence.
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 1; k < n; ++k) {
    if (values(k) - values(k - 1) <= tolerance::kDistinctEigenvalues * scale)
      throw DegenerateSpectrum("eigenvalues " + std::to_string(values(k - 1)) + " and " +
                               std::to_string(values(k)) + " coincide");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ma = std::abs(values(a));
    const double mb = std::abs(values(b));
    if (ma != mb) return ma < mb;
    return values(a) < values(b);
  });

  SpectralBasis basis;
  basis.modes.resize(n, n);
  basis.eigenvalues.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    Eigen::VectorXd u = vectors.col(src);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (std::abs(u(r)) > tolerance::kSignPivot) {
        if (u(r) < 0.0) u = -u;
        break;
      }
    }
    basis.modes.col(k) = u;
    basis.eigenvalues(k) = values(src);
  }
  return basis;
}

enum class Domain { vertex, spectral };

/// M real signals of common length N, stored one signal per column.
struct SignalEnsemble {
  Eigen::MatrixXd samples;
  Domain domain = Domain::vertex;

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(samples.rows()); }
  std::size_t count() const noexcept { return static_cast<std::size_t>(samples.cols()); }
};

namespace detail {
inline void require_domain(const SignalEnsemble& e, Domain expected, const char* op) {
  if (e.domain != expected)
    throw InvalidArgument(std::string(op) + ": ensemble is in the wrong domain");
}
inline void require_dimension(std::size_t basis_n, std::size_t signal_n, const char* op) {
  if (basis_n != signal_n)
    throw DimensionMismatch(std::string(op) + ": basis has dimension " + std::to_string(basis_n) +
                            " but signals have length " + std::to_string(signal_n));
}
} // namespace detail

/// Graph Fourier transform: x_hat = U^T x for every signal.
inline SignalEnsemble gft(const SpectralBasis& basis, const SignalEnsemble& e) {
  detail::require_domain(e, Domain::vertex, "gft");
  detail::require_dimension(basis.size(), e.dimension(), "gft");
  return {basis.modes.transpose() * e.samples, Domain::spectral};
}

/// Inverse transform: x = U x_hat.
inline SignalEnsemble igft(const SpectralBasis& basis, const SignalEnsemble& e) {
  detail::require_domain(e, Domain::spectral, "igft");
  detail::require_dimension(basis.size(), e.dimension(), "igft");
  return {basis.modes * e.samples, Domain::vertex};
}

} // namespace graph_deconv
