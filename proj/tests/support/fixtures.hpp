#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "graph_deconv/graph_deconv.hpp"

namespace fixtures {

using namespace graph_deconv;

inline Graph path_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t v = 0; v + 1 < n; ++v) e.push_back({v, v + 1});
  return Graph(n, e);
}

/// Erdos-Renyi graph with edge probability p; may be disconnected.
inline Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<Edge> e;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (coin(rng)) e.push_back({a, b});
  return Graph(n, e);
}

/// Connected random geometric graph with a simple Laplacian spectrum.
inline SpectralBasis random_basis(std::size_t n, std::uint64_t seed) {
  return random_geometric_graph(n, n <= 8 ? 0.6 : 0.45, seed).second;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("graph_deconv_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace fixtures
