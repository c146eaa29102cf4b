// Estimate a random channel on a path graph and deconvolve the observations.

#include <iostream>

#include "graph_deconv/graph_deconv.hpp"

int main() {
  using namespace graph_deconv;

  constexpr std::size_t kVertices = 8;
  std::vector<Edge> path;
  for (std::size_t v = 0; v + 1 < kVertices; ++v) path.push_back({v, v + 1});
  const Graph g(kVertices, path);
  const SpectralBasis basis = eigendecompose(laplacian(g));

  const auto source = make_synthetic_source(kVertices, 7, VarianceProfile::flat);
  const SignalEnsemble x_hat = source.draw(2000, 8);
  const auto cov_x = empirical_covariance(x_hat);

  const FrequencyResponse gamma = random_channel(kVertices, 0.2, 9);
  SignalEnsemble y_hat = apply_channel(gamma, x_hat);
  y_hat.samples += draw_noise(kVertices, y_hat.count(), 0.1, 10).samples;
  const SignalEnsemble y = igft(basis, y_hat);

  const auto est = csice(cov_x, y, basis, build_source_graph(cov_x, 0.01), 0.001);
  const auto recon = blind_deconvolve(est, y, basis);

  std::cout << " n   gamma    gamma_M\n";
  for (std::size_t n = 0; n < kVertices; ++n)
    std::cout << ' ' << n + 1 << "  " << gamma.gamma(static_cast<Eigen::Index>(n)) << "  "
              << est.gamma_m(static_cast<Eigen::Index>(n)) << '\n';
  const auto diag = covariance_diagnostics(reconstructed_covariance(recon), cov_x);
  std::cout << "covariance gap: " << summarize_gap(diag).gap_db << " dB\n";
}
