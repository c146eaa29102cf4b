#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "graph_deconv/bounds.hpp"
#include "graph_deconv/channel.hpp"
#include "graph_deconv/covariance.hpp"
#include "graph_deconv/csice.hpp"
#include "graph_deconv/dataset.hpp"
#include "graph_deconv/deconv.hpp"
#include "graph_deconv/errors.hpp"
#include "graph_deconv/graph.hpp"
#include "graph_deconv/io.hpp"
#include "graph_deconv/random.hpp"
#include "graph_deconv/synthetic.hpp"

namespace graph_deconv {

/// Parameters of a simulated channel-estimation experiment. Field names match
/// the keys of the JSON config file.
struct SimulationConfig {
  std::size_t n_vertices = 32;
  std::size_t sample_count = 744;
  double noise_sigma = 0.5;
  double channel_amplitude = 0.2;
  double pearson_threshold = kDefaultPearsonThreshold;
  double delta = kDefaultDelta;
  std::uint64_t seed = 1;
  std::size_t trials = 1000;

  /// Radius of the random geometric graph (unit square) when no coordinates are given.
  double radius = 0.35;
  double common_factor = kDefaultCommonFactor;
  VarianceProfile variance_profile = VarianceProfile::decaying;

  std::size_t bound_trials = 200;
  std::vector<double> bound_levels = {0.1, 0.5, 0.8};
  /// 1-based (n, n') pairs probed by the Monte Carlo bound check.
  std::vector<std::pair<std::size_t, std::size_t>> bound_probes = {{1, 1}, {1, 2}};

  /// Optional real dataset (`station,day,hour,value`) and station coordinates.
  /// With a dataset the source is the centered data instead of the synthetic generator.
  std::optional<std::filesystem::path> dataset;
  std::optional<std::filesystem::path> coords;

  void validate() const {
    if (sample_count < 1) throw InvalidArgument("sample_count must be >= 1");
    if (!(noise_sigma >= 0.0)) throw InvalidArgument("noise_sigma must be >= 0");
    if (!(channel_amplitude >= 0.0 && channel_amplitude < 1.0))
      throw InvalidArgument("channel_amplitude must lie in [0, 1)");
    if (!(delta >= 0.0)) throw InvalidArgument("delta must be >= 0");
    if (!(pearson_threshold >= 0.0)) throw InvalidArgument("pearson_threshold must be >= 0");
    if (!(radius > 0.0)) throw InvalidArgument("radius must be > 0");
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    if (bound_trials < kMinBoundTrials)
      throw InvalidArgument("bound_trials must be >= " + std::to_string(kMinBoundTrials));
    if (!dataset && n_vertices < 2) throw InvalidArgument("n_vertices must be >= 2");
    if (dataset && !coords) throw InvalidArgument("a dataset needs station coords");
    for (const auto& [a, b] : bound_probes)
      if (a == 0 || b == 0) throw InvalidArgument("bound_probes are 1-based");
  }
};

inline SimulationConfig config_from_json(const nlohmann::json& j) {
  SimulationConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n_vertices") c.n_vertices = value.get<std::size_t>();
      else if (key == "sample_count") c.sample_count = value.get<std::size_t>();
      else if (key == "noise_sigma") c.noise_sigma = value.get<double>();
      else if (key == "channel_amplitude") c.channel_amplitude = value.get<double>();
      else if (key == "pearson_threshold") c.pearson_threshold = value.get<double>();
      else if (key == "delta") c.delta = value.get<double>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "trials") c.trials = value.get<std::size_t>();
      else if (key == "radius") c.radius = value.get<double>();
      else if (key == "common_factor") c.common_factor = value.get<double>();
      else if (key == "variance_profile") c.variance_profile = parse_variance_profile(value.get<std::string>());
      else if (key == "bound_trials") c.bound_trials = value.get<std::size_t>();
      else if (key == "bound_levels") c.bound_levels = value.get<std::vector<double>>();
      else if (key == "bound_probes") c.bound_probes = value.get<std::vector<std::pair<std::size_t, std::size_t>>>();
      else if (key == "dataset") c.dataset = value.get<std::string>();
      else if (key == "coords") c.coords = value.get<std::string>();
      else throw InvalidArgument("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline nlohmann::json config_to_json(const SimulationConfig& c) {
  nlohmann::json j = {{"n_vertices", c.n_vertices},
                      {"sample_count", c.sample_count},
                      {"noise_sigma", c.noise_sigma},
                      {"channel_amplitude", c.channel_amplitude},
                      {"pearson_threshold", c.pearson_threshold},
                      {"delta", c.delta},
                      {"seed", c.seed},
                      {"trials", c.trials},
                      {"radius", c.radius},
                      {"common_factor", c.common_factor},
                      {"variance_profile", to_string(c.variance_profile)},
                      {"bound_trials", c.bound_trials},
                      {"bound_levels", c.bound_levels},
                      {"bound_probes", c.bound_probes}};
  if (c.dataset) j["dataset"] = c.dataset->string();
  if (c.coords) j["coords"] = c.coords->string();
  return j;
}

/// Random geometric graph on the unit square whose Laplacian has a simple
/// spectrum. Resamples point sets (deterministically in `seed`) until one
/// is connected and non-degenerate.
inline std::pair<Graph, SpectralBasis> random_geometric_graph(std::size_t n, double radius,
                                                              std::uint64_t seed) {
  constexpr std::size_t kAttempts = 1000;
  for (std::size_t attempt = 0; attempt < kAttempts; ++attempt) {
    SplitMix64 rng(derive_seed(seed, attempt));
    std::vector<StationCoord> pts;
    for (std::size_t k = 0; k < n; ++k)
      pts.push_back({std::to_string(k + 1), rng.uniform01(), rng.uniform01()});
    Graph g = build_radius_graph(pts, radius);
    if (!is_connected(g.adjacency())) continue;
    try {
      auto basis = eigendecompose(laplacian(g));
      return {std::move(g), std::move(basis)};
    } catch (const DegenerateSpectrum&) {
    }
  }
  throw InvalidArgument("no connected random graph with a simple Laplacian spectrum at radius " +
                        std::to_string(radius));
}

/// Everything a simulation produces. Per-trial artifacts are those of trial 0;
/// aggregate fields are means over all trials.
struct SimulationBundle {
  SimulationConfig config;
  Graph graph;
  SpectralBasis basis;
  SignalEnsemble source_spectral;
  SignalEnsemble source_vertex;
  SpectralCovariance cov_x;
  SourceGraph source;
  std::optional<SyntheticSource> synthetic;

  FrequencyResponse true_gamma;
  ChannelEstimate estimate;
  DeconvolutionResult deconvolution;

  DiagnosticMatrices mean_diagnostics;  ///< dB matrices averaged over trials
  GapSummary gap;
  GapSummary relative_gap;
  std::size_t sign_recovered_trials = 0;
  std::size_t full_support_trials = 0;
  double mean_missing_edges = 0.0;
  double mean_sign_violations = 0.0;
  std::size_t clamped_radicands = 0;
  double max_aligned_error = 0.0;  ///< worst vertex-domain error after sign alignment
  std::vector<BoundReportRow> bound_report;

  double sign_recovery_rate() const {
    return static_cast<double>(sign_recovered_trials) / static_cast<double>(config.trials);
  }
};

/// True when every component's estimated signs equal the true signs up to
/// one flip per component. Frequencies outside the support are ignored.
inline bool signs_recovered(const ChannelEstimate& est, const FrequencyResponse& truth) {
  for (const auto& comp : est.components) {
    const int flip = est.signs[comp.anchor] * (truth.gamma(static_cast<Eigen::Index>(comp.anchor)) < 0 ? -1 : 1);
    for (std::size_t v : comp.vertices) {
      const int true_sign = truth.gamma(static_cast<Eigen::Index>(v)) < 0 ? -1 : 1;
      if (est.signs[v] != flip * true_sign) return false;
    }
  }
  return true;
}

/// Result of one simulated transmission and its blind recovery.
struct TrialOutcome {
  FrequencyResponse gamma;
  ChannelEstimate estimate;
  DeconvolutionResult deconvolution;
  DiagnosticMatrices diagnostics;
  std::size_t missing_edges = 0;
  std::size_t sign_violations = 0;
  bool signs_ok = false;
  bool full_support = false;
  double aligned_error = 0.0;
};

/// Trial t: channel from derive_seed(seed + t, 1), noise from derive_seed(seed + t, 2).
inline TrialOutcome run_trial(const SimulationBundle& b, std::uint64_t trial_seed) {
  const auto& cfg = b.config;
  const std::size_t n = b.basis.size();
  TrialOutcome out;
  out.gamma = random_channel(n, cfg.channel_amplitude, derive_seed(trial_seed, 1));

  SignalEnsemble y_hat = apply_channel(out.gamma, b.source_spectral);
  if (cfg.noise_sigma > 0.0)
    y_hat.samples += draw_noise(n, y_hat.count(), cfg.noise_sigma, derive_seed(trial_seed, 2)).samples;
  const SignalEnsemble y = igft(b.basis, y_hat);

  const auto cov_y_m = empirical_covariance(gft(b.basis, y));
  const auto obs = build_observation_graph(cov_y_m, b.source, cfg.delta);
  out.estimate = csice_from_covariances(b.cov_x, cov_y_m, b.source, cfg.delta);
  out.missing_edges = b.source.graph.edges().size() - obs.edges.size();
  out.sign_violations = sign_consistency_report(out.estimate, obs, b.cov_x, cov_y_m).size();
  out.signs_ok = signs_recovered(out.estimate, out.gamma);
  out.full_support = std::all_of(out.estimate.support.begin(), out.estimate.support.end(),
                                 [](bool s) { return s; });

  out.deconvolution = blind_deconvolve(out.estimate, y, b.basis);
  out.diagnostics = covariance_diagnostics(reconstructed_covariance(out.deconvolution), b.cov_x,
                                           kDiagnosticFloorDb);
  const auto aligned = igft(
      b.basis, align_reconstruction(out.estimate, out.deconvolution.spectral, b.source_spectral));
  out.aligned_error = (aligned.samples - b.source_vertex.samples).cwiseAbs().maxCoeff();
  return out;
}

/// Builds the graph, the source ensemble and its spectral covariance.
inline SimulationBundle prepare_simulation(const SimulationConfig& cfg) {
  cfg.validate();
  SimulationBundle b;
  b.config = cfg;
  if (cfg.coords) {
    b.graph = build_radius_graph(io::read_coords(*cfg.coords), cfg.radius);
    b.basis = eigendecompose(laplacian(b.graph));
  } else {
    std::tie(b.graph, b.basis) = random_geometric_graph(cfg.n_vertices, cfg.radius, derive_seed(cfg.seed, 100));
  }
  const std::size_t n = b.graph.n_vertices();

  if (cfg.dataset) {
    const auto centered = center_dataset(io::read_raw_dataset(*cfg.dataset));
    if (centered.dimension() != n)
      throw DimensionMismatch("dataset has " + std::to_string(centered.dimension()) +
                              " stations but coords list " + std::to_string(n));
    b.source_spectral = gft(b.basis, centered);
  } else {
    b.synthetic = make_synthetic_source(n, derive_seed(cfg.seed, 101), cfg.variance_profile,
                                        cfg.common_factor);
    b.source_spectral = b.synthetic->draw(cfg.sample_count, derive_seed(cfg.seed, 102));
  }
  b.source_vertex = igft(b.basis, b.source_spectral);
  b.cov_x = empirical_covariance(b.source_spectral);
  b.source = build_source_graph(b.cov_x, cfg.pearson_threshold);
  return b;
}

/// Monte Carlo check of the concentration bounds for the bundle's synthetic
/// source and its trial-0 channel.
inline std::vector<BoundReportRow> run_bound_validation(const SimulationBundle& b,
                                                        std::size_t trials) {
  if (!b.synthetic) throw InvalidArgument("bound validation needs the synthetic source");
  BoundValidationConfig bc{*b.synthetic, b.true_gamma, b.config.noise_sigma,
                           b.config.sample_count, {}, derive_seed(b.config.seed, 103)};
  for (const auto& [i, j] : b.config.bound_probes) {
    if (i > b.basis.size() || j > b.basis.size())
      throw InvalidArgument("bound probe index exceeds the number of frequencies");
    bc.probes.push_back(probe_at_levels(bc, i - 1, j - 1, b.config.bound_levels));
  }
  return validate_bound_monte_carlo(bc, trials);
}

/// Full experiment: `trials` independent channels and noise draws on one
/// source ensemble, blind estimation and deconvolution on each, averaged
/// covariance diagnostics, and the Monte Carlo bound check.
inline SimulationBundle run_simulation(const SimulationConfig& cfg, bool with_bounds = true) {
  SimulationBundle b = prepare_simulation(cfg);
  const std::size_t n = b.basis.size();
  Eigen::MatrixXd abs_sum = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::MatrixXd rel_sum = abs_sum;
  Eigen::VectorXd inflation_sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  double missing = 0.0, violations = 0.0;

  for (std::size_t t = 0; t < cfg.trials; ++t) {
    TrialOutcome o = run_trial(b, cfg.seed + t);
    abs_sum += o.diagnostics.abs_diff_db;
    rel_sum += o.diagnostics.rel_diff_db;
    inflation_sum += o.diagnostics.diagonal_inflation;
    missing += static_cast<double>(o.missing_edges);
    violations += static_cast<double>(o.sign_violations);
    b.sign_recovered_trials += o.signs_ok ? 1 : 0;
    b.full_support_trials += o.full_support ? 1 : 0;
    b.clamped_radicands += o.estimate.clamped_radicands;
    b.max_aligned_error = std::max(b.max_aligned_error, o.aligned_error);
    if (t == 0) {
      b.true_gamma = std::move(o.gamma);
      b.estimate = std::move(o.estimate);
      b.deconvolution = std::move(o.deconvolution);
    }
  }
  const double trials = static_cast<double>(cfg.trials);
  b.mean_diagnostics = {abs_sum / trials, rel_sum / trials, inflation_sum / trials};
  b.gap = summarize_gap(b.mean_diagnostics.abs_diff_db);
  b.relative_gap = summarize_gap(b.mean_diagnostics.rel_diff_db);
  b.mean_missing_edges = missing / trials;
  b.mean_sign_violations = violations / trials;

  if (with_bounds && b.synthetic) b.bound_report = run_bound_validation(b, cfg.bound_trials);
  return b;
}

inline nlohmann::json gap_json(const GapSummary& g) {
  return {{"mean_diagonal_db", g.mean_diagonal_db},
          {"mean_off_diagonal_db", g.mean_off_diagonal_db},
          {"gap_db", g.gap_db}};
}

/// Writes the bundle into `dir` (created if missing).
inline void write_bundle(const SimulationBundle& b, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  io::write_json(config_to_json(b.config), dir / "config.json");
  io::write_edge_list(b.graph, dir / "graph_edges.csv");
  io::write_covariance(b.cov_x, dir / "cov_x.csv");
  io::write_response(b.true_gamma, dir / "true_gamma.csv");
  io::write_estimate(b.estimate, dir / "channel_estimate.csv");
  io::write_json(io::estimate_components_json(b.estimate), dir / "channel_components.json");
  io::write_signals(b.deconvolution.reconstructed, dir / "reconstructed.csv");
  io::write_matrix(b.mean_diagnostics.abs_diff_db, dir / "abs_diff_db.csv");
  io::write_matrix(b.mean_diagnostics.rel_diff_db, dir / "rel_diff_db.csv");

  std::vector<double> inflation(b.mean_diagnostics.diagonal_inflation.data(),
                                b.mean_diagnostics.diagonal_inflation.data() +
                                    b.mean_diagnostics.diagonal_inflation.size());
  io::write_json({{"absolute", gap_json(b.gap)},
                  {"relative", gap_json(b.relative_gap)},
                  {"diagonal_inflation", inflation}},
                 dir / "diagnostics.json");
  if (!b.bound_report.empty()) io::write_bound_report(b.bound_report, dir / "bound_report.csv");

  std::size_t flagged = 0;
  for (const auto& r : b.bound_report) flagged += r.flag ? 1 : 0;
  io::write_json({{"trials", b.config.trials},
                  {"source_graph_edges", b.source.graph.edges().size()},
                  {"source_graph_connected", b.source.connected},
                  {"sign_recovery_rate", b.sign_recovery_rate()},
                  {"full_support_rate", static_cast<double>(b.full_support_trials) /
                                            static_cast<double>(b.config.trials)},
                  {"mean_missing_edges", b.mean_missing_edges},
                  {"mean_sign_violations", b.mean_sign_violations},
                  {"clamped_radicands", b.clamped_radicands},
                  {"max_aligned_error", b.max_aligned_error},
                  {"gap_db", b.gap.gap_db},
                  {"bound_rows_flagged", flagged}},
                 dir / "summary.json");
}

} // namespace graph_deconv
