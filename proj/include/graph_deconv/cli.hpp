#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "graph_deconv/bounds.hpp"
#include "graph_deconv/covariance.hpp"
#include "graph_deconv/csice.hpp"
#include "graph_deconv/deconv.hpp"
#include "graph_deconv/errors.hpp"
#include "graph_deconv/graph.hpp"
#include "graph_deconv/io.hpp"
#include "graph_deconv/simulation.hpp"

namespace graph_deconv::cli {

enum ExitCode : int { kOk = 0, kValidationError = 1, kIoError = 2 };

namespace detail {

struct GraphArgs {
  std::string coords;
  std::string edges;
  double radius = 0.0;
  std::size_t n_vertices = 0;

  void add_to(CLI::App* cmd) {
    auto* c = cmd->add_option("--coords", coords, "station coordinates CSV (id,x,y)");
    auto* e = cmd->add_option("--edges", edges, "edge list CSV (i,j), 1-based");
    c->excludes(e);
    cmd->add_option("--radius", radius, "connection radius for --coords");
    cmd->add_option("--n-vertices", n_vertices, "vertex count for --edges (default: max index)");
  }

  Graph load() const {
    if (!coords.empty()) {
      if (!(radius > 0.0)) throw InvalidArgument("--radius is required with --coords");
      return build_radius_graph(io::read_coords(coords), radius);
    }
    if (!edges.empty()) return io::read_edge_list(edges, n_vertices);
    throw InvalidArgument("one of --coords or --edges is required");
  }
};

inline std::filesystem::path prepare_out(const std::string& out) {
  std::filesystem::path dir(out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  return dir;
}

inline SpectralCovariance load_cov_x(const std::string& cov_x, const std::string& source_signals,
                                     const SpectralBasis& basis) {
  if (!cov_x.empty()) return io::read_covariance(cov_x);
  if (!source_signals.empty())
    return empirical_covariance(gft(basis, io::read_signals(source_signals)));
  throw InvalidArgument("one of --cov-x or --source-signals is required");
}

} // namespace detail

/// Entry point of the `graph-deconv` tool. Returns 0 on success, 1 on a
/// validation error (bad flags, bad inputs) and 2 on an I/O error.
inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Blind deconvolution of nonstationary graph signals", "graph-deconv"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out_dir = ".";
  auto shared = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "random seed (u64)");
    cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
  };

  // graph
  detail::GraphArgs graph_args;
  auto* graph_cmd = app.add_subcommand("graph", "build a graph and its Laplacian spectrum");
  graph_args.add_to(graph_cmd);
  shared(graph_cmd);

  // estimate
  detail::GraphArgs est_graph;
  std::string est_signals, est_cov_x, est_source_signals;
  double est_delta = kDefaultDelta, est_threshold = kDefaultPearsonThreshold;
  auto* est_cmd = app.add_subcommand("estimate", "estimate the channel from observations");
  est_cmd->add_option("--signals", est_signals, "observed signals CSV (v1..vN)")->required();
  est_cmd->add_option("--cov-x", est_cov_x, "source spectral covariance, headerless N x N");
  est_cmd->add_option("--source-signals", est_source_signals,
                      "clean source signals CSV; covariance computed from them");
  est_cmd->add_option("--delta", est_delta, "observation-graph threshold")->capture_default_str();
  est_cmd->add_option("--pearson-threshold", est_threshold, "source-graph correlation threshold")
      ->capture_default_str();
  est_graph.add_to(est_cmd);
  shared(est_cmd);

  // deconvolve
  detail::GraphArgs dec_graph;
  std::string dec_signals, dec_estimate;
  auto* dec_cmd = app.add_subcommand("deconvolve", "invert an estimated channel");
  dec_cmd->add_option("--signals", dec_signals, "observed signals CSV (v1..vN)")->required();
  dec_cmd->add_option("--estimate", dec_estimate, "channel_estimate.csv")->required();
  dec_graph.add_to(dec_cmd);
  shared(dec_cmd);

  // diagnose
  std::string diag_recon, diag_cov_x;
  double floor_db = kDiagnosticFloorDb;
  auto* diag_cmd = app.add_subcommand("diagnose", "dB discrepancy between covariances");
  diag_cmd->add_option("--cov-recon", diag_recon, "reconstructed spectral covariance")->required();
  diag_cmd->add_option("--cov-x", diag_cov_x, "source spectral covariance")->required();
  diag_cmd->add_option("--floor-db", floor_db, "dB floor")->capture_default_str();
  shared(diag_cmd);

  // simulate
  std::string sim_config;
  std::optional<std::size_t> sim_trials;
  auto* sim_cmd = app.add_subcommand("simulate", "run a seeded end-to-end simulation");
  sim_cmd->add_option("--config", sim_config, "simulation config JSON")->required();
  sim_cmd->add_option("--trials", sim_trials, "override the number of trials");
  shared(sim_cmd);

  // validate-bounds
  std::string vb_config;
  std::optional<std::size_t> vb_trials;
  auto* vb_cmd = app.add_subcommand("validate-bounds", "Monte Carlo check of covariance bounds");
  vb_cmd->add_option("--config", vb_config, "simulation config JSON")->required();
  vb_cmd->add_option("--trials", vb_trials, "Monte Carlo trials (default: bound_trials)");
  shared(vb_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kValidationError;
  }

  const auto load_config = [&](const std::string& path, CLI::App* cmd) {
    SimulationConfig cfg = config_from_json(io::read_json(path));
    if (cmd->count("--seed") > 0) cfg.seed = seed;
    return cfg;
  };

  try {
    if (*graph_cmd) {
      const Graph g = graph_args.load();
      const auto dir = detail::prepare_out(out_dir);
      const Eigen::MatrixXd lap = laplacian(g);
      io::write_edge_list(g, dir / "graph_edges.csv");
      io::write_matrix(lap, dir / "laplacian.csv");
      const auto basis = eigendecompose(lap);
      io::write_response({basis.eigenvalues}, dir / "eigenvalues.csv");
      io::write_matrix(basis.modes, dir / "modes.csv");
      out << "graph: " << g.n_vertices() << " vertices, " << g.edges().size() << " edges, connected="
          << (is_connected(g.adjacency()) ? "yes" : "no") << '\n';
    } else if (*est_cmd) {
      const auto basis = eigendecompose(laplacian(est_graph.load()));
      const auto cov_x = detail::load_cov_x(est_cov_x, est_source_signals, basis);
      const auto y = io::read_signals(est_signals);
      const auto source = build_source_graph(cov_x, est_threshold);
      const auto cov_y_m = empirical_covariance(gft(basis, y));
      const auto obs = build_observation_graph(cov_y_m, source, est_delta);
      const auto est = csice_from_covariances(cov_x, cov_y_m, source, est_delta);
      const auto violated = sign_consistency_report(est, obs, cov_x, cov_y_m);

      const auto dir = detail::prepare_out(out_dir);
      io::write_estimate(est, dir / "channel_estimate.csv");
      auto meta = io::estimate_components_json(est);
      meta["source_graph_connected"] = source.connected;
      meta["source_graph_edges"] = source.graph.edges().size();
      meta["observation_graph_edges"] = obs.edges.size();
      nlohmann::json bad = nlohmann::json::array();
      for (const Edge& e : violated) bad.push_back({e.i + 1, e.j + 1});
      meta["sign_violations"] = bad;
      io::write_json(meta, dir / "channel_components.json");
      if (!source.connected) err << "warning: source graph is not connected\n";
      if (est.clamped_radicands > 0)
        err << "warning: clamped " << est.clamped_radicands << " negative radicands\n";
      if (est.zero_beta_tree_edges > 0)
        err << "warning: " << est.zero_beta_tree_edges << " tree edges had beta_M = 0\n";
      out << "estimate: " << est.components.size() << " component(s), " << violated.size()
          << " sign violation(s)\n";
    } else if (*dec_cmd) {
      const auto basis = eigendecompose(laplacian(dec_graph.load()));
      const auto est = io::read_estimate(dec_estimate);
      const auto result = blind_deconvolve(est, io::read_signals(dec_signals), basis);
      const auto dir = detail::prepare_out(out_dir);
      io::write_signals(result.reconstructed, dir / "reconstructed.csv");
      io::write_covariance(reconstructed_covariance(result), dir / "reconstructed_cov.csv");
      out << "deconvolve: " << result.reconstructed.count() << " signals\n";
    } else if (*diag_cmd) {
      const auto d = covariance_diagnostics(io::read_covariance(diag_recon),
                                            io::read_covariance(diag_cov_x), floor_db);
      const auto dir = detail::prepare_out(out_dir);
      io::write_matrix(d.abs_diff_db, dir / "abs_diff_db.csv");
      io::write_matrix(d.rel_diff_db, dir / "rel_diff_db.csv");
      std::vector<double> inflation(d.diagonal_inflation.data(),
                                    d.diagonal_inflation.data() + d.diagonal_inflation.size());
      const auto gap = summarize_gap(d);
      io::write_json({{"absolute", gap_json(gap)},
                      {"relative", gap_json(summarize_gap(d.rel_diff_db))},
                      {"diagonal_inflation", inflation}},
                     dir / "diagnostics.json");
      out << "diagnose: gap " << gap.gap_db << " dB\n";
    } else if (*sim_cmd) {
      SimulationConfig cfg = load_config(sim_config, sim_cmd);
      if (sim_trials) cfg.trials = *sim_trials;
      cfg.validate();
      const auto bundle = run_simulation(cfg);
      write_bundle(bundle, detail::prepare_out(out_dir));
      out << "simulate: gap " << bundle.gap.gap_db << " dB, sign recovery "
          << bundle.sign_recovery_rate() << '\n';
    } else if (*vb_cmd) {
      SimulationConfig cfg = load_config(vb_config, vb_cmd);
      cfg.trials = 1;
      auto bundle = run_simulation(cfg, false);
      const auto report = run_bound_validation(bundle, vb_trials.value_or(cfg.bound_trials));
      io::write_bound_report(report, detail::prepare_out(out_dir) / "bound_report.csv");
      std::size_t flagged = 0;
      for (const auto& r : report) flagged += r.flag ? 1 : 0;
      out << "validate-bounds: " << report.size() << " rows, " << flagged << " flagged\n";
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }
  return kOk;
}

} // namespace graph_deconv::cli
