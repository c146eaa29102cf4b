#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "graph_deconv/bounds.hpp"
#include "graph_deconv/channel.hpp"
#include "graph_deconv/covariance.hpp"
#include "graph_deconv/csice.hpp"
#include "graph_deconv/errors.hpp"
#include "graph_deconv/graph.hpp"

// CSV readers and writers for every file format the CLI exchanges. Indices in
// files are 1-based; in memory they are 0-based.

namespace graph_deconv::io {

using Row = std::vector<std::string>;

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

inline Row split(const std::string& line) {
  Row out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

/// Non-empty lines of a CSV file, split into cells.
inline std::vector<Row> read_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<Row> rows;
  std::string line;
  while (std::getline(in, line))
    if (!trim(line).empty()) rows.push_back(split(line));
  return rows;
}

inline double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw InvalidArgument(where + ": '" + s + "' is not a number");
  return v;
}

/// Non-negative integer.
inline std::size_t parse_count(const std::string& s, const std::string& where) {
  std::size_t v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw InvalidArgument(where + ": '" + s + "' is not a non-negative integer");
  return v;
}

inline std::size_t parse_index(const std::string& s, const std::string& where) {
  const std::size_t v = parse_count(s, where);
  if (v == 0) throw InvalidArgument(where + ": '" + s + "' is not a 1-based index");
  return v;
}

/// Shortest text that round-trips the double exactly.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline void require_header(const std::vector<Row>& rows, const Row& expected,
                           const std::filesystem::path& path) {
  if (rows.empty() || rows.front() != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw InvalidArgument("'" + path.string() + "' must start with header '" + want + "'");
  }
}

class Writer {
public:
  explicit Writer(const std::filesystem::path& path) : path_(path), out_(path) {
    if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
  }
  std::ostream& stream() { return out_; }
  void close() {
    out_.close();
    if (!out_) throw IoError("failed writing '" + path_.string() + "'");
  }

private:
  std::filesystem::path path_;
  std::ofstream out_;
};

// --- graphs -----------------------------------------------------------------

/// Station coordinates, header `id,x,y`.
inline std::vector<StationCoord> read_coords(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  require_header(rows, {"id", "x", "y"}, path);
  std::vector<StationCoord> coords;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::string where = path.string() + ":" + std::to_string(r + 1);
    if (rows[r].size() != 3) throw InvalidArgument(where + ": expected 3 columns");
    coords.push_back({rows[r][0], parse_double(rows[r][1], where), parse_double(rows[r][2], where)});
  }
  return coords;
}

/// Edge list, header `i,j`, 1-based. The vertex count is the largest index
/// unless `n_vertices` is given.
inline Graph read_edge_list(const std::filesystem::path& path, std::size_t n_vertices = 0) {
  const auto rows = read_rows(path);
  require_header(rows, {"i", "j"}, path);
  std::vector<Edge> edges;
  std::size_t max_index = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::string where = path.string() + ":" + std::to_string(r + 1);
    if (rows[r].size() != 2) throw InvalidArgument(where + ": expected 2 columns");
    const std::size_t i = parse_index(rows[r][0], where);
    const std::size_t j = parse_index(rows[r][1], where);
    max_index = std::max({max_index, i, j});
    edges.push_back({i - 1, j - 1});
  }
  return Graph(n_vertices == 0 ? max_index : n_vertices, std::move(edges));
}

inline void write_edge_list(const Graph& g, const std::filesystem::path& path) {
  Writer w(path);
  w.stream() << "i,j\n";
  for (const Edge& e : g.edges()) w.stream() << e.i + 1 << ',' << e.j + 1 << '\n';
  w.close();
}

// --- matrices and signals ---------------------------------------------------

/// Headerless numeric matrix.
inline Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  if (rows.empty()) throw InvalidArgument("'" + path.string() + "' is empty");
  const auto cols = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string where = path.string() + ":" + std::to_string(r + 1);
    if (rows[r].size() != cols) throw InvalidArgument(where + ": ragged row");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_double(rows[r][c], where);
  }
  return m;
}

inline void write_matrix(const Eigen::MatrixXd& m, const std::filesystem::path& path) {
  Writer w(path);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      w.stream() << (c ? "," : "") << format_double(m(r, c));
    w.stream() << '\n';
  }
  w.close();
}

inline SpectralCovariance read_covariance(const std::filesystem::path& path) {
  SpectralCovariance c{read_matrix(path)};
  if (c.entries.rows() != c.entries.cols())
    throw DimensionMismatch("'" + path.string() + "' is not a square matrix");
  if ((c.entries - c.entries.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, c.entries.cwiseAbs().maxCoeff()))
    throw InvalidArgument("'" + path.string() + "' is not symmetric");
  return c;
}

inline void write_covariance(const SpectralCovariance& c, const std::filesystem::path& path) {
  write_matrix(c.entries, path);
}

/// Signals with one sample per row and header `v1..vN`.
inline SignalEnsemble read_signals(const std::filesystem::path& path,
                                   Domain domain = Domain::vertex) {
  const auto rows = read_rows(path);
  if (rows.empty()) throw InvalidArgument("'" + path.string() + "' is empty");
  const std::size_t n = rows.front().size();
  Row header;
  for (std::size_t k = 1; k <= n; ++k) header.push_back("v" + std::to_string(k));
  require_header(rows, header, path);
  if (rows.size() < 2) throw InvalidArgument("'" + path.string() + "' has no samples");
  SignalEnsemble e{Eigen::MatrixXd(static_cast<Eigen::Index>(n),
                                   static_cast<Eigen::Index>(rows.size() - 1)),
                   domain};
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::string where = path.string() + ":" + std::to_string(r + 1);
    if (rows[r].size() != n) throw InvalidArgument(where + ": expected " + std::to_string(n) + " columns");
    for (std::size_t c = 0; c < n; ++c)
      e.samples(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r - 1)) =
          parse_double(rows[r][c], where);
  }
  return e;
}

inline void write_signals(const SignalEnsemble& e, const std::filesystem::path& path) {
  Writer w(path);
  for (std::size_t k = 1; k <= e.dimension(); ++k) w.stream() << (k > 1 ? "," : "") << 'v' << k;
  w.stream() << '\n';
  for (Eigen::Index m = 0; m < e.samples.cols(); ++m) {
    for (Eigen::Index k = 0; k < e.samples.rows(); ++k)
      w.stream() << (k ? "," : "") << format_double(e.samples(k, m));
    w.stream() << '\n';
  }
  w.close();
}

// --- channels ---------------------------------------------------------------

/// Frequency response, header `n,gamma`, rows 1..N in order.
inline FrequencyResponse read_response(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  require_header(rows, {"n", "gamma"}, path);
  FrequencyResponse h{Eigen::VectorXd(static_cast<Eigen::Index>(rows.size() - 1))};
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::string where = path.string() + ":" + std::to_string(r + 1);
    if (rows[r].size() != 2 || parse_index(rows[r][0], where) != r)
      throw InvalidArgument(where + ": expected row n=" + std::to_string(r));
    h.gamma(static_cast<Eigen::Index>(r - 1)) = parse_double(rows[r][1], where);
  }
  return h;
}

inline void write_response(const FrequencyResponse& h, const std::filesystem::path& path) {
  Writer w(path);
  w.stream() << "n,gamma\n";
  for (Eigen::Index k = 0; k < h.gamma.size(); ++k)
    w.stream() << k + 1 << ',' << format_double(h.gamma(k)) << '\n';
  w.close();
}

/// Channel estimate, header `n,gamma_m,in_support,component,is_anchor`.
/// `component` is 1-based, 0 outside the support.
inline void write_estimate(const ChannelEstimate& est, const std::filesystem::path& path) {
  const std::size_t n = est.support.size();
  std::vector<std::size_t> component(n, 0);
  std::vector<bool> anchor(n, false);
  for (std::size_t k = 0; k < est.components.size(); ++k) {
    for (std::size_t v : est.components[k].vertices) component[v] = k + 1;
    anchor[est.components[k].anchor] = true;
  }
  Writer w(path);
  w.stream() << "n,gamma_m,in_support,component,is_anchor\n";
  for (std::size_t v = 0; v < n; ++v)
    w.stream() << v + 1 << ',' << format_double(est.gamma_m(static_cast<Eigen::Index>(v))) << ','
               << (est.support[v] ? 1 : 0) << ',' << component[v] << ',' << (anchor[v] ? 1 : 0)
               << '\n';
  w.close();
}

/// Reads back a channel estimate. Tree parent maps are not part of the CSV
/// and stay empty; everything needed for deconvolution is restored.
inline ChannelEstimate read_estimate(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  require_header(rows, {"n", "gamma_m", "in_support", "component", "is_anchor"}, path);
  const std::size_t n = rows.size() - 1;
  ChannelEstimate est;
  est.gamma_m.resize(static_cast<Eigen::Index>(n));
  est.support.assign(n, false);
  est.signs.assign(n, 1);
  std::map<std::size_t, ComponentSigns> comps;
  for (std::size_t r = 1; r <= n; ++r) {
    const std::string where = path.string() + ":" + std::to_string(r + 1);
    const auto& row = rows[r];
    if (row.size() != 5 || parse_index(row[0], where) != r)
      throw InvalidArgument(where + ": expected row n=" + std::to_string(r));
    const double g = parse_double(row[1], where);
    est.gamma_m(static_cast<Eigen::Index>(r - 1)) = g;
    est.signs[r - 1] = std::signbit(g) ? -1 : 1;
    est.support[r - 1] = row[2] == "1";
    const std::size_t k = parse_count(row[3], where);
    if ((k == 0) == est.support[r - 1])
      throw InvalidArgument(where + ": component must be 0 exactly when outside the support");
    if (k == 0) continue;
    auto& comp = comps[k];
    comp.vertices.push_back(r - 1);
    if (row[4] == "1") {
      comp.anchor = r - 1;
      comp.anchor_sign = est.signs[r - 1];
    }
  }
  for (auto& [k, comp] : comps) est.components.push_back(std::move(comp));
  return est;
}

/// Component metadata: anchors, anchor signs and BFS parent maps (1-based).
inline nlohmann::json estimate_components_json(const ChannelEstimate& est) {
  nlohmann::json comps = nlohmann::json::array();
  for (std::size_t k = 0; k < est.components.size(); ++k) {
    const auto& c = est.components[k];
    nlohmann::json parents = nlohmann::json::object();
    std::vector<std::size_t> vertices;
    for (std::size_t i = 0; i < c.vertices.size(); ++i) {
      vertices.push_back(c.vertices[i] + 1);
      if (c.parent.size() == c.vertices.size() && c.parent[i] != kNoParent)
        parents[std::to_string(c.vertices[i] + 1)] = c.parent[i] + 1;
    }
    comps.push_back({{"component", k + 1},
                     {"vertices", vertices},
                     {"anchor", c.anchor + 1},
                     {"anchor_sign", c.anchor_sign},
                     {"tree_parent", parents}});
  }
  return {{"components", comps},
          {"clamped_radicands", est.clamped_radicands},
          {"zero_beta_tree_edges", est.zero_beta_tree_edges}};
}

inline void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  Writer w(path);
  w.stream() << j.dump(2) << '\n';
  w.close();
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("'" + path.string() + "': " + e.what());
  }
}

/// Monte Carlo report, header `n,nprime,eps,empirical,bound,flag`.
inline void write_bound_report(const std::vector<BoundReportRow>& rows,
                               const std::filesystem::path& path) {
  Writer w(path);
  w.stream() << "n,nprime,eps,empirical,bound,flag\n";
  for (const auto& r : rows)
    w.stream() << r.n + 1 << ',' << r.nprime + 1 << ',' << format_double(r.eps) << ','
               << format_double(r.empirical) << ',' << format_double(r.bound) << ','
               << (r.flag ? 1 : 0) << '\n';
  w.close();
}

} // namespace graph_deconv::io
