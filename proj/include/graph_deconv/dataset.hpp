#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graph_deconv/errors.hpp"
#include "graph_deconv/graph.hpp"
#include "graph_deconv/io.hpp"

namespace graph_deconv {

/// Station x hour x day measurements (e.g. hourly temperatures).
class RawDataset {
public:
  RawDataset(std::size_t stations, std::size_t hours, std::size_t days)
      : stations_(stations), hours_(hours), days_(days), values_(stations * hours * days, 0.0) {}

  std::size_t stations() const noexcept { return stations_; }
  std::size_t hours() const noexcept { return hours_; }
  std::size_t days() const noexcept { return days_; }
  bool empty() const noexcept { return values_.empty(); }

  double& at(std::size_t station, std::size_t hour, std::size_t day) {
    return values_.at(index(station, hour, day));
  }
  double at(std::size_t station, std::size_t hour, std::size_t day) const {
    return values_.at(index(station, hour, day));
  }

private:
  std::size_t index(std::size_t s, std::size_t t, std::size_t d) const {
    return (d * hours_ + t) * stations_ + s;
  }

  std::size_t stations_;
  std::size_t hours_;
  std::size_t days_;
  std::vector<double> values_;
};

/// Removes the per-hour mean across days,
///   x_{d,t} = x_org_{d,t} - (1/D) sum_{d'} x_org_{d',t},
/// and flattens to M = D*T vertex-domain samples ordered day-major.
inline SignalEnsemble center_dataset(const RawDataset& raw) {
  if (raw.empty()) throw InvalidArgument("center_dataset: empty dataset");
  const std::size_t s_count = raw.stations(), t_count = raw.hours(), d_count = raw.days();
  SignalEnsemble out{Eigen::MatrixXd(static_cast<Eigen::Index>(s_count),
                                     static_cast<Eigen::Index>(d_count * t_count)),
                     Domain::vertex};
  for (std::size_t t = 0; t < t_count; ++t) {
    for (std::size_t s = 0; s < s_count; ++s) {
      double mean = 0.0;
      for (std::size_t d = 0; d < d_count; ++d) mean += raw.at(s, t, d);
      mean /= static_cast<double>(d_count);
      for (std::size_t d = 0; d < d_count; ++d)
        out.samples(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(d * t_count + t)) =
            raw.at(s, t, d) - mean;
    }
  }
  return out;
}

namespace io {

/// Long-format dataset, header `station,day,hour,value`. Stations and days are
/// 1-based, hours 0-based; every (station, day, hour) cell must appear once.
inline RawDataset read_raw_dataset(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  require_header(rows, {"station", "day", "hour", "value"}, path);
  struct Cell { std::size_t s, d, t; double v; };
  std::vector<Cell> cells;
  std::size_t s_max = 0, d_max = 0, t_max = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::string where = path.string() + ":" + std::to_string(r + 1);
    if (rows[r].size() != 4) throw InvalidArgument(where + ": expected 4 columns");
    const std::size_t s = parse_index(rows[r][0], where);
    const std::size_t d = parse_index(rows[r][1], where);
    const std::size_t t = parse_count(rows[r][2], where);
    const std::string& vs = rows[r][3];
    if (vs.empty() || vs == "nan" || vs == "NaN" || vs == "NA")
      throw InvalidArgument(where + ": missing value");
    cells.push_back({s - 1, d - 1, t, parse_double(vs, where)});
    s_max = std::max(s_max, s);
    d_max = std::max(d_max, d);
    t_max = std::max(t_max, t + 1);
  }
  if (cells.empty()) throw InvalidArgument("'" + path.string() + "' has no measurements");
  RawDataset raw(s_max, t_max, d_max);
  std::vector<bool> seen(s_max * t_max * d_max, false);
  for (const auto& c : cells) {
    const std::size_t key = (c.d * t_max + c.t) * s_max + c.s;
    if (seen[key]) throw InvalidArgument("'" + path.string() + "' repeats a (station, day, hour) cell");
    seen[key] = true;
    raw.at(c.s, c.t, c.d) = c.v;
  }
  for (bool b : seen)
    if (!b) throw InvalidArgument("'" + path.string() + "' is missing (station, day, hour) cells");
  return raw;
}

} // namespace io
} // namespace graph_deconv
