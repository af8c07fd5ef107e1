#include "spinners/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spinners/newton_sketch.hpp"

namespace spinners {

namespace {

double parse_cell(const std::string& cell, std::size_t line_no) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError("line " + std::to_string(line_no) + ": non-numeric cell '" + cell + "'");
  if (!std::isfinite(value))
    throw ParseError("line " + std::to_string(line_no) + ": non-finite value");
  return value;
}

}  // namespace

Dataset load_csv(const std::string& path, bool last_column_label) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");

  Dataset data;
  data.provenance = "csv(" + path + ")";
  std::string line;
  std::size_t line_no = 0;
  std::size_t expected_cols = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (expected_cols == 0) {
      expected_cols = cells.size();
      if (last_column_label && expected_cols < 2)
        throw ParseError("line 1: need at least one feature column besides the label");
    } else if (cells.size() != expected_cols) {
      throw ParseError("ragged row at line " + std::to_string(line_no) + ": expected " +
                       std::to_string(expected_cols) + " columns, got " +
                       std::to_string(cells.size()));
    }
    const std::size_t n_features = last_column_label ? expected_cols - 1 : expected_cols;
    Vec64 row(n_features);
    for (std::size_t j = 0; j < n_features; ++j) row[j] = parse_cell(cells[j], line_no);
    if (last_column_label) {
      const double lab = parse_cell(cells.back(), line_no);
      if (lab != 1.0 && lab != -1.0)
        throw ParseError("line " + std::to_string(line_no) + ": label must be +-1");
      data.labels.push_back(static_cast<int>(lab));
    }
    data.rows.push_back(std::move(row));
  }
  if (data.rows.empty()) throw ParseError("empty file '" + path + "'");
  return data;
}

void save_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  char buf[64];
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const Vec64& row = data.rows[i];
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
      out << buf;
      if (j + 1 < row.size() || !data.labels.empty()) out << ',';
    }
    if (!data.labels.empty()) out << data.labels[i];
    out << '\n';
  }
}

Dataset synth_unit_sphere_pairs(std::size_t dim, const std::vector<double>& angles,
                                std::size_t pairs_per_angle, std::uint64_t seed) {
  if (dim < 2) throw DimensionError("synth_unit_sphere_pairs: dim must be >= 2");
  if (angles.empty() || pairs_per_angle < 1)
    throw DimensionError("synth_unit_sphere_pairs: need angles and pairs_per_angle >= 1");
  for (double a : angles)
    if (!(a >= 0.0 && a <= M_PI))
      throw DomainError("synth_unit_sphere_pairs: angles must lie in [0, pi]");

  Rng rng(seed);
  Dataset data;
  data.provenance = "synthetic(unit_sphere_pairs)";
  data.rows.reserve(2 * angles.size() * pairs_per_angle);
  for (double theta : angles) {
    for (std::size_t p = 0; p < pairs_per_angle; ++p) {
      // Random unit u, then y = cos(theta) u + sin(theta) w with w a unit
      // vector orthogonal to u (Gram-Schmidt on a fresh Gaussian draw).
      Vec64 u(dim), w(dim);
      double nu = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        u[i] = rng.gaussian();
        nu += u[i] * u[i];
      }
      nu = std::sqrt(nu);
      for (double& v : u) v /= nu;
      double dot = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        w[i] = rng.gaussian();
        dot += w[i] * u[i];
      }
      double nw = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        w[i] -= dot * u[i];
        nw += w[i] * w[i];
      }
      nw = std::sqrt(nw);
      Vec64 y(dim);
      for (std::size_t i = 0; i < dim; ++i)
        y[i] = std::cos(theta) * u[i] + std::sin(theta) * w[i] / nw;
      data.rows.push_back(std::move(u));
      data.rows.push_back(std::move(y));
    }
  }
  return data;
}

Dataset synth_gaussian_blob(std::size_t dim, std::size_t count, std::uint64_t seed) {
  if (dim < 1 || count < 1) throw DimensionError("synth_gaussian_blob: invalid params");
  Rng rng(seed);
  Dataset data;
  data.provenance = "synthetic(gaussian_blob)";
  data.rows.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vec64 row(dim);
    for (double& v : row) v = rng.gaussian();
    data.rows.push_back(std::move(row));
  }
  return data;
}

Dataset synth_ar1(std::size_t n, std::size_t d, std::uint64_t seed) {
  LogisticProblem p = generate_ar1_problem(n, d, seed);
  Dataset data;
  data.provenance = "synthetic(ar1)";
  data.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec64 row(d);
    for (std::size_t j = 0; j < d; ++j)
      row[j] = p.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    data.rows.push_back(std::move(row));
    data.labels.push_back(static_cast<int>(p.labels(static_cast<Eigen::Index>(i))));
  }
  return data;
}

Dataset pad_to_power_of_two(Dataset data) {
  const std::size_t dim = data.dim();
  const std::size_t padded = next_power_of_two(dim);
  if (padded != dim)
    for (auto& row : data.rows) row.resize(padded, 0.0);
  return data;
}

}  // namespace spinners
