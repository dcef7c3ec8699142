#include "fcca/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace fcca {

std::string format_double(double x) {
  char buf[40];
  int len = std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf, static_cast<size_t>(len));
}

void write_dataset_csv(const FunctionalDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << "t";
  for (Eigen::Index s = 0; s < ds.grid.size(); ++s)
    out << "," << format_double(ds.grid.points[s]);
  out << "\n";
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    out << "path_" << i;
    for (Eigen::Index s = 0; s < ds.values.cols(); ++s)
      out << "," << format_double(ds.values(i, s));
    out << "\n";
  }
  if (!out) throw io_error("write failed: " + path);
}

namespace {

std::vector<double> parse_row(const std::string& line, const std::string& path,
                              std::string* label) {
  std::vector<double> row;
  size_t start = line.find(',');
  if (start == std::string::npos)
    throw data_error("malformed CSV row in " + path);
  *label = line.substr(0, start);
  ++start;
  while (start <= line.size()) {
    size_t end = line.find(',', start);
    if (end == std::string::npos) end = line.size();
    double v;
    auto res = std::from_chars(line.data() + start, line.data() + end, v);
    if (res.ec != std::errc() || res.ptr != line.data() + end)
      throw data_error("malformed number in " + path);
    row.push_back(v);
    start = end + 1;
  }
  return row;
}

}  // namespace

FunctionalDataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw data_error("empty CSV: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::string label;
  std::vector<double> grid_pts = parse_row(line, path, &label);
  if (label != "t") throw data_error("CSV must start with a 't' grid header: " + path);
  const Eigen::Index p = static_cast<Eigen::Index>(grid_pts.size());

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(parse_row(line, path, &label));
    if (static_cast<Eigen::Index>(rows.back().size()) != p)
      throw data_error("row length mismatch in " + path);
  }
  if (rows.size() < 1) throw data_error("no data rows in " + path);

  FunctionalDataset ds;
  ds.grid.points.resize(p);
  for (Eigen::Index s = 0; s < p; ++s) ds.grid.points[s] = grid_pts[s];
  // Reconstruct midpoint-style weights; fall back to trapezoid-like cell
  // widths for non-uniform grids.
  ds.grid.quad_weights.resize(p);
  bool uniform = true;
  for (Eigen::Index s = 2; s < p; ++s)
    if (std::abs((ds.grid.points[s] - ds.grid.points[s - 1]) -
                 (ds.grid.points[1] - ds.grid.points[0])) > 1e-12)
      uniform = false;
  if (uniform) {
    ds.grid.quad_weights.setConstant(1.0 / static_cast<double>(p));
  } else {
    for (Eigen::Index s = 0; s < p; ++s) {
      double lo = s == 0 ? 0.0 : (ds.grid.points[s] + ds.grid.points[s - 1]) / 2.0;
      double hi = s == p - 1 ? 1.0 : (ds.grid.points[s + 1] + ds.grid.points[s]) / 2.0;
      ds.grid.quad_weights[s] = hi - lo;
    }
    ds.grid.quad_weights /= ds.grid.quad_weights.sum();
  }
  ds.grid.validate();

  ds.values.resize(static_cast<Eigen::Index>(rows.size()), p);
  for (size_t i = 0; i < rows.size(); ++i)
    for (Eigen::Index s = 0; s < p; ++s)
      ds.values(static_cast<Eigen::Index>(i), s) = rows[i][s];
  return ds;
}

}  // namespace fcca
