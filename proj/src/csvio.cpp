#include "sentinet/csvio.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sentinet/errors.hpp"

namespace sentinet {

std::string format_double(double v) {
  char buf[40];
  snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

CsvTable read_csv(const std::filesystem::path& path, bool expect_header) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (first && expect_header) {
      table.header = cells;
      first = false;
      continue;
    }
    first = false;
    table.rows.push_back(cells);
  }
  return table;
}

double parse_double(const std::string& s, const std::string& context) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ConfigError(context + ": not a number: \"" + s + "\"");
  return v;
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (first) {
      first = false;
      // Tolerate an optional non-numeric header row.
      char* end = nullptr;
      std::strtod(cells[0].c_str(), &end);
      if (end == cells[0].c_str()) continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, path.string()));
    if (!rows.empty() && row.size() != rows[0].size())
      throw ConfigError(path.string() + ": ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError(path.string() + ": empty matrix");
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

Eigen::VectorXd read_indexed_values_csv(const std::filesystem::path& path) {
  auto table = read_csv(path, true);
  if (table.header.size() != 2)
    throw ConfigError(path.string() + ": expected two columns (index, value)");
  Eigen::VectorXd v(table.rows.size());
  for (size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].size() != 2) throw ConfigError(path.string() + ": bad row");
    size_t idx = static_cast<size_t>(parse_double(table.rows[i][0], path.string()));
    if (idx != i) throw ConfigError(path.string() + ": rows must be indexed 0,1,2,...");
    v(i) = parse_double(table.rows[i][1], path.string());
  }
  return v;
}

}  // namespace sentinet
