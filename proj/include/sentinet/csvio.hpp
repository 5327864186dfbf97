#pragma once
// Small CSV helpers shared by the harness, the CLI and the tests.
// Doubles are always written with %.17g so files round-trip bit-exactly.

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "sentinet/log.hpp"

namespace sentinet {

std::string format_double(double v);
std::vector<std::string> split_csv(const std::string& line);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::filesystem::path& path, bool expect_header);

double parse_double(const std::string& s, const std::string& context);

// Numeric matrix, one row per line; an optional header row is skipped.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

// Two-column file "index,value" with rows 0,1,2,... in order.
Eigen::VectorXd read_indexed_values_csv(const std::filesystem::path& path);

}  // namespace sentinet
