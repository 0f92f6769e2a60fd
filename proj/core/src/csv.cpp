#include "liclab/csv.hpp"

#include <cstdio>
#include <sstream>

namespace liclab {

std::string fmt_float(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::vector<std::vector<std::string>> read_csv(
    const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open CSV: " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace liclab
