#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "liclab/tensor.hpp"

namespace liclab {

/// Fixed float formatting so identical runs produce byte-identical files.
std::string fmt_float(double v);

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : os_(path) {
    if (!os_) throw Error("cannot open for writing: " + path.string());
  }
  void write_row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << cells[i];
    }
    os_ << '\n';
  }
  void flush() { os_.flush(); }

 private:
  std::ofstream os_;
};

std::vector<std::vector<std::string>> read_csv(
    const std::filesystem::path& path);

}  // namespace liclab
