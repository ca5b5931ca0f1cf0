#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace sta {

/// Columnar CSV writer: comment lines prefixed '#', one header line, then
/// rows in scientific notation with 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns,
            uint64_t config_hash, const std::string& units_note);

  void row(const std::vector<double>& values);
  void comment(const std::string& text);

 private:
  std::ofstream out_;
  size_t ncols_;
};

std::string format_sci17(double v);

}  // namespace sta
