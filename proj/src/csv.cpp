#include "sta/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace sta {

std::string format_sci17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& columns,
                     uint64_t config_hash, const std::string& units_note)
    : out_(path), ncols_(columns.size()) {
  if (!out_) throw std::runtime_error("cannot open output file " + path);
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(config_hash));
  out_ << "# config_hash = " << hash << "\n";
  if (!units_note.empty()) out_ << "# units: " << units_note << "\n";
  for (size_t i = 0; i < columns.size(); ++i)
    out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

void CsvWriter::comment(const std::string& text) { out_ << "# " << text
                                                        << "\n"; }

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != ncols_)
    throw std::runtime_error("CsvWriter: column count mismatch");
  for (size_t i = 0; i < values.size(); ++i)
    out_ << (i ? "," : "") << format_sci17(values[i]);
  out_ << "\n";
}

}  // namespace sta
