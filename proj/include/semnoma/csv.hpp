#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "semnoma/errors.hpp"

namespace semnoma {

// Minimal CSV writer with locale-independent number formatting so identical
// runs produce byte-identical files.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw IoError("csv: cannot write " + path);
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out_ << ',';
      out_ << columns[i];
    }
    out_ << '\n';
  }

  CsvWriter& field(const std::string& value) {
    sep();
    out_ << value;
    return *this;
  }

  CsvWriter& field(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return field(std::string(buf));
  }

  CsvWriter& field(long long value) { return field(std::to_string(value)); }
  CsvWriter& field(int value) { return field(std::to_string(value)); }
  CsvWriter& field(std::uint64_t value) { return field(std::to_string(value)); }

  void end_row() {
    out_ << '\n';
    first_ = true;
  }

 private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }

  std::ofstream out_;
  bool first_ = true;
};

}  // namespace semnoma
