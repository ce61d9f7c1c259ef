#pragma once

// Deterministic CSV emission: '#'-prefixed metadata lines, comma separation,
// '.' decimal, fixed %.12g formatting so identical runs produce identical
// bytes.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace lde {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void comment(const std::string& line) { os_ << "# " << line << "\n"; }

  void header(const std::vector<std::string>& cols) {
    write_row(cols);
  }

  void row(const std::vector<std::string>& cells) { write_row(cells); }

  static std::string cell(double v) { return format_double(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }

 private:
  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << cells[i];
    }
    os_ << "\n";
  }
  std::ostream& os_;
};

}  // namespace lde
