#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace mpp::io {

// 17 significant digits: round-trip exact for IEEE-754 doubles.
std::string format_double(double value);

// Minimal RFC-4180 writer: comma separated, CRLF line endings, fields quoted
// only when they contain a separator.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void row(const std::vector<std::string>& fields);
  void flush();

 private:
  std::ofstream out_;
};

// Splits one CSV record; tolerates a trailing '\r' from CRLF input.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace mpp::io
