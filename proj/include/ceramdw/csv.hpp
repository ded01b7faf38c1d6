#pragma once

// RFC-4180 CSV: comma separated, double-quote quoting with "" escapes, CRLF or
// LF line ends, header row mandatory.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ceramdw::csv {

struct Row {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based physical line where the record starts
};

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;
};

/// Parses a whole document. Throws MalformedRow(file, line, reason) on an
/// unterminated quote, a stray quote inside an unquoted field, a missing header,
/// or a record whose field count differs from the header.
Table parse(std::string_view text, const std::string& file_name);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape_field(std::string_view field);

class Writer {
 public:
  explicit Writer(const std::vector<std::string>& header) { row(header); }
  void row(const std::vector<std::string>& fields);
  const std::string& str() const { return out_; }

 private:
  std::string out_;
};

}  // namespace ceramdw::csv
