#pragma once

// Format-neutral access to tabular bundle files (CSV or JSON array of objects).

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ceramdw/etl.hpp"

namespace ceramdw::detail {

struct TableSchema {
  std::string name;  // file stem, e.g. "samples"
  std::vector<std::string> required;
  std::vector<std::string> optional;
};

/// A parsed file whose columns have been checked against a schema. Empty strings
/// and JSON nulls both read as missing.
class RecordTable {
 public:
  struct Record {
    std::size_t line = 0;
    std::vector<std::optional<std::string>> values;
  };

  RecordTable(std::string file, std::vector<std::string> columns, std::vector<Record> records);

  const std::string& file() const { return file_; }
  const std::vector<Record>& records() const { return records_; }

  /// Value of `column` in `record`, or nullopt when absent/empty/not in the file.
  const std::optional<std::string>& get(const Record& record, std::string_view column) const;
  /// Like get() but raises MalformedRow when the value is missing.
  const std::string& require(const Record& record, std::string_view column) const;

  [[noreturn]] void fail(const Record& record, const std::string& reason) const;

 private:
  std::string file_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Record> records_;
};

std::string file_name(const TableSchema& schema, BundleFormat format);

/// Returns nullopt if the file is absent.
std::optional<RecordTable> read_table(const FileSet& files, const TableSchema& schema,
                                      BundleFormat format);

/// Serializes rows (missing = nullopt) with a fixed header.
std::string write_table(BundleFormat format, std::span<const std::string> header,
                        const std::vector<std::vector<std::optional<std::string>>>& rows);

std::optional<double> parse_double(std::string_view s);
std::optional<int> parse_int(std::string_view s);
/// Shortest text that parses back to the same double.
std::string format_double(double v);

}  // namespace ceramdw::detail
