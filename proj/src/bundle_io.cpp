#include "bundle_io.hpp"

#include <algorithm>
#include <charconv>
#include "json.hpp"
#include <unordered_set>

#include "ceramdw/csv.hpp"
#include "ceramdw/errors.hpp"

namespace ceramdw::detail {

using nlohmann::json;

RecordTable::RecordTable(std::string file, std::vector<std::string> columns,
                         std::vector<Record> records)
    : file_(std::move(file)), records_(std::move(records)) {
  for (std::size_t i = 0; i < columns.size(); ++i) index_.emplace(columns[i], i);
}

const std::optional<std::string>& RecordTable::get(const Record& record,
                                                   std::string_view column) const {
  static const std::optional<std::string> kMissing;
  auto it = index_.find(std::string(column));
  if (it == index_.end()) return kMissing;
  return record.values[it->second];
}

const std::string& RecordTable::require(const Record& record, std::string_view column) const {
  const auto& v = get(record, column);
  if (!v) fail(record, "missing value for column '" + std::string(column) + "'");
  return *v;
}

void RecordTable::fail(const Record& record, const std::string& reason) const {
  throw MalformedRow(file_, record.line, reason);
}

std::string file_name(const TableSchema& schema, BundleFormat format) {
  return schema.name + (format == BundleFormat::csv_bundle ? ".csv" : ".json");
}

namespace {

void check_columns(const std::string& file, const TableSchema& schema,
                   const std::vector<std::string>& columns, std::size_t line) {
  std::unordered_set<std::string> seen;
  for (const auto& c : columns) {
    if (!seen.insert(c).second) throw MalformedRow(file, line, "duplicate column '" + c + "'");
    if (std::find(schema.required.begin(), schema.required.end(), c) == schema.required.end() &&
        std::find(schema.optional.begin(), schema.optional.end(), c) == schema.optional.end())
      throw MalformedRow(file, line, "unknown column '" + c + "'");
  }
  for (const auto& r : schema.required) {
    if (!seen.contains(r)) throw MalformedRow(file, line, "missing column '" + r + "'");
  }
}

std::optional<std::string> json_scalar(const std::string& file, std::size_t line,
                                       const std::string& key, const json& v) {
  if (v.is_null()) return std::nullopt;
  if (v.is_string()) {
    auto s = v.get<std::string>();
    if (s.empty()) return std::nullopt;
    return s;
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw MalformedRow(file, line, "field '" + key + "' must be a scalar");
}

}  // namespace

std::optional<RecordTable> read_table(const FileSet& files, const TableSchema& schema,
                                      BundleFormat format) {
  const std::string name = file_name(schema, format);
  auto it = files.find(name);
  if (it == files.end()) return std::nullopt;

  std::vector<RecordTable::Record> records;
  if (format == BundleFormat::csv_bundle) {
    csv::Table table = csv::parse(it->second, name);
    check_columns(name, schema, table.header, 1);
    for (auto& row : table.rows) {
      RecordTable::Record rec;
      rec.line = row.line;
      for (auto& f : row.fields) {
        if (f.empty()) {
          rec.values.emplace_back();
        } else {
          rec.values.emplace_back(std::move(f));
        }
      }
      records.push_back(std::move(rec));
    }
    return RecordTable(name, std::move(table.header), std::move(records));
  }

  json doc = json::parse(it->second, nullptr, false);
  if (doc.is_discarded()) throw MalformedRow(name, 1, "invalid JSON");
  if (!doc.is_array()) throw MalformedRow(name, 1, "expected a JSON array of objects");
  std::vector<std::string> columns = schema.required;
  columns.insert(columns.end(), schema.optional.begin(), schema.optional.end());
  std::size_t line = 0;
  for (const auto& obj : doc) {
    ++line;
    if (!obj.is_object()) throw MalformedRow(name, line, "expected an object");
    std::vector<std::string> keys;
    for (auto kv = obj.begin(); kv != obj.end(); ++kv) keys.push_back(kv.key());
    // Optional columns may be omitted per object; required ones may not.
    check_columns(name, TableSchema{schema.name, {}, columns}, keys, line);
    for (const auto& r : schema.required) {
      if (!obj.contains(r)) throw MalformedRow(name, line, "missing column '" + r + "'");
    }
    RecordTable::Record rec;
    rec.line = line;
    for (const auto& c : columns) {
      auto f = obj.find(c);
      rec.values.push_back(f == obj.end() ? std::nullopt : json_scalar(name, line, c, *f));
    }
    records.push_back(std::move(rec));
  }
  return RecordTable(name, std::move(columns), std::move(records));
}

std::string write_table(BundleFormat format, std::span<const std::string> header,
                        const std::vector<std::vector<std::optional<std::string>>>& rows) {
  if (format == BundleFormat::csv_bundle) {
    csv::Writer w({header.begin(), header.end()});
    std::vector<std::string> fields;
    for (const auto& row : rows) {
      fields.clear();
      for (const auto& v : row) fields.push_back(v.value_or(""));
      w.row(fields);
    }
    return w.str();
  }
  json arr = json::array();
  for (const auto& row : rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < header.size(); ++i) {
      obj[header[i]] = row[i] ? json(*row[i]) : json(nullptr);
    }
    arr.push_back(std::move(obj));
  }
  return arr.dump(1) + "\n";
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace ceramdw::detail
