#include "ceramdw/csv.hpp"

#include "ceramdw/errors.hpp"

namespace ceramdw::csv {

Table parse(std::string_view text, const std::string& file_name) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<Row> records;
  std::size_t pos = 0;
  std::size_t line = 1;

  while (pos < text.size()) {
    Row row;
    row.line = line;
    std::string field;
    bool record_done = false;
    while (!record_done) {
      field.clear();
      if (pos < text.size() && text[pos] == '"') {
        ++pos;
        bool closed = false;
        while (pos < text.size()) {
          char ch = text[pos++];
          if (ch == '"') {
            if (pos < text.size() && text[pos] == '"') {
              field.push_back('"');
              ++pos;
            } else {
              closed = true;
              break;
            }
          } else {
            if (ch == '\n') ++line;
            field.push_back(ch);
          }
        }
        if (!closed) throw MalformedRow(file_name, row.line, "unterminated quoted field");
        if (pos < text.size() && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r')
          throw MalformedRow(file_name, line, "unexpected character after closing quote");
      } else {
        while (pos < text.size() && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r') {
          if (text[pos] == '"') throw MalformedRow(file_name, line, "quote inside unquoted field");
          field.push_back(text[pos++]);
        }
      }
      row.fields.push_back(field);
      if (pos >= text.size()) {
        record_done = true;
      } else if (text[pos] == ',') {
        ++pos;
      } else {
        if (text[pos] == '\r') ++pos;
        if (pos < text.size() && text[pos] == '\n') ++pos;
        ++line;
        record_done = true;
      }
    }
    // A trailing blank line is not a record.
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    records.push_back(std::move(row));
  }

  if (records.empty()) throw MalformedRow(file_name, 1, "missing header row");
  Table table;
  table.header = std::move(records.front().fields);
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].fields.size() != table.header.size())
      throw MalformedRow(file_name, records[i].line,
                         "expected " + std::to_string(table.header.size()) + " fields, got " +
                             std::to_string(records[i].fields.size()));
    table.rows.push_back(std::move(records[i]));
  }
  return table;
}

std::string escape_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

void Writer::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_.push_back(',');
    out_ += escape_field(fields[i]);
  }
  out_ += "\r\n";
}

}  // namespace ceramdw::csv
