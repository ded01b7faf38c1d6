#include "ceramdw/report.hpp"

#include <algorithm>

#include "ceramdw/csv.hpp"

namespace ceramdw::report {

namespace {

std::size_t display_width(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string pad(std::string_view s, std::size_t width, bool right) {
  const std::size_t w = display_width(s);
  std::string fill(width > w ? width - w : 0, ' ');
  return right ? fill + std::string(s) : std::string(s) + fill;
}

}  // namespace

json member_json(const Member& m) { return json{{"label", m.label}, {"unknown", m.unknown}}; }

json result_json(const ResultTable& table) {
  json columns = json::array();
  for (const auto& a : table.columns) columns.push_back(a.to_string());
  json rows = json::array();
  for (const auto& r : table.rows) {
    json members = json::array();
    for (const auto& m : r.members) members.push_back(member_json(m));
    rows.push_back(json{{"members", std::move(members)}, {"value", r.value.to_string()}});
  }
  json totals = table.total ? json{{"value", table.total->to_string()}} : json(nullptr);
  return json{{"columns", std::move(columns)},
              {"measure", table.measure},
              {"rows", std::move(rows)},
              {"totals", std::move(totals)}};
}

std::string render_table(const ResultTable& table) {
  const std::size_t ncol = table.columns.size() + 1;
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> header;
  for (const auto& a : table.columns) header.push_back(a.to_string());
  header.push_back(table.measure);
  lines.push_back(std::move(header));
  for (const auto& r : table.rows) {
    std::vector<std::string> line;
    for (const auto& m : r.members) line.push_back(m.label);
    line.push_back(r.value.to_string());
    lines.push_back(std::move(line));
  }
  const std::string total_value = table.total ? table.total->to_string() : "-";
  std::vector<std::string> total(ncol);
  total[0] = "TOTAL";
  total[ncol - 1] = total_value;

  std::vector<std::size_t> width(ncol, 0);
  for (const auto& line : lines) {
    for (std::size_t c = 0; c < ncol; ++c) width[c] = std::max(width[c], display_width(line[c]));
  }
  if (ncol == 1) {
    // Label and value share the single column.
    width[0] = std::max(width[0], 7 + display_width(total_value));
    total[0] = "TOTAL" + pad(total_value, width[0] - 5, true);
  } else {
    for (std::size_t c = 0; c < ncol; ++c) width[c] = std::max(width[c], display_width(total[c]));
  }
  lines.push_back(std::move(total));
  auto emit = [&](const std::vector<std::string>& line, std::string& out) {
    for (std::size_t c = 0; c < ncol; ++c) {
      if (c) out += "  ";
      const bool last = c + 1 == ncol;
      out += last ? pad(line[c], width[c], true) : pad(line[c], width[c], false);
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  };
  std::string out;
  emit(lines.front(), out);
  std::size_t rule = 0;
  for (std::size_t c = 0; c < ncol; ++c) rule += width[c] + (c ? 2 : 0);
  out += std::string(rule, '-') + "\n";
  for (std::size_t i = 1; i + 1 < lines.size(); ++i) emit(lines[i], out);
  out += std::string(rule, '-') + "\n";
  emit(lines.back(), out);
  return out;
}

std::string render_csv(const ResultTable& table) {
  std::vector<std::string> header;
  for (const auto& a : table.columns) header.push_back(a.to_string());
  header.push_back(table.measure);
  csv::Writer w(header);
  for (const auto& r : table.rows) {
    std::vector<std::string> row;
    for (const auto& m : r.members) row.push_back(m.label);
    row.push_back(r.value.to_string());
    w.row(row);
  }
  return w.str();
}

json metadata_json(const Cube& cube) {
  json dims = json::array();
  for (std::size_t d = 0; d < cube.dims().size(); ++d) {
    const auto& spec = cube.dims()[d];
    json levels = json::array();
    for (std::size_t l = 0; l < spec.levels.size(); ++l) {
      const auto& members = cube.members(d, l);
      json list = json::array();
      std::size_t unknown = 0;
      for (const auto& m : members) {
        list.push_back(member_json(m));
        unknown += m.unknown ? 1 : 0;
      }
      levels.push_back(json{{"name", spec.levels[l]},
                            {"member_count", std::to_string(members.size())},
                            {"unknown_count", std::to_string(unknown)},
                            {"members", std::move(list)}});
    }
    dims.push_back(json{{"name", spec.name}, {"levels", std::move(levels)}});
  }
  json measures = json::array();
  for (const auto& k : cube.measure_keys()) {
    measures.push_back(json{{"technique", std::string(to_string(k.technique))},
                            {"component", k.component},
                            {"unit", std::string(to_string(k.unit))}});
  }
  return json{{"fact_count", std::to_string(cube.fact_count())},
              {"sample_count", std::to_string(cube.sample_count())},
              {"dimensions", std::move(dims)},
              {"measures", std::move(measures)}};
}

Axis parse_axis(std::string_view text) {
  const auto dot = text.find('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == text.size() ||
      text.find('.', dot + 1) != std::string_view::npos)
    throw AxisMismatch("axis must have the form dim.level: '" + std::string(text) + "'");
  return Axis{std::string(text.substr(0, dot)), std::string(text.substr(dot + 1))};
}

json compare_json(const ResultTable& left, const ResultTable& right, const Axis& axis,
                  const std::string& left_cql, const std::string& right_cql) {
  auto check = [&](const ResultTable& t, const char* side) {
    if (t.columns.size() != 1 || t.columns.front() != axis) {
      std::string got;
      for (const auto& a : t.columns) got += (got.empty() ? "" : ", ") + a.to_string();
      throw AxisMismatch(std::string(side) + " query groups by [" + got + "], expected [" +
                         axis.to_string() + "]");
    }
  };
  check(left, "left");
  check(right, "right");

  std::vector<Member> labels;
  for (const auto* t : {&left, &right}) {
    for (const auto& r : t->rows) labels.push_back(r.members.front());
  }
  std::sort(labels.begin(), labels.end(),
            [](const Member& a, const Member& b) { return compare_members(a, b) < 0; });
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

  auto series = [&](const ResultTable& t, const std::string& cql) {
    json values = json::array();
    std::size_t i = 0;
    for (const auto& m : labels) {
      if (i < t.rows.size() && t.rows[i].members.front() == m) {
        values.push_back(t.rows[i++].value.to_string());
      } else {
        values.push_back("0");
      }
    }
    return json{{"cql", cql},
                {"measure", t.measure},
                {"values", std::move(values)},
                {"total", t.total ? t.total->to_string() : "0"}};
  };
  json label_json = json::array();
  for (const auto& m : labels) label_json.push_back(member_json(m));
  return json{{"axis", axis.to_string()},
              {"labels", std::move(label_json)},
              {"left", series(left, left_cql)},
              {"right", series(right, right_cql)}};
}

std::string stable_dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace ceramdw::report
