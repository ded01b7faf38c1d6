#pragma once

// Serialized forms of engine results shared by the HTTP service and the CLI.
// Every number is written as a decimal string. docs/api.md lists the schemas.

#include <optional>
#include <string>

#include "ceramdw/cube.hpp"
#include "ceramdw/errors.hpp"
#include "json.hpp"

namespace ceramdw::report {

using nlohmann::json;

class AxisMismatch : public Error {
 public:
  using Error::Error;
};

json member_json(const Member& m);

/// {"columns", "measure", "rows", "totals"}; totals is null when no fact matched.
json result_json(const ResultTable& table);

/// Right-aligned numbers, left-aligned labels, closing TOTAL line.
std::string render_table(const ResultTable& table);
/// Header row then one row per cell; CRLF line ends.
std::string render_csv(const ResultTable& table);

/// {"fact_count", "sample_count", "dimensions": [{"name", "levels": [{"name",
/// "member_count", "unknown_count", "members": [{"label", "unknown"}]}]}], "measures"}.
json metadata_json(const Cube& cube);

/// Parses "dim.level".
Axis parse_axis(std::string_view text);

/// Paired series for a grouped bar chart. Both tables must be grouped by exactly
/// `axis`; labels are the union of both member sets in output order and absent
/// members are filled with "0". Throws AxisMismatch.
json compare_json(const ResultTable& left, const ResultTable& right, const Axis& axis,
                  const std::string& left_cql, const std::string& right_cql);

/// Dump with sorted keys and two-space indent, newline terminated.
std::string stable_dump(const json& j);

}  // namespace ceramdw::report
