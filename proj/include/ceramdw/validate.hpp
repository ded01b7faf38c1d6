#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "ceramdw/errors.hpp"
#include "ceramdw/model.hpp"

namespace ceramdw {

/// A member of a dimension level. Sentinels (UNKNOWN(level), UNGROUPED) carry
/// unknown = true and a bracketed display label such as "⟨unknown site⟩".
struct Member {
  std::string label;
  bool unknown = false;

  static Member known(std::string label) { return Member{std::move(label), false}; }
  static Member unknown_at(std::string_view level);
  static Member ungrouped();

  bool operator==(const Member&) const = default;
};

/// Output order: known members lexicographically by label, sentinels last.
std::strong_ordering compare_members(const Member& a, const Member& b);

/// Returns the label stored at `level`, or UNKNOWN(level). Other levels are never
/// consulted.
Member resolve_location_level(const LocationRef& loc, LocationLevel level);

// Rule ids attached to violations.
namespace rule {
inline constexpr std::string_view id_nonempty = "id_nonempty";
inline constexpr std::string_view duplicate_id = "duplicate_id";
inline constexpr std::string_view ref_integrity = "ref_integrity";
inline constexpr std::string_view location_nonempty = "location_nonempty";
inline constexpr std::string_view coord_pair = "coord_pair";
inline constexpr std::string_view latitude_range = "latitude_range";
inline constexpr std::string_view longitude_range = "longitude_range";
inline constexpr std::string_view category_vocab = "category_vocab";
inline constexpr std::string_view period_vocab = "period_vocab";
inline constexpr std::string_view firing_mode_format = "firing_mode_format";
inline constexpr std::string_view dating_order = "dating_order";
inline constexpr std::string_view group_name_nonempty = "group_name_nonempty";
inline constexpr std::string_view value_nonneg = "value_nonneg";
inline constexpr std::string_view wt_percent_max = "wt_percent_max";
inline constexpr std::string_view analysis_unique_run = "analysis_unique_run";
inline constexpr std::string_view media_uri_nonempty = "media_uri_nonempty";
}  // namespace rule

struct Violation {
  std::string record_type;  // "sample", "location", "analysis", ...
  std::string record_id;
  std::string rule;
  std::string detail;

  bool operator==(const Violation&) const = default;
  auto operator<=>(const Violation&) const = default;
};

/// Violations in canonical (sorted, de-duplicated) order.
using ValidationReport = std::vector<Violation>;

/// Checks every structural invariant of the record types. Pure; the result does
/// not depend on the order of records inside the dataset.
ValidationReport validate_dataset(const Dataset& dataset,
                                  const Vocabulary& vocabulary = Vocabulary::defaults());

class ValidationFailed : public Error {
 public:
  explicit ValidationFailed(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

}  // namespace ceramdw
