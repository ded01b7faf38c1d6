#pragma once

// Typed records for the ceramic reference database: a Sample hub linked to
// geography, description, dating, chemical grouping, analyses and media.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ceramdw/decimal.hpp"

namespace ceramdw {

enum class Technique { chemistry, petro, bino, sem, diffraction, dilato, other };
enum class Unit { wt_percent, ppm, dimensionless };
enum class GroupBasis { chemical, petrographic, other };
enum class MediaKind { drawing, photo, petrographic_image, binocular_image, other };
enum class LocationLevel { site, town, region, country };

inline constexpr Technique kAllTechniques[] = {Technique::chemistry, Technique::petro,
                                               Technique::bino,      Technique::sem,
                                               Technique::diffraction, Technique::dilato,
                                               Technique::other};
inline constexpr Unit kAllUnits[] = {Unit::wt_percent, Unit::ppm, Unit::dimensionless};
inline constexpr LocationLevel kAllLocationLevels[] = {LocationLevel::site, LocationLevel::town,
                                                       LocationLevel::region,
                                                       LocationLevel::country};

std::string_view to_string(Technique t);  // "CHEMISTRY", "PETRO", ...
std::string_view to_string(Unit u);       // "wt_percent", "ppm", "dimensionless"
std::string_view to_string(GroupBasis b);
std::string_view to_string(MediaKind k);
std::string_view to_string(LocationLevel l);

// Parsers accept the canonical spelling case-insensitively.
std::optional<Technique> parse_technique(std::string_view s);
std::optional<Unit> parse_unit(std::string_view s);
std::optional<GroupBasis> parse_group_basis(std::string_view s);
std::optional<MediaKind> parse_media_kind(std::string_view s);
std::optional<LocationLevel> parse_location_level(std::string_view s);

struct MediaRef {
  std::string media_id;
  MediaKind kind = MediaKind::other;
  std::string uri;
  std::optional<std::string> caption;

  bool operator==(const MediaRef&) const = default;
};

struct LocationRef {
  std::string location_id;
  std::optional<std::string> site;
  std::optional<std::string> town;
  std::optional<std::string> region;
  std::optional<std::string> country;
  std::optional<double> latitude;
  std::optional<double> longitude;

  const std::optional<std::string>& level(LocationLevel l) const;
  std::optional<std::string>& level(LocationLevel l);

  bool operator==(const LocationRef&) const = default;
};

struct Description {
  std::string description_id;
  std::string free_text;
  std::string typology;
  std::string category;
  std::optional<std::string> part_object;
  bool waster = false;
  std::optional<std::string> firing_mode;
  std::optional<std::string> legal_status;

  bool operator==(const Description&) const = default;
};

struct Dating {
  std::string dating_id;
  std::string period;
  std::optional<std::string> sub_period;
  std::optional<int> start_year;
  std::optional<int> end_year;

  bool operator==(const Dating&) const = default;
};

struct ChemicalGroup {
  std::string group_id;
  std::string name;
  GroupBasis basis = GroupBasis::chemical;

  bool operator==(const ChemicalGroup&) const = default;
};

struct AnalysisResult {
  std::string analysis_id;
  std::string sample_ref;
  Technique technique = Technique::chemistry;
  std::string component;
  Decimal value;
  Unit unit = Unit::wt_percent;
  std::string run_tag;

  bool operator==(const AnalysisResult&) const = default;
};

// A sample lacking a description or dating is legal; it is routed to the
// UNKNOWN member of that dimension when the star is built.
struct Sample {
  std::string sample_id;
  std::optional<std::string> description_ref;
  std::string provenance_ref;
  std::optional<std::string> supposed_origin_ref;
  std::optional<std::string> attribution_ref;
  std::optional<std::string> storage_outside_ref;
  std::optional<std::string> dating_ref;
  std::optional<std::string> group_ref;
  std::vector<std::string> media;

  bool operator==(const Sample&) const = default;
};

struct Dataset {
  std::vector<Sample> samples;
  std::vector<LocationRef> locations;
  std::vector<Description> descriptions;
  std::vector<Dating> datings;
  std::vector<ChemicalGroup> groups;
  std::vector<AnalysisResult> analyses;
  std::vector<MediaRef> media;

  bool operator==(const Dataset&) const = default;
};

/// Controlled vocabularies. These are data: the defaults mirror
/// data/vocabulary/*.txt and can be replaced at run time.
struct Vocabulary {
  std::vector<std::string> categories;
  /// Empty means any period label is accepted.
  std::vector<std::string> periods;

  static Vocabulary defaults();
  /// Reads one entry per line; blank lines and lines starting with '#' are skipped.
  static std::vector<std::string> parse_list(std::string_view text);
};

}  // namespace ceramdw
