#pragma once

// Source ingestion and the star schema: one fact per individual measurement,
// keyed to the provenance, dating, description and group dimensions.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ceramdw/model.hpp"
#include "ceramdw/validate.hpp"

namespace ceramdw {

enum class BundleFormat { csv_bundle, json_bundle };

std::optional<BundleFormat> parse_bundle_format(std::string_view s);

/// Named byte streams, e.g. {"samples.csv" -> contents}.
using FileSet = std::map<std::string, std::string>;

using DimKey = std::uint32_t;
/// Key of the sentinel row in the dating, description and group dimensions.
inline constexpr DimKey kSentinelKey = 0;

struct ProvenanceRow {
  DimKey key = 0;
  std::string location_id;
  Member site, town, region, country;
  std::optional<double> latitude;
  std::optional<double> longitude;

  const Member& level(LocationLevel l) const;
  bool operator==(const ProvenanceRow&) const = default;
};

struct DatingRow {
  DimKey key = 0;
  std::string dating_id;  // empty for the sentinel
  Member sub_period, period;
  std::optional<int> start_year;
  std::optional<int> end_year;

  bool operator==(const DatingRow&) const = default;
};

struct DescriptionRow {
  DimKey key = 0;
  std::string description_id;  // empty for the sentinel
  Member typology, category;
  std::string free_text;
  std::optional<std::string> part_object;
  bool waster = false;
  std::optional<std::string> firing_mode;

  bool operator==(const DescriptionRow&) const = default;
};

struct GroupRow {
  DimKey key = 0;
  std::string group_id;  // empty for UNGROUPED
  Member name;
  std::optional<GroupBasis> basis;

  bool operator==(const GroupRow&) const = default;
};

struct FactRecord {
  std::string sample_id;
  std::string analysis_id;
  /// Identifies the analysis run together with sample_id and technique.
  std::string run_tag;
  Technique technique = Technique::chemistry;
  std::string component;
  Decimal value;
  Unit unit = Unit::wt_percent;
  DimKey provenance_key = 0;
  DimKey dating_key = 0;
  DimKey description_key = 0;
  DimKey group_key = 0;

  bool operator==(const FactRecord&) const = default;
};

/// Canonical layout: facts sorted by analysis_id; every dimension table sorted by
/// key, where key i is the position of the row. Real rows are numbered in natural-id
/// order starting at 1; dating/description/group tables always hold the sentinel at
/// key 0. Dimension tables contain the rows referenced by at least one fact.
struct StarSchema {
  std::vector<FactRecord> facts;
  std::vector<ProvenanceRow> dim_provenance;  // key i at index i - 1
  std::vector<DatingRow> dim_dating;
  std::vector<DescriptionRow> dim_description;
  std::vector<GroupRow> dim_group;

  const ProvenanceRow& provenance(DimKey k) const { return dim_provenance.at(k - 1); }
  const DatingRow& dating(DimKey k) const { return dim_dating.at(k); }
  const DescriptionRow& description(DimKey k) const { return dim_description.at(k); }
  const GroupRow& group(DimKey k) const { return dim_group.at(k); }

  bool operator==(const StarSchema&) const = default;
};

/// Parses a source bundle. Required: samples, locations, analyses. Optional:
/// descriptions, datings, groups, media. Column names are strict, column order is
/// free. Throws MissingFile, MalformedRow or DuplicateId.
Dataset parse_source(const FileSet& files, BundleFormat format);

/// Optional repair of gappy locations from an external reference; none by default.
using LocationEnricher = std::function<LocationRef(const LocationRef&)>;

struct BuildOptions {
  Vocabulary vocabulary = Vocabulary::defaults();
  LocationEnricher enricher;
};

/// Flattens a valid dataset into the star. Throws ValidationFailed when
/// validate_dataset reports anything.
StarSchema build_star(const Dataset& dataset, const BuildOptions& options = {});

/// Star bundle: facts + four dimension files, in CSV or JSON.
FileSet export_star(const StarSchema& star, BundleFormat format);
/// Inverse of export_star. Throws MissingFile or MalformedRow.
StarSchema import_star(const FileSet& files, BundleFormat format);

/// Reads every regular file of a directory into a FileSet (non-recursive).
FileSet read_directory(const std::string& dir);
void write_directory(const std::string& dir, const FileSet& files);

}  // namespace ceramdw
