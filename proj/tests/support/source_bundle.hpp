#pragma once

// Writes a Dataset as a source bundle (CSV or JSON) so ingestion tests can start
// from records.

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ceramdw/csv.hpp"
#include "ceramdw/etl.hpp"
#include "json.hpp"

namespace fx {

using namespace ceramdw;

using Cell = std::optional<std::string>;

inline Cell opt_num(std::optional<double> v) {
  if (!v) return std::nullopt;
  std::ostringstream s;
  s.precision(17);
  s << *v;
  return s.str();
}

inline Cell opt_int(std::optional<int> v) { return v ? Cell(std::to_string(*v)) : std::nullopt; }

inline std::string render(BundleFormat format, const std::vector<std::string>& header,
                          const std::vector<std::vector<Cell>>& rows) {
  if (format == BundleFormat::csv_bundle) {
    csv::Writer w(header);
    for (const auto& row : rows) {
      std::vector<std::string> fields;
      for (const auto& c : row) fields.push_back(c.value_or(""));
      w.row(fields);
    }
    return w.str();
  }
  auto doc = nlohmann::json::array();
  for (const auto& row : rows) {
    auto obj = nlohmann::json::object();
    for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = row[i] ? nlohmann::json(*row[i]) : nullptr;
    doc.push_back(std::move(obj));
  }
  return doc.dump();
}

inline FileSet source_bundle(const Dataset& ds, BundleFormat format = BundleFormat::csv_bundle) {
  const std::string ext = format == BundleFormat::csv_bundle ? ".csv" : ".json";
  FileSet out;
  std::vector<std::vector<Cell>> rows;
  for (const auto& s : ds.samples) {
    std::string media;
    for (std::size_t i = 0; i < s.media.size(); ++i) media += (i ? ";" : "") + s.media[i];
    rows.push_back({s.sample_id, s.description_ref, s.provenance_ref, s.dating_ref, s.group_ref,
                    media.empty() ? Cell() : Cell(media), s.supposed_origin_ref, s.attribution_ref,
                    s.storage_outside_ref});
  }
  out["samples" + ext] = render(format,
                                {"sample_id", "description_id", "provenance_id", "dating_id", "group_id",
                                 "media_ids", "supposed_origin_id", "attribution_id", "storage_outside_id"},
                                rows);
  rows.clear();
  for (const auto& l : ds.locations)
    rows.push_back({l.location_id, l.site, l.town, l.region, l.country, opt_num(l.latitude), opt_num(l.longitude)});
  out["locations" + ext] = render(format, {"location_id", "site", "town", "region", "country", "lat", "lon"}, rows);
  rows.clear();
  for (const auto& a : ds.analyses)
    rows.push_back({a.analysis_id, a.sample_ref, std::string(to_string(a.technique)), a.component,
                    a.value.to_string(), std::string(to_string(a.unit)), a.run_tag});
  out["analyses" + ext] =
      render(format, {"analysis_id", "sample_id", "technique", "component", "value", "unit", "run_tag"}, rows);
  rows.clear();
  for (const auto& d : ds.descriptions)
    rows.push_back({d.description_id, d.free_text, d.typology, d.category, d.part_object,
                    std::string(d.waster ? "true" : "false"), d.firing_mode, d.legal_status});
  out["descriptions" + ext] = render(format,
                                     {"description_id", "free_text", "typology", "category", "part_object",
                                      "waster", "firing_mode", "legal_status"},
                                     rows);
  rows.clear();
  for (const auto& d : ds.datings)
    rows.push_back({d.dating_id, d.period, d.sub_period, opt_int(d.start_year), opt_int(d.end_year)});
  out["datings" + ext] = render(format, {"dating_id", "period", "sub_period", "start_year", "end_year"}, rows);
  rows.clear();
  for (const auto& g : ds.groups) rows.push_back({g.group_id, g.name, std::string(to_string(g.basis))});
  out["groups" + ext] = render(format, {"group_id", "name", "basis"}, rows);
  rows.clear();
  for (const auto& m : ds.media) rows.push_back({m.media_id, std::string(to_string(m.kind)), m.uri, m.caption});
  out["media" + ext] = render(format, {"media_id", "kind", "uri", "caption"}, rows);
  return out;
}

}  // namespace fx
