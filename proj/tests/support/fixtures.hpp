#pragma once

// Small hand-built datasets.

#include <string>

#include "ceramdw/model.hpp"

namespace fx {

using namespace ceramdw;

inline Decimal dec(std::string_view s) { return *Decimal::parse(s); }

inline LocationRef location(std::string id, std::optional<std::string> site, std::optional<std::string> town,
                            std::optional<std::string> region, std::optional<std::string> country) {
  return LocationRef{std::move(id), std::move(site), std::move(town), std::move(region), std::move(country), {}, {}};
}

inline Sample sample(std::string id, std::string location, std::optional<std::string> description = {},
                     std::optional<std::string> dating = {}, std::optional<std::string> group = {}) {
  Sample s;
  s.sample_id = std::move(id);
  s.provenance_ref = std::move(location);
  s.description_ref = std::move(description);
  s.dating_ref = std::move(dating);
  s.group_ref = std::move(group);
  return s;
}

inline AnalysisResult analysis(std::string id, std::string sample, std::string component, std::string_view value,
                               Unit unit = Unit::wt_percent, std::string run = "r1",
                               Technique t = Technique::chemistry) {
  return AnalysisResult{std::move(id), std::move(sample), t, std::move(component), dec(value), unit, std::move(run)};
}

inline Description description(std::string id, std::string typology, std::string category = "GLAZED",
                               std::string free_text = "") {
  Description d;
  d.description_id = std::move(id);
  d.typology = std::move(typology);
  d.category = std::move(category);
  d.free_text = std::move(free_text);
  return d;
}

/// Two countries, a gappy town+country location (Sudak) and a site-only location.
inline Dataset small_dataset() {
  Dataset ds;
  ds.locations = {location("L1", "Agora", "Athens", "Attica", "Greece"),
                  location("L2", "Ancient Corinth", "Corinth", "Peloponnese", "Greece"),
                  location("L3", std::nullopt, "Sudak", std::nullopt, "Ukraine"),
                  location("L4", "Kiln dump", std::nullopt, std::nullopt, std::nullopt)};
  ds.descriptions = {description("D1", "Zeuxippus Ware", "SGRAFF.", "fine slip"),
                     description("D2", "Glazed White Ware", "GLAZED", "imitation of Zeuxippus"),
                     description("D3", "Aegean Ware", "SGRAFF.")};
  ds.datings = {Dating{"DT1", "Medieval", "Byzantine", 1150, 1300}, Dating{"DT2", "Modern", std::nullopt, {}, {}}};
  ds.groups = {ChemicalGroup{"G1", "Zeuxippus Ware stricto sensu", GroupBasis::chemical}};
  ds.samples = {sample("S1", "L1", "D1", "DT1", "G1"), sample("S2", "L1", "D2", "DT1"),
                sample("S3", "L2", "D1", "DT1", "G1"), sample("S4", "L3", "D3", "DT2"),
                sample("S5", "L4")};
  ds.analyses = {analysis("A01", "S1", "Al", "10.0"),  analysis("A02", "S1", "Ca", "3.5"),
                 analysis("A03", "S2", "Al", "12.5"),  analysis("A04", "S2", "Al", "11", Unit::wt_percent, "r2"),
                 analysis("A05", "S3", "Al", "8.25"),  analysis("A06", "S3", "Sr", "400", Unit::ppm),
                 analysis("A07", "S4", "Al", "9"),     analysis("A08", "S5", "Al", "7.5"),
                 analysis("A09", "S5", "fabric", "2", Unit::dimensionless, "r1", Technique::petro)};
  return ds;
}

}  // namespace fx
