#pragma once

// Deterministic synthetic source bundles. The manifest fixes every reported count
// (the Zeuxippus typology and chemical-group totals and their per-country split);
// everything else is seeded noise.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ceramdw/etl.hpp"
#include "ceramdw/model.hpp"

namespace ceramdw::scenario {

inline constexpr std::string_view kZeuxippusTerm = "Zeuxippus";
inline constexpr std::string_view kStrictoSensuGroup = "Zeuxippus Ware stricto sensu";

struct ElementRange {
  Technique technique = Technique::chemistry;
  std::string component;
  Unit unit = Unit::wt_percent;
  Decimal min, max;

  bool operator==(const ElementRange&) const = default;
};

struct GeneratorManifest {
  std::uint64_t seed = 1204;
  /// Zeuxippus samples plus noise samples.
  std::int64_t total_samples = 420;
  std::int64_t zeuxippus_typology_count = 163;
  std::int64_t stricto_sensu_count = 87;
  /// Country -> samples whose description mentions Zeuxippus (typological series).
  std::map<std::string, std::int64_t> per_country_typology;
  /// Country -> samples in the stricto sensu chemical group (chemical series).
  std::map<std::string, std::int64_t> per_country_chemical;

  // Noise parameters, as shares of the noise samples.
  double noise_medieval_share = 0.4;
  double noise_gappy_location_share = 0.15;
  double noise_missing_dating_share = 0.05;
  double noise_missing_description_share = 0.05;
  /// Share of all samples analysed twice by chemistry (run tags r1, r2).
  double repeat_run_share = 0.1;
  /// Share of all samples that also carry petrographic and binocular records.
  double petro_share = 0.3;
  std::vector<ElementRange> elements;

  /// Default parameters used by the acceptance bundle.
  static GeneratorManifest defaults();
  /// Throws InvalidManifest when a count or range constraint fails.
  void check() const;

  bool operator==(const GeneratorManifest&) const = default;
};

std::string manifest_to_json(const GeneratorManifest& m);
/// Missing keys take their default values. Throws InvalidManifest on bad input.
GeneratorManifest manifest_from_json(std::string_view text);

/// Same manifest => identical dataset.
Dataset generate_dataset(const GeneratorManifest& manifest);

/// CSV source bundle plus "manifest.json"; byte-identical for a fixed manifest.
FileSet generate(const GeneratorManifest& manifest);

/// Canonical scenario queries.
inline constexpr std::string_view kTypologyQuery =
    R"(MEASURE count(samples) WHERE dating.period = "Medieval" WHERE description CONTAINS "Zeuxippus" GROUP BY provenance AT country;)";
inline constexpr std::string_view kChemicalQuery =
    R"(MEASURE count(samples) WHERE groups = "Zeuxippus Ware stricto sensu" GROUP BY provenance AT country;)";

}  // namespace ceramdw::scenario
