#include "ceramdw/scenario.hpp"

#include <algorithm>
#include <random>

#include "bundle_io.hpp"
#include "ceramdw/errors.hpp"
#include "json.hpp"

namespace ceramdw::scenario {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

namespace {

ElementRange element(Technique t, std::string component, Unit unit, std::string_view lo,
                     std::string_view hi) {
  return ElementRange{t, std::move(component), unit, *Decimal::parse(lo), *Decimal::parse(hi)};
}

template <typename Map>
std::int64_t sum_of(const Map& m) {
  std::int64_t s = 0;
  for (const auto& [k, v] : m) s += v;
  return s;
}

}  // namespace

GeneratorManifest GeneratorManifest::defaults() {
  GeneratorManifest m;
  // Free parameters: only the totals and the France / Greece ordering are fixed.
  m.per_country_typology = {{"Turkey", 40}, {"Greece", 45}, {"Ukraine", 22}, {"Israel", 20},
                            {"Egypt", 14},  {"Italy", 18},  {"France", 4}};
  m.per_country_chemical = {{"Turkey", 27}, {"Greece", 15}, {"Ukraine", 14}, {"Israel", 12},
                            {"Egypt", 8},   {"Italy", 9},   {"France", 2}};
  const auto wt = Unit::wt_percent;
  const auto chem = Technique::chemistry;
  m.elements = {
      element(chem, "Al", wt, "6.5", "10.5"),  element(chem, "Ca", wt, "1.5", "12"),
      element(chem, "Fe", wt, "4", "8"),       element(chem, "Mg", wt, "1", "4"),
      element(chem, "K", wt, "1.5", "3.5"),    element(chem, "Ti", wt, "0.4", "1"),
      element(chem, "Sr", Unit::ppm, "150", "600"), element(chem, "Zr", Unit::ppm, "100", "250"),
      element(chem, "Rb", Unit::ppm, "60", "160"),  element(chem, "Ba", Unit::ppm, "300", "800"),
  };
  return m;
}

void GeneratorManifest::check() const {
  auto fail = [](const std::string& msg) { throw InvalidManifest(msg); };
  if (zeuxippus_typology_count < 0 || stricto_sensu_count < 0) fail("counts must be non-negative");
  if (stricto_sensu_count > zeuxippus_typology_count)
    fail("stricto_sensu_count exceeds zeuxippus_typology_count");
  if (total_samples < zeuxippus_typology_count)
    fail("total_samples is smaller than zeuxippus_typology_count");
  if (sum_of(per_country_typology) != zeuxippus_typology_count)
    fail("per_country_typology does not sum to zeuxippus_typology_count");
  if (sum_of(per_country_chemical) != stricto_sensu_count)
    fail("per_country_chemical does not sum to stricto_sensu_count");
  for (const auto& [country, n] : per_country_chemical) {
    auto it = per_country_typology.find(country);
    if (it == per_country_typology.end()) fail("country " + country + " has no typology count");
    if (n < 0 || n > it->second)
      fail("country " + country + ": chemical count must lie in [0, typology count]");
  }
  for (const auto& [country, n] : per_country_typology) {
    if (n < 0) fail("country " + country + ": negative count");
    if (!per_country_chemical.contains(country)) fail("country " + country + " has no chemical count");
  }
  for (double share : {noise_medieval_share, noise_gappy_location_share, noise_missing_dating_share,
                       noise_missing_description_share, repeat_run_share, petro_share}) {
    if (!(share >= 0.0 && share <= 1.0)) fail("shares must lie in [0, 1]");
  }
  if (elements.empty()) fail("element menu is empty");
  for (const auto& e : elements) {
    if (e.component.empty()) fail("element without component");
    if (e.min.is_negative() || e.max < e.min) fail("bad range for " + e.component);
    if (e.unit == Unit::wt_percent && e.max > Decimal::from_int(100))
      fail("wt_percent range above 100 for " + e.component);
  }
}

std::string manifest_to_json(const GeneratorManifest& m) {
  json j;
  j["seed"] = m.seed;
  j["total_samples"] = m.total_samples;
  j["zeuxippus_typology_count"] = m.zeuxippus_typology_count;
  j["stricto_sensu_count"] = m.stricto_sensu_count;
  j["per_country_typology"] = m.per_country_typology;
  j["per_country_chemical"] = m.per_country_chemical;
  j["noise_medieval_share"] = m.noise_medieval_share;
  j["noise_gappy_location_share"] = m.noise_gappy_location_share;
  j["noise_missing_dating_share"] = m.noise_missing_dating_share;
  j["noise_missing_description_share"] = m.noise_missing_description_share;
  j["repeat_run_share"] = m.repeat_run_share;
  j["petro_share"] = m.petro_share;
  json elements = json::array();
  for (const auto& e : m.elements) {
    elements.push_back({{"technique", to_string(e.technique)},
                        {"component", e.component},
                        {"unit", to_string(e.unit)},
                        {"min", e.min.to_string()},
                        {"max", e.max.to_string()}});
  }
  j["elements"] = std::move(elements);
  return j.dump(2) + "\n";
}

GeneratorManifest manifest_from_json(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw InvalidManifest("manifest is not a JSON object");
  GeneratorManifest m = GeneratorManifest::defaults();
  try {
    if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("total_samples")) m.total_samples = j.at("total_samples").get<std::int64_t>();
    if (j.contains("zeuxippus_typology_count"))
      m.zeuxippus_typology_count = j.at("zeuxippus_typology_count").get<std::int64_t>();
    if (j.contains("stricto_sensu_count"))
      m.stricto_sensu_count = j.at("stricto_sensu_count").get<std::int64_t>();
    if (j.contains("per_country_typology"))
      m.per_country_typology = j.at("per_country_typology").get<std::map<std::string, std::int64_t>>();
    if (j.contains("per_country_chemical"))
      m.per_country_chemical = j.at("per_country_chemical").get<std::map<std::string, std::int64_t>>();
    auto share = [&](const char* key, double& out) {
      if (j.contains(key)) out = j.at(key).get<double>();
    };
    share("noise_medieval_share", m.noise_medieval_share);
    share("noise_gappy_location_share", m.noise_gappy_location_share);
    share("noise_missing_dating_share", m.noise_missing_dating_share);
    share("noise_missing_description_share", m.noise_missing_description_share);
    share("repeat_run_share", m.repeat_run_share);
    share("petro_share", m.petro_share);
    if (j.contains("elements")) {
      m.elements.clear();
      for (const auto& e : j.at("elements")) {
        ElementRange r;
        auto tech = parse_technique(e.at("technique").get<std::string>());
        auto unit = parse_unit(e.at("unit").get<std::string>());
        auto lo = Decimal::parse(e.at("min").get<std::string>());
        auto hi = Decimal::parse(e.at("max").get<std::string>());
        if (!tech || !unit || !lo || !hi) throw InvalidManifest("bad element entry: " + e.dump());
        r.technique = *tech;
        r.component = e.at("component").get<std::string>();
        r.unit = *unit;
        r.min = *lo;
        r.max = *hi;
        m.elements.push_back(std::move(r));
      }
    }
  } catch (const json::exception& e) {
    throw InvalidManifest(std::string("manifest field has the wrong type: ") + e.what());
  }
  m.check();
  return m;
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

namespace {

struct Place {
  const char* country;
  const char* region;
  const char* town;
  const char* site;
  double lat, lon;
  bool gappy;
};

// nullptr = level missing. Sudak and Acre carry no site reference.
constexpr Place kGazetteer[] = {
    {"Turkey", "Marmara", "Istanbul", "Sarachane", 41.016, 28.954, false},
    {"Turkey", "Marmara", "Istanbul", "Great Palace", 41.006, 28.976, false},
    {"Turkey", "Marmara", "Iznik", "Iznik kilns", 40.429, 29.721, false},
    {"Turkey", "Hatay", "Dortyol", "Kinet Hoyuk", 36.850, 36.150, false},
    {"Greece", "Attica", "Athens", "Agora", 37.975, 23.722, false},
    {"Greece", "Peloponnese", "Corinth", "Ancient Corinth", 37.906, 22.879, false},
    {"Greece", "Central Macedonia", "Thessaloniki", "Agia Sofia", 40.633, 22.947, false},
    {"Greece", "Peloponnese", "Sparti", "Sparta acropolis", 37.081, 22.425, false},
    {"Ukraine", nullptr, "Sudak", nullptr, 44.851, 34.975, true},
    {"Ukraine", "Crimea", "Sevastopol", "Chersonesos", 44.611, 33.493, false},
    {"Israel", nullptr, "Acre", nullptr, 32.927, 35.076, true},
    {"Israel", "Haifa District", "Caesarea", "Caesarea harbour", 32.500, 34.892, false},
    {"Egypt", "Cairo Governorate", "Cairo", "Fustat", 30.006, 31.232, false},
    {"Egypt", "Alexandria Governorate", "Alexandria", "Kom el-Dikka", 31.195, 29.905, false},
    {"Italy", "Veneto", "Venice", "San Lorenzo", 45.437, 12.342, false},
    {"Italy", "Apulia", "Otranto", "Otranto castle", 40.146, 18.491, false},
    {"France", "Provence", "Marseille", "Place Jules-Verne", 43.296, 5.370, false},
    {"Cyprus", "Paphos District", "Paphos", "Saranda Kolones", 34.757, 32.406, false},
    {"Bulgaria", "Burgas", "Nessebar", "Old town", 42.659, 27.735, false},
    // Gappy noise locations.
    {nullptr, nullptr, nullptr, "Unprovenanced lot", 0, 0, true},
    {nullptr, "Aegean", nullptr, nullptr, 0, 0, true},
    {"Cyprus", nullptr, nullptr, nullptr, 0, 0, true},
    {nullptr, "Crimea", "Feodosia", nullptr, 0, 0, true},
};

struct DatingDef {
  const char* id;
  const char* period;
  const char* sub_period;
  int start, end;
  bool medieval;
};

constexpr DatingDef kDatings[] = {
    {"DT-BYZ", "Medieval", "Byzantine", 1150, 1300, true},
    {"DT-MED", "Medieval", nullptr, 1000, 1450, true},
    {"DT-FRK", "Medieval", "Frankish", 1204, 1400, true},
    {"DT-ROM", "Antiquity", "Roman", -27, 395, false},
    {"DT-HEL", "Antiquity", "Hellenistic", -323, -31, false},
    {"DT-OTT", "Modern", "Ottoman", 1453, 1800, false},
};

struct GroupDef {
  const char* id;
  const char* name;
  GroupBasis basis;
};

constexpr GroupDef kGroups[] = {
    {"G-ZX", "Zeuxippus Ware stricto sensu", GroupBasis::chemical},
    {"G-IMA", "Imitation group A", GroupBasis::chemical},
    {"G-IMB", "Imitation group B", GroupBasis::chemical},
    {"G-P1", "Fabric group P1", GroupBasis::petrographic},
    {"G-BGW", "Byzantine glazed group", GroupBasis::chemical},
    {"G-AMP", "Amphora group", GroupBasis::chemical},
};

struct NoiseWare {
  const char* typology;
  const char* category;
};

constexpr NoiseWare kNoiseWares[] = {
    {"Glazed White Ware", "GLAZED"},       {"Fine Sgraffito Ware", "SGRAFF."},
    {"Incised Sgraffito Ware", "SGRAFF."}, {"Aegean Ware", "SGRAFF."},
    {"Gunsenin III amphora", "AMPH."},     {"Cooking ware", "COOK."},
    {"Polychrome Ware", "FINE"},           {"Plain common ware", "COMM."},
};

constexpr const char* kImitationTypologies[] = {"Zeuxippus Ware imitation",
                                                "Zeuxippus Ware derivative",
                                                "Zeuxippus Ware family"};
constexpr const char* kParts[] = {"rim", "base", "body", "handle"};

// Engine output is specified by the standard; distributions are not, so bounded
// draws are done by hand to keep bundles identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }
  template <typename T, std::size_t N>
  const T& pick(const T (&arr)[N]) {
    return arr[below(N)];
  }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

enum class Kind { stricto, imitation, noise };

struct SampleSpec {
  Kind kind;
  std::string country;  // empty for noise
};

std::string padded(std::string_view prefix, std::size_t n, int width) {
  std::string digits = std::to_string(n);
  if (static_cast<int>(digits.size()) < width)
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return std::string(prefix) + digits;
}

std::optional<std::string> opt(const char* s) {
  return s ? std::optional<std::string>(s) : std::nullopt;
}

Decimal draw(Rng& rng, const Decimal& lo, const Decimal& hi) {
  const __int128 step = Decimal::kScale / 1000;
  const auto n = static_cast<std::uint64_t>((hi.raw() - lo.raw()) / step);
  return Decimal::from_raw(lo.raw() + step * static_cast<__int128>(rng.below(n + 1)));
}

}  // namespace

Dataset generate_dataset(const GeneratorManifest& manifest) {
  manifest.check();
  Rng rng(manifest.seed);
  Dataset ds;

  std::vector<std::size_t> regular, gappy_noise;
  for (std::size_t i = 0; i < std::size(kGazetteer); ++i) {
    const Place& p = kGazetteer[i];
    LocationRef loc;
    loc.location_id = padded("L", i + 1, 3);
    loc.site = opt(p.site);
    loc.town = opt(p.town);
    loc.region = opt(p.region);
    loc.country = opt(p.country);
    if (p.lat != 0 || p.lon != 0) {
      loc.latitude = p.lat;
      loc.longitude = p.lon;
    }
    ds.locations.push_back(std::move(loc));
    if (!p.gappy) regular.push_back(i);
    if (p.gappy && !(p.country && p.town && !p.site)) gappy_noise.push_back(i);
  }
  auto places_in = [&](const std::string& country) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < std::size(kGazetteer); ++i) {
      const Place& p = kGazetteer[i];
      if (p.country && country == p.country && (!p.gappy || p.town)) out.push_back(i);
    }
    if (out.empty()) throw InvalidManifest("no gazetteer entry for country " + country);
    return out;
  };

  for (const auto& d : kDatings) {
    ds.datings.push_back(Dating{d.id, d.period, opt(d.sub_period), d.start, d.end});
  }
  for (const auto& g : kGroups) ds.groups.push_back(ChemicalGroup{g.id, g.name, g.basis});

  std::vector<SampleSpec> specs;
  for (const auto& [country, typology] : manifest.per_country_typology) {
    const auto chemical = manifest.per_country_chemical.at(country);
    for (std::int64_t i = 0; i < chemical; ++i) specs.push_back({Kind::stricto, country});
    for (std::int64_t i = chemical; i < typology; ++i) specs.push_back({Kind::imitation, country});
  }
  for (std::int64_t i = manifest.zeuxippus_typology_count; i < manifest.total_samples; ++i)
    specs.push_back({Kind::noise, ""});
  rng.shuffle(specs);

  std::size_t analysis_seq = 0, media_seq = 0;
  auto add_analysis = [&](const std::string& sample, Technique t, const std::string& component,
                          Decimal value, Unit unit, const std::string& run) {
    ds.analyses.push_back(AnalysisResult{padded("A", ++analysis_seq, 7), sample, t, component, value,
                                         unit, run});
  };

  for (std::size_t n = 0; n < specs.size(); ++n) {
    const SampleSpec& spec = specs[n];
    Sample s;
    s.sample_id = padded("S", n + 1, 5);

    // Provenance.
    std::size_t place;
    if (spec.kind == Kind::noise) {
      place = rng.chance(manifest.noise_gappy_location_share) ? gappy_noise[rng.below(gappy_noise.size())]
                                                               : regular[rng.below(regular.size())];
    } else {
      const auto options = places_in(spec.country);
      place = options[rng.below(options.size())];
    }
    s.provenance_ref = ds.locations[place].location_id;

    // Dating.
    if (spec.kind != Kind::noise) {
      s.dating_ref = rng.chance(0.8) ? "DT-BYZ" : "DT-MED";
    } else if (!rng.chance(manifest.noise_missing_dating_share)) {
      const bool medieval = rng.chance(manifest.noise_medieval_share);
      std::vector<const DatingDef*> pool;
      for (const auto& d : kDatings) {
        if (d.medieval == medieval) pool.push_back(&d);
      }
      s.dating_ref = pool[rng.below(pool.size())]->id;
    }

    // Description.
    const bool described = spec.kind != Kind::noise || !rng.chance(manifest.noise_missing_description_share);
    if (described) {
      Description d;
      d.description_id = padded("D", n + 1, 5);
      switch (spec.kind) {
        case Kind::stricto:
          d.typology = "Zeuxippus Ware";
          d.category = "SGRAFF.";
          d.free_text = "Zeuxippus Ware stricto sensu; fine red fabric, white slip, incised decoration";
          break;
        case Kind::imitation:
          d.typology = rng.pick(kImitationTypologies);
          d.category = "GLAZED";
          d.free_text = "Regional production related to Zeuxippus Ware; coarser fabric";
          break;
        case Kind::noise: {
          const NoiseWare& w = rng.pick(kNoiseWares);
          d.typology = w.typology;
          d.category = w.category;
          d.free_text = std::string(w.typology) + " sherd";
          break;
        }
      }
      d.part_object = rng.pick(kParts);
      d.waster = rng.chance(0.03);
      if (rng.chance(0.5)) d.firing_mode = std::string("mode ") + static_cast<char>('A' + rng.below(3));
      s.description_ref = d.description_id;
      ds.descriptions.push_back(std::move(d));
    }

    // Group.
    switch (spec.kind) {
      case Kind::stricto: s.group_ref = "G-ZX"; break;
      case Kind::imitation: {
        static constexpr const char* kImitationGroups[] = {"G-IMA", "G-IMB", "G-P1", nullptr};
        if (const char* g = rng.pick(kImitationGroups)) s.group_ref = g;
        break;
      }
      case Kind::noise: {
        static constexpr const char* kNoiseGroups[] = {"G-BGW", "G-AMP", nullptr, nullptr};
        if (const char* g = rng.pick(kNoiseGroups)) s.group_ref = g;
        break;
      }
    }

    // Media.
    if (rng.chance(0.3)) {
      const auto id = padded("M", ++media_seq, 5);
      const bool drawing = rng.chance(0.3);
      ds.media.push_back(MediaRef{id, drawing ? MediaKind::drawing : MediaKind::photo,
                                  "media/" + id + (drawing ? ".svg" : ".jpg"),
                                  "Sample " + s.sample_id});
      s.media.push_back(id);
    }

    // Analyses.
    const int runs = rng.chance(manifest.repeat_run_share) ? 2 : 1;
    for (int r = 1; r <= runs; ++r) {
      const std::string tag = "r" + std::to_string(r);
      for (const auto& e : manifest.elements)
        add_analysis(s.sample_id, e.technique, e.component, draw(rng, e.min, e.max), e.unit, tag);
    }
    if (rng.chance(manifest.petro_share)) {
      add_analysis(s.sample_id, Technique::petro, "fabric_class",
                   Decimal::from_int(static_cast<std::int64_t>(1 + rng.below(6))), Unit::dimensionless, "r1");
      add_analysis(s.sample_id, Technique::bino, "inclusion_density",
                   draw(rng, Decimal::from_int(0), Decimal::from_int(40)), Unit::dimensionless, "r1");
    }

    ds.samples.push_back(std::move(s));
  }
  return ds;
}

namespace {

using Cells = std::vector<std::optional<std::string>>;

std::optional<std::string> num(std::optional<double> v) {
  return v ? std::optional<std::string>(detail::format_double(*v)) : std::nullopt;
}
std::optional<std::string> num(std::optional<int> v) {
  return v ? std::optional<std::string>(std::to_string(*v)) : std::nullopt;
}

std::string write(std::initializer_list<std::string> header, const std::vector<Cells>& rows) {
  std::vector<std::string> h(header);
  return detail::write_table(BundleFormat::csv_bundle, h, rows);
}

}  // namespace

FileSet generate(const GeneratorManifest& manifest) {
  const Dataset ds = generate_dataset(manifest);
  FileSet files;
  std::vector<Cells> rows;

  for (const auto& s : ds.samples) {
    std::string media;
    for (std::size_t i = 0; i < s.media.size(); ++i) media += (i ? ";" : "") + s.media[i];
    rows.push_back({s.sample_id, s.description_ref, s.provenance_ref, s.dating_ref, s.group_ref,
                    media.empty() ? std::nullopt : std::optional<std::string>(media)});
  }
  files["samples.csv"] = write(
      {"sample_id", "description_id", "provenance_id", "dating_id", "group_id", "media_ids"}, rows);

  rows.clear();
  for (const auto& l : ds.locations)
    rows.push_back({l.location_id, l.site, l.town, l.region, l.country, num(l.latitude), num(l.longitude)});
  files["locations.csv"] =
      write({"location_id", "site", "town", "region", "country", "lat", "lon"}, rows);

  rows.clear();
  for (const auto& a : ds.analyses)
    rows.push_back({a.analysis_id, a.sample_ref, std::string(to_string(a.technique)), a.component,
                    a.value.to_string(), std::string(to_string(a.unit)), a.run_tag});
  files["analyses.csv"] = write(
      {"analysis_id", "sample_id", "technique", "component", "value", "unit", "run_tag"}, rows);

  rows.clear();
  for (const auto& d : ds.descriptions)
    rows.push_back({d.description_id, d.free_text, d.typology, d.category, d.part_object,
                    std::string(d.waster ? "true" : "false"), d.firing_mode});
  files["descriptions.csv"] = write({"description_id", "free_text", "typology", "category",
                                     "part_object", "waster", "firing_mode"},
                                    rows);

  rows.clear();
  for (const auto& d : ds.datings)
    rows.push_back({d.dating_id, d.period, d.sub_period, num(d.start_year), num(d.end_year)});
  files["datings.csv"] =
      write({"dating_id", "period", "sub_period", "start_year", "end_year"}, rows);

  rows.clear();
  for (const auto& g : ds.groups)
    rows.push_back({g.group_id, g.name, std::string(to_string(g.basis))});
  files["groups.csv"] = write({"group_id", "name", "basis"}, rows);

  rows.clear();
  for (const auto& m : ds.media)
    rows.push_back({m.media_id, std::string(to_string(m.kind)), m.uri, m.caption});
  files["media.csv"] = write({"media_id", "kind", "uri", "caption"}, rows);

  files["manifest.json"] = manifest_to_json(manifest);
  return files;
}

}  // namespace ceramdw::scenario
