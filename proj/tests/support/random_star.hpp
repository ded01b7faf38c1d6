#pragma once

// Random valid datasets (small label pools so members repeat, gappy locations,
// missing references) and random cube layouts.

#include <random>
#include <set>
#include <string>
#include <vector>

#include "ceramdw/cube.hpp"
#include "ceramdw/model.hpp"

namespace gen {

using namespace ceramdw;

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(engine() % n); }
  bool chance(double p) { return static_cast<double>(engine() >> 11) * 0x1.0p-53 < p; }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }
};

inline std::optional<std::string> maybe(Rng& r, double p, const std::vector<std::string>& pool) {
  if (!r.chance(p)) return std::nullopt;
  return r.pick(pool);
}

inline Decimal random_value(Rng& r, std::int64_t max_units) {
  // Up to three decimals.
  const auto milli = static_cast<std::int64_t>(r.below(static_cast<std::size_t>(max_units * 1000 + 1)));
  return Decimal::from_raw(static_cast<__int128>(milli) * (Decimal::kScale / 1000));
}

inline Dataset random_dataset(Rng& r, std::size_t max_facts = 500) {
  Dataset ds;
  const std::vector<std::string> sites{"s1", "s2", "s3", "s4", "s5", "s6"};
  const std::vector<std::string> towns{"t1", "t2", "t3", "t4"};
  const std::vector<std::string> regions{"r1", "r2", "r3"};
  const std::vector<std::string> countries{"c1", "c2", "c3"};
  const std::vector<std::string> periods{"Prehistoric", "Antiquity", "Medieval", "Modern"};
  const std::vector<std::string> subs{"early", "middle", "late"};
  const std::vector<std::string> typologies{"Zeuxippus Ware", "Zeuxippus imitation", "Glazed White Ware",
                                            "Aegean Ware", "Sgraffito"};
  const std::vector<std::string> categories{"COMM.", "GLAZED", "SGRAFF.", "AMPH."};
  const std::vector<std::string> texts{"red fabric", "like Zeuxippus", "white slip", ""};

  const std::size_t nloc = 1 + r.below(8);
  for (std::size_t i = 0; i < nloc; ++i) {
    LocationRef l;
    l.location_id = "L" + std::to_string(i);
    l.site = maybe(r, 0.7, sites);
    l.town = maybe(r, 0.7, towns);
    l.region = maybe(r, 0.7, regions);
    l.country = maybe(r, 0.8, countries);
    if (!l.site && !l.town && !l.region && !l.country) l.country = r.pick(countries);
    ds.locations.push_back(std::move(l));
  }
  const std::size_t ndat = r.below(5);
  for (std::size_t i = 0; i < ndat; ++i)
    ds.datings.push_back(Dating{"DT" + std::to_string(i), r.pick(periods), maybe(r, 0.6, subs), {}, {}});
  const std::size_t ndesc = r.below(6);
  for (std::size_t i = 0; i < ndesc; ++i) {
    Description d;
    d.description_id = "D" + std::to_string(i);
    d.typology = r.pick(typologies);
    d.category = r.pick(categories);
    d.free_text = r.pick(texts);
    ds.descriptions.push_back(std::move(d));
  }
  const std::size_t ngrp = r.below(4);
  for (std::size_t i = 0; i < ngrp; ++i)
    ds.groups.push_back(ChemicalGroup{"G" + std::to_string(i), "g" + std::to_string(i), GroupBasis::chemical});

  const std::size_t nsamples = 1 + r.below(40);
  for (std::size_t i = 0; i < nsamples; ++i) {
    Sample s;
    s.sample_id = "S" + std::to_string(i);
    s.provenance_ref = ds.locations[r.below(nloc)].location_id;
    if (ndat && r.chance(0.8)) s.dating_ref = ds.datings[r.below(ndat)].dating_id;
    if (ndesc && r.chance(0.8)) s.description_ref = ds.descriptions[r.below(ndesc)].description_id;
    if (ngrp && r.chance(0.7)) s.group_ref = ds.groups[r.below(ngrp)].group_id;
    ds.samples.push_back(std::move(s));
  }

  struct Menu {
    Technique t;
    const char* component;
    Unit unit;
    std::int64_t max;
  };
  std::vector<Menu> menu{{Technique::chemistry, "Al", Unit::wt_percent, 20},
                         {Technique::chemistry, "Fe", Unit::wt_percent, 10},
                         {Technique::chemistry, "Sr", Unit::ppm, 900},
                         {Technique::petro, "fabric", Unit::dimensionless, 6}};
  const bool mixed_al = r.chance(0.25);

  const std::size_t target = 1 + r.below(max_facts);
  std::set<std::tuple<std::string, std::size_t, std::string>> used;
  std::size_t seq = 0;
  for (std::size_t attempts = 0; ds.analyses.size() < target && attempts < target * 4; ++attempts) {
    const auto& s = ds.samples[r.below(nsamples)];
    const std::size_t m = r.below(menu.size());
    const std::string run = r.chance(0.8) ? "r1" : "r2";
    if (!used.insert({s.sample_id, m, run}).second) continue;
    Unit unit = menu[m].unit;
    std::int64_t max = menu[m].max;
    if (mixed_al && m == 0 && r.chance(0.5)) {
      unit = Unit::ppm;
      max = 200000;
    }
    char id[16];
    std::snprintf(id, sizeof id, "A%05zu", seq++);
    ds.analyses.push_back(
        AnalysisResult{id, s.sample_id, menu[m].t, menu[m].component, random_value(r, max), unit, run});
  }
  return ds;
}

/// One to four standard dimensions, each with a non-empty ordered subset of at
/// most four levels.
inline std::vector<DimensionSpec> random_dims(Rng& r) {
  auto all = DimensionSpec::all_standard();
  std::vector<DimensionSpec> out;
  while (out.empty()) {
    for (auto& d : all) {
      if (out.size() < 4 && r.chance(0.6)) {
        DimensionSpec spec{d.name, {}};
        for (const auto& l : d.levels) {
          if (r.chance(0.7)) spec.levels.push_back(l);
        }
        if (spec.levels.empty()) spec.levels.push_back(d.levels[r.below(d.levels.size())]);
        out.push_back(std::move(spec));
      }
    }
  }
  return out;
}

}  // namespace gen
