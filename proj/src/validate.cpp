#include "ceramdw/validate.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <tuple>
#include <unordered_set>

namespace ceramdw {

Member Member::unknown_at(std::string_view level) {
  return Member{"⟨unknown " + std::string(level) + "⟩", true};
}

Member Member::ungrouped() { return Member{"⟨ungrouped⟩", true}; }

std::strong_ordering compare_members(const Member& a, const Member& b) {
  if (a.unknown != b.unknown) return a.unknown ? std::strong_ordering::greater : std::strong_ordering::less;
  return a.label <=> b.label;
}

Member resolve_location_level(const LocationRef& loc, LocationLevel level) {
  const auto& value = loc.level(level);
  if (value && !value->empty()) return Member::known(*value);
  return Member::unknown_at(to_string(level));
}

ValidationFailed::ValidationFailed(ValidationReport report)
    : Error("dataset failed validation with " + std::to_string(report.size()) + " violation(s)"),
      report_(std::move(report)) {}

namespace {

class Checker {
 public:
  explicit Checker(ValidationReport& out) : out_(out) {}

  void add(std::string_view type, const std::string& id, std::string_view rule,
           std::string detail = {}) {
    out_.push_back(Violation{std::string(type), id, std::string(rule), std::move(detail)});
  }

  template <typename Record, typename IdOf>
  std::unordered_set<std::string> collect_ids(std::string_view type,
                                              const std::vector<Record>& records, IdOf id_of) {
    std::map<std::string, int> seen;
    for (const auto& r : records) {
      const std::string& id = id_of(r);
      if (id.empty()) add(type, id, rule::id_nonempty);
      ++seen[id];
    }
    std::unordered_set<std::string> ids;
    for (const auto& [id, n] : seen) {
      if (n > 1) add(type, id, rule::duplicate_id, std::to_string(n) + " records");
      ids.insert(id);
    }
    return ids;
  }

 private:
  ValidationReport& out_;
};

bool present(const std::optional<std::string>& s) { return s && !s->empty(); }

bool valid_firing_mode(const std::string& s) {
  return s.size() == 6 && s.compare(0, 5, "mode ") == 0 &&
         std::isalpha(static_cast<unsigned char>(s[5]));
}

bool contains(const std::vector<std::string>& list, const std::string& s) {
  return std::find(list.begin(), list.end(), s) != list.end();
}

}  // namespace

ValidationReport validate_dataset(const Dataset& ds, const Vocabulary& vocabulary) {
  ValidationReport report;
  Checker c(report);

  const auto sample_ids = c.collect_ids("sample", ds.samples, [](const Sample& s) -> const std::string& { return s.sample_id; });
  const auto location_ids = c.collect_ids("location", ds.locations, [](const LocationRef& l) -> const std::string& { return l.location_id; });
  const auto description_ids = c.collect_ids("description", ds.descriptions, [](const Description& d) -> const std::string& { return d.description_id; });
  const auto dating_ids = c.collect_ids("dating", ds.datings, [](const Dating& d) -> const std::string& { return d.dating_id; });
  const auto group_ids = c.collect_ids("group", ds.groups, [](const ChemicalGroup& g) -> const std::string& { return g.group_id; });
  c.collect_ids("analysis", ds.analyses, [](const AnalysisResult& a) -> const std::string& { return a.analysis_id; });
  const auto media_ids = c.collect_ids("media", ds.media, [](const MediaRef& m) -> const std::string& { return m.media_id; });

  auto check_ref = [&](std::string_view type, const std::string& id, std::string_view field,
                       const std::string& target, const std::unordered_set<std::string>& pool) {
    if (!pool.contains(target))
      c.add(type, id, rule::ref_integrity, std::string(field) + " -> " + target);
  };
  auto check_opt_ref = [&](std::string_view type, const std::string& id, std::string_view field,
                           const std::optional<std::string>& target,
                           const std::unordered_set<std::string>& pool) {
    if (target) check_ref(type, id, field, *target, pool);
  };

  for (const auto& s : ds.samples) {
    check_opt_ref("sample", s.sample_id, "description_ref", s.description_ref, description_ids);
    check_ref("sample", s.sample_id, "provenance_ref", s.provenance_ref, location_ids);
    check_opt_ref("sample", s.sample_id, "supposed_origin_ref", s.supposed_origin_ref, location_ids);
    check_opt_ref("sample", s.sample_id, "attribution_ref", s.attribution_ref, location_ids);
    check_opt_ref("sample", s.sample_id, "storage_outside_ref", s.storage_outside_ref, location_ids);
    check_opt_ref("sample", s.sample_id, "dating_ref", s.dating_ref, dating_ids);
    check_opt_ref("sample", s.sample_id, "group_ref", s.group_ref, group_ids);
    for (const auto& m : s.media) check_ref("sample", s.sample_id, "media", m, media_ids);
  }

  for (const auto& l : ds.locations) {
    if (!present(l.site) && !present(l.town) && !present(l.region) && !present(l.country))
      c.add("location", l.location_id, rule::location_nonempty);
    if (l.latitude.has_value() != l.longitude.has_value()) {
      c.add("location", l.location_id, rule::coord_pair);
    } else if (l.latitude) {
      if (!(*l.latitude >= -90.0 && *l.latitude <= 90.0))
        c.add("location", l.location_id, rule::latitude_range);
      if (!(*l.longitude >= -180.0 && *l.longitude <= 180.0))
        c.add("location", l.location_id, rule::longitude_range);
    }
  }

  for (const auto& d : ds.descriptions) {
    if (!contains(vocabulary.categories, d.category))
      c.add("description", d.description_id, rule::category_vocab, d.category);
    if (d.firing_mode && !valid_firing_mode(*d.firing_mode))
      c.add("description", d.description_id, rule::firing_mode_format, *d.firing_mode);
  }

  for (const auto& d : ds.datings) {
    if (d.start_year && d.end_year && *d.start_year > *d.end_year)
      c.add("dating", d.dating_id, rule::dating_order);
    if (!vocabulary.periods.empty() && !contains(vocabulary.periods, d.period))
      c.add("dating", d.dating_id, rule::period_vocab, d.period);
  }

  for (const auto& g : ds.groups) {
    if (g.name.empty()) c.add("group", g.group_id, rule::group_name_nonempty);
  }

  std::map<std::tuple<std::string, Technique, std::string, std::string>, std::vector<std::string>>
      runs;
  for (const auto& a : ds.analyses) {
    check_ref("analysis", a.analysis_id, "sample_ref", a.sample_ref, sample_ids);
    if (a.value.is_negative()) c.add("analysis", a.analysis_id, rule::value_nonneg, a.value.to_string());
    if (a.unit == Unit::wt_percent && a.value > Decimal::from_int(100))
      c.add("analysis", a.analysis_id, rule::wt_percent_max, a.value.to_string());
    runs[{a.sample_ref, a.technique, a.component, a.run_tag}].push_back(a.analysis_id);
  }
  for (const auto& [key, ids] : runs) {
    if (ids.size() < 2) continue;
    for (const auto& id : ids)
      c.add("analysis", id, rule::analysis_unique_run,
            std::get<0>(key) + "/" + std::string(to_string(std::get<1>(key))) + "/" +
                std::get<2>(key) + "/" + std::get<3>(key));
  }

  for (const auto& m : ds.media) {
    if (m.uri.empty()) c.add("media", m.media_id, rule::media_uri_nonempty);
  }

  std::sort(report.begin(), report.end());
  report.erase(std::unique(report.begin(), report.end()), report.end());
  return report;
}

}  // namespace ceramdw
