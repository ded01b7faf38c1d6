#include "ceramdw/etl.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "bundle_io.hpp"
#include "ceramdw/errors.hpp"

namespace ceramdw {

using detail::RecordTable;
using detail::TableSchema;

std::optional<BundleFormat> parse_bundle_format(std::string_view s) {
  if (s == "csv_bundle" || s == "csv") return BundleFormat::csv_bundle;
  if (s == "json_bundle" || s == "json") return BundleFormat::json_bundle;
  return std::nullopt;
}

const Member& ProvenanceRow::level(LocationLevel l) const {
  switch (l) {
    case LocationLevel::site: return site;
    case LocationLevel::town: return town;
    case LocationLevel::region: return region;
    case LocationLevel::country: return country;
  }
  return site;
}

// ---------------------------------------------------------------------------
// Source bundle
// ---------------------------------------------------------------------------

namespace {

const TableSchema kSamples{"samples",
                           {"sample_id", "description_id", "provenance_id", "dating_id",
                            "group_id", "media_ids"},
                           {"supposed_origin_id", "attribution_id", "storage_outside_id"}};
const TableSchema kLocations{
    "locations", {"location_id", "site", "town", "region", "country", "lat", "lon"}, {}};
const TableSchema kAnalyses{
    "analyses", {"analysis_id", "sample_id", "technique", "component", "value", "unit", "run_tag"},
    {}};
const TableSchema kDescriptions{
    "descriptions",
    {"description_id", "free_text", "typology", "category", "part_object", "waster",
     "firing_mode"},
    {"legal_status"}};
const TableSchema kDatings{
    "datings", {"dating_id", "period", "sub_period", "start_year", "end_year"}, {}};
const TableSchema kGroups{"groups", {"group_id", "name", "basis"}, {}};
const TableSchema kMedia{"media", {"media_id", "kind", "uri", "caption"}, {}};

RecordTable require_table(const FileSet& files, const TableSchema& schema, BundleFormat format) {
  auto t = detail::read_table(files, schema, format);
  if (!t) throw MissingFile(detail::file_name(schema, format));
  return std::move(*t);
}

template <typename Fn>
void for_each_optional(const FileSet& files, const TableSchema& schema, BundleFormat format,
                       Fn&& fn) {
  auto t = detail::read_table(files, schema, format);
  if (!t) return;
  for (const auto& rec : t->records()) fn(*t, rec);
}

class IdRegistry {
 public:
  explicit IdRegistry(std::string type) : type_(std::move(type)) {}
  void add(const std::string& id) {
    if (!ids_.insert(id).second) throw DuplicateId(type_, id);
  }

 private:
  std::string type_;
  std::unordered_set<std::string> ids_;
};

std::optional<double> opt_double(const RecordTable& t, const RecordTable::Record& r,
                                 std::string_view col) {
  const auto& v = t.get(r, col);
  if (!v) return std::nullopt;
  auto d = detail::parse_double(*v);
  if (!d) t.fail(r, "column '" + std::string(col) + "': not a number: " + *v);
  return d;
}

std::optional<int> opt_int(const RecordTable& t, const RecordTable::Record& r,
                           std::string_view col) {
  const auto& v = t.get(r, col);
  if (!v) return std::nullopt;
  auto d = detail::parse_int(*v);
  if (!d) t.fail(r, "column '" + std::string(col) + "': not an integer: " + *v);
  return d;
}

bool parse_bool(const RecordTable& t, const RecordTable::Record& r, std::string_view col) {
  const auto& v = t.get(r, col);
  if (!v) return false;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  t.fail(r, "column '" + std::string(col) + "': not a boolean: " + *v);
}

std::vector<std::string> split_ids(const std::optional<std::string>& v) {
  std::vector<std::string> out;
  if (!v) return out;
  std::stringstream ss(*v);
  std::string part;
  while (std::getline(ss, part, ';')) {
    auto b = part.find_first_not_of(' ');
    auto e = part.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(part.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

Dataset parse_source(const FileSet& files, BundleFormat format) {
  Dataset ds;
  // Required files first so MissingFile wins over row errors elsewhere.
  RecordTable samples = require_table(files, kSamples, format);
  RecordTable locations = require_table(files, kLocations, format);
  RecordTable analyses = require_table(files, kAnalyses, format);

  IdRegistry sample_ids("sample");
  for (const auto& r : samples.records()) {
    Sample s;
    s.sample_id = samples.require(r, "sample_id");
    s.description_ref = samples.get(r, "description_id");
    s.provenance_ref = samples.require(r, "provenance_id");
    s.supposed_origin_ref = samples.get(r, "supposed_origin_id");
    s.attribution_ref = samples.get(r, "attribution_id");
    s.storage_outside_ref = samples.get(r, "storage_outside_id");
    s.dating_ref = samples.get(r, "dating_id");
    s.group_ref = samples.get(r, "group_id");
    s.media = split_ids(samples.get(r, "media_ids"));
    sample_ids.add(s.sample_id);
    ds.samples.push_back(std::move(s));
  }

  IdRegistry location_ids("location");
  for (const auto& r : locations.records()) {
    LocationRef l;
    l.location_id = locations.require(r, "location_id");
    l.site = locations.get(r, "site");
    l.town = locations.get(r, "town");
    l.region = locations.get(r, "region");
    l.country = locations.get(r, "country");
    l.latitude = opt_double(locations, r, "lat");
    l.longitude = opt_double(locations, r, "lon");
    location_ids.add(l.location_id);
    ds.locations.push_back(std::move(l));
  }

  IdRegistry analysis_ids("analysis");
  for (const auto& r : analyses.records()) {
    AnalysisResult a;
    a.analysis_id = analyses.require(r, "analysis_id");
    a.sample_ref = analyses.require(r, "sample_id");
    const auto& tech = analyses.require(r, "technique");
    auto t = parse_technique(tech);
    if (!t) analyses.fail(r, "unknown technique: " + tech);
    a.technique = *t;
    a.component = analyses.require(r, "component");
    const auto& value = analyses.require(r, "value");
    auto v = Decimal::parse(value);
    if (!v) analyses.fail(r, "column 'value': not a decimal: " + value);
    a.value = *v;
    const auto& unit = analyses.require(r, "unit");
    auto u = parse_unit(unit);
    if (!u) analyses.fail(r, "unknown unit: " + unit);
    a.unit = *u;
    a.run_tag = analyses.get(r, "run_tag").value_or("");
    analysis_ids.add(a.analysis_id);
    ds.analyses.push_back(std::move(a));
  }

  IdRegistry description_ids("description");
  for_each_optional(files, kDescriptions, format, [&](const RecordTable& t, const auto& r) {
    Description d;
    d.description_id = t.require(r, "description_id");
    d.free_text = t.get(r, "free_text").value_or("");
    d.typology = t.get(r, "typology").value_or("");
    d.category = t.get(r, "category").value_or("");
    d.part_object = t.get(r, "part_object");
    d.waster = parse_bool(t, r, "waster");
    d.firing_mode = t.get(r, "firing_mode");
    d.legal_status = t.get(r, "legal_status");
    description_ids.add(d.description_id);
    ds.descriptions.push_back(std::move(d));
  });

  IdRegistry dating_ids("dating");
  for_each_optional(files, kDatings, format, [&](const RecordTable& t, const auto& r) {
    Dating d;
    d.dating_id = t.require(r, "dating_id");
    d.period = t.get(r, "period").value_or("");
    d.sub_period = t.get(r, "sub_period");
    d.start_year = opt_int(t, r, "start_year");
    d.end_year = opt_int(t, r, "end_year");
    dating_ids.add(d.dating_id);
    ds.datings.push_back(std::move(d));
  });

  IdRegistry group_ids("group");
  for_each_optional(files, kGroups, format, [&](const RecordTable& t, const auto& r) {
    ChemicalGroup g;
    g.group_id = t.require(r, "group_id");
    g.name = t.get(r, "name").value_or("");
    if (const auto& b = t.get(r, "basis")) {
      auto basis = parse_group_basis(*b);
      if (!basis) t.fail(r, "unknown group basis: " + *b);
      g.basis = *basis;
    }
    group_ids.add(g.group_id);
    ds.groups.push_back(std::move(g));
  });

  IdRegistry media_ids("media");
  for_each_optional(files, kMedia, format, [&](const RecordTable& t, const auto& r) {
    MediaRef m;
    m.media_id = t.require(r, "media_id");
    const auto& kind = t.require(r, "kind");
    auto k = parse_media_kind(kind);
    if (!k) t.fail(r, "unknown media kind: " + kind);
    m.kind = *k;
    m.uri = t.get(r, "uri").value_or("");
    m.caption = t.get(r, "caption");
    media_ids.add(m.media_id);
    ds.media.push_back(std::move(m));
  });

  return ds;
}

// ---------------------------------------------------------------------------
// Star construction
// ---------------------------------------------------------------------------

namespace {

Member label_or_unknown(const std::string& s, std::string_view level) {
  return s.empty() ? Member::unknown_at(level) : Member::known(s);
}

Member label_or_unknown(const std::optional<std::string>& s, std::string_view level) {
  return s ? label_or_unknown(*s, level) : Member::unknown_at(level);
}

DatingRow sentinel_dating() {
  return DatingRow{kSentinelKey, "", Member::unknown_at("sub_period"), Member::unknown_at("period"),
                   std::nullopt, std::nullopt};
}

DescriptionRow sentinel_description() {
  DescriptionRow r;
  r.key = kSentinelKey;
  r.typology = Member::unknown_at("typology");
  r.category = Member::unknown_at("category");
  return r;
}

GroupRow sentinel_group() { return GroupRow{kSentinelKey, "", Member::ungrouped(), std::nullopt}; }

// Natural ids -> keys numbered from `first` in sorted order.
std::unordered_map<std::string, DimKey> number_ids(const std::set<std::string>& ids, DimKey first) {
  std::unordered_map<std::string, DimKey> out;
  DimKey k = first;
  for (const auto& id : ids) out.emplace(id, k++);
  return out;
}

template <typename Record, typename IdOf>
std::unordered_map<std::string, const Record*> index_by(const std::vector<Record>& records,
                                                        IdOf id_of) {
  std::unordered_map<std::string, const Record*> out;
  for (const auto& r : records) out.emplace(id_of(r), &r);
  return out;
}

}  // namespace

StarSchema build_star(const Dataset& ds, const BuildOptions& options) {
  if (auto report = validate_dataset(ds, options.vocabulary); !report.empty())
    throw ValidationFailed(std::move(report));

  const auto samples = index_by(ds.samples, [](const Sample& s) { return s.sample_id; });
  const auto locations = index_by(ds.locations, [](const LocationRef& l) { return l.location_id; });
  const auto descriptions =
      index_by(ds.descriptions, [](const Description& d) { return d.description_id; });
  const auto datings = index_by(ds.datings, [](const Dating& d) { return d.dating_id; });
  const auto groups = index_by(ds.groups, [](const ChemicalGroup& g) { return g.group_id; });

  std::set<std::string> used_locations, used_datings, used_descriptions, used_groups;
  for (const auto& a : ds.analyses) {
    const Sample& s = *samples.at(a.sample_ref);
    used_locations.insert(s.provenance_ref);
    if (s.dating_ref) used_datings.insert(*s.dating_ref);
    if (s.description_ref) used_descriptions.insert(*s.description_ref);
    if (s.group_ref) used_groups.insert(*s.group_ref);
  }
  const auto loc_keys = number_ids(used_locations, 1);
  const auto dating_keys = number_ids(used_datings, 1);
  const auto desc_keys = number_ids(used_descriptions, 1);
  const auto group_keys = number_ids(used_groups, 1);

  StarSchema star;
  for (const auto& id : used_locations) {
    LocationRef loc = *locations.at(id);
    if (options.enricher) loc = options.enricher(loc);
    ProvenanceRow row;
    row.key = loc_keys.at(id);
    row.location_id = id;
    row.site = resolve_location_level(loc, LocationLevel::site);
    row.town = resolve_location_level(loc, LocationLevel::town);
    row.region = resolve_location_level(loc, LocationLevel::region);
    row.country = resolve_location_level(loc, LocationLevel::country);
    row.latitude = loc.latitude;
    row.longitude = loc.longitude;
    star.dim_provenance.push_back(std::move(row));
  }

  star.dim_dating.push_back(sentinel_dating());
  for (const auto& id : used_datings) {
    const Dating& d = *datings.at(id);
    star.dim_dating.push_back(DatingRow{dating_keys.at(id), id,
                                        label_or_unknown(d.sub_period, "sub_period"),
                                        label_or_unknown(d.period, "period"), d.start_year,
                                        d.end_year});
  }

  star.dim_description.push_back(sentinel_description());
  for (const auto& id : used_descriptions) {
    const Description& d = *descriptions.at(id);
    DescriptionRow row;
    row.key = desc_keys.at(id);
    row.description_id = id;
    row.typology = label_or_unknown(d.typology, "typology");
    row.category = label_or_unknown(d.category, "category");
    row.free_text = d.free_text;
    row.part_object = d.part_object;
    row.waster = d.waster;
    row.firing_mode = d.firing_mode;
    star.dim_description.push_back(std::move(row));
  }

  star.dim_group.push_back(sentinel_group());
  for (const auto& id : used_groups) {
    const ChemicalGroup& g = *groups.at(id);
    star.dim_group.push_back(GroupRow{group_keys.at(id), id, Member::known(g.name), g.basis});
  }

  star.facts.reserve(ds.analyses.size());
  for (const auto& a : ds.analyses) {
    const Sample& s = *samples.at(a.sample_ref);
    FactRecord f;
    f.sample_id = a.sample_ref;
    f.analysis_id = a.analysis_id;
    f.run_tag = a.run_tag;
    f.technique = a.technique;
    f.component = a.component;
    f.value = a.value;
    f.unit = a.unit;
    f.provenance_key = loc_keys.at(s.provenance_ref);
    f.dating_key = s.dating_ref ? dating_keys.at(*s.dating_ref) : kSentinelKey;
    f.description_key = s.description_ref ? desc_keys.at(*s.description_ref) : kSentinelKey;
    f.group_key = s.group_ref ? group_keys.at(*s.group_ref) : kSentinelKey;
    star.facts.push_back(std::move(f));
  }
  std::sort(star.facts.begin(), star.facts.end(),
            [](const FactRecord& a, const FactRecord& b) { return a.analysis_id < b.analysis_id; });
  return star;
}

// ---------------------------------------------------------------------------
// Star bundle
// ---------------------------------------------------------------------------

namespace {

using Cells = std::vector<std::optional<std::string>>;

const TableSchema kFacts{"facts",
                         {"sample_id", "analysis_id", "run_tag", "technique", "component", "value",
                          "unit", "provenance_key", "dating_key", "description_key", "group_key"},
                         {}};
const TableSchema kDimProvenance{
    "dim_provenance",
    {"provenance_key", "location_id", "site", "town", "region", "country", "lat", "lon"},
    {}};
const TableSchema kDimDating{
    "dim_dating", {"dating_key", "dating_id", "sub_period", "period", "start_year", "end_year"}, {}};
const TableSchema kDimDescription{"dim_description",
                                  {"description_key", "description_id", "typology", "category",
                                   "free_text", "part_object", "waster", "firing_mode"},
                                  {}};
const TableSchema kDimGroup{"dim_group", {"group_key", "group_id", "name", "basis"}, {}};

std::optional<std::string> text(const std::string& s) {
  return s.empty() ? std::nullopt : std::optional<std::string>(s);
}
std::optional<std::string> member_text(const Member& m) {
  return m.unknown ? std::nullopt : std::optional<std::string>(m.label);
}
std::optional<std::string> num(std::optional<double> v) {
  return v ? std::optional<std::string>(detail::format_double(*v)) : std::nullopt;
}
std::optional<std::string> num(std::optional<int> v) {
  return v ? std::optional<std::string>(std::to_string(*v)) : std::nullopt;
}
std::string key_text(DimKey k) { return std::to_string(k); }

void put(FileSet& out, const TableSchema& schema, BundleFormat format,
         const std::vector<Cells>& rows) {
  out[detail::file_name(schema, format)] = detail::write_table(format, schema.required, rows);
}

DimKey parse_key(const RecordTable& t, const RecordTable::Record& r, std::string_view col) {
  const auto& v = t.require(r, col);
  auto k = detail::parse_int(v);
  if (!k || *k < 0) t.fail(r, "column '" + std::string(col) + "': invalid key: " + v);
  return static_cast<DimKey>(*k);
}

template <typename Row>
void expect_dense_keys(const RecordTable& t, const std::vector<Row>& rows, DimKey first) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].key != first + i)
      t.fail(t.records()[i], "dimension keys must be dense and sorted starting at " +
                                 std::to_string(first));
  }
}

}  // namespace

FileSet export_star(const StarSchema& star, BundleFormat format) {
  FileSet out;

  std::vector<Cells> rows;
  for (const auto& f : star.facts) {
    rows.push_back({f.sample_id, f.analysis_id, text(f.run_tag), std::string(to_string(f.technique)),
                    f.component, f.value.to_string(), std::string(to_string(f.unit)),
                    key_text(f.provenance_key), key_text(f.dating_key),
                    key_text(f.description_key), key_text(f.group_key)});
  }
  put(out, kFacts, format, rows);

  rows.clear();
  for (const auto& p : star.dim_provenance) {
    rows.push_back({key_text(p.key), p.location_id, member_text(p.site), member_text(p.town),
                    member_text(p.region), member_text(p.country), num(p.latitude),
                    num(p.longitude)});
  }
  put(out, kDimProvenance, format, rows);

  rows.clear();
  for (const auto& d : star.dim_dating) {
    rows.push_back({key_text(d.key), text(d.dating_id), member_text(d.sub_period),
                    member_text(d.period), num(d.start_year), num(d.end_year)});
  }
  put(out, kDimDating, format, rows);

  rows.clear();
  for (const auto& d : star.dim_description) {
    rows.push_back({key_text(d.key), text(d.description_id), member_text(d.typology),
                    member_text(d.category), text(d.free_text), d.part_object,
                    std::string(d.waster ? "true" : "false"), d.firing_mode});
  }
  put(out, kDimDescription, format, rows);

  rows.clear();
  for (const auto& g : star.dim_group) {
    rows.push_back({key_text(g.key), text(g.group_id), member_text(g.name),
                    g.basis ? std::optional<std::string>(std::string(to_string(*g.basis)))
                            : std::nullopt});
  }
  put(out, kDimGroup, format, rows);
  return out;
}

StarSchema import_star(const FileSet& files, BundleFormat format) {
  StarSchema star;
  RecordTable facts = require_table(files, kFacts, format);
  RecordTable prov = require_table(files, kDimProvenance, format);
  RecordTable dating = require_table(files, kDimDating, format);
  RecordTable desc = require_table(files, kDimDescription, format);
  RecordTable group = require_table(files, kDimGroup, format);

  for (const auto& r : prov.records()) {
    ProvenanceRow p;
    p.key = parse_key(prov, r, "provenance_key");
    p.location_id = prov.require(r, "location_id");
    p.site = label_or_unknown(prov.get(r, "site"), "site");
    p.town = label_or_unknown(prov.get(r, "town"), "town");
    p.region = label_or_unknown(prov.get(r, "region"), "region");
    p.country = label_or_unknown(prov.get(r, "country"), "country");
    p.latitude = opt_double(prov, r, "lat");
    p.longitude = opt_double(prov, r, "lon");
    star.dim_provenance.push_back(std::move(p));
  }
  expect_dense_keys(prov, star.dim_provenance, 1);

  for (const auto& r : dating.records()) {
    DatingRow d;
    d.key = parse_key(dating, r, "dating_key");
    d.dating_id = dating.get(r, "dating_id").value_or("");
    d.sub_period = label_or_unknown(dating.get(r, "sub_period"), "sub_period");
    d.period = label_or_unknown(dating.get(r, "period"), "period");
    d.start_year = opt_int(dating, r, "start_year");
    d.end_year = opt_int(dating, r, "end_year");
    star.dim_dating.push_back(std::move(d));
  }
  expect_dense_keys(dating, star.dim_dating, 0);

  for (const auto& r : desc.records()) {
    DescriptionRow d;
    d.key = parse_key(desc, r, "description_key");
    d.description_id = desc.get(r, "description_id").value_or("");
    d.typology = label_or_unknown(desc.get(r, "typology"), "typology");
    d.category = label_or_unknown(desc.get(r, "category"), "category");
    d.free_text = desc.get(r, "free_text").value_or("");
    d.part_object = desc.get(r, "part_object");
    d.waster = parse_bool(desc, r, "waster");
    d.firing_mode = desc.get(r, "firing_mode");
    star.dim_description.push_back(std::move(d));
  }
  expect_dense_keys(desc, star.dim_description, 0);

  for (const auto& r : group.records()) {
    GroupRow g;
    g.key = parse_key(group, r, "group_key");
    g.group_id = group.get(r, "group_id").value_or("");
    const auto& name = group.get(r, "name");
    g.name = name ? Member::known(*name) : Member::ungrouped();
    if (const auto& b = group.get(r, "basis")) {
      auto basis = parse_group_basis(*b);
      if (!basis) group.fail(r, "unknown group basis: " + *b);
      g.basis = basis;
    }
    star.dim_group.push_back(std::move(g));
  }
  expect_dense_keys(group, star.dim_group, 0);
  if (star.dim_dating.empty() || star.dim_description.empty() || star.dim_group.empty())
    throw MalformedRow(detail::file_name(kDimGroup, format), 1, "sentinel rows missing");

  for (const auto& r : facts.records()) {
    FactRecord f;
    f.sample_id = facts.require(r, "sample_id");
    f.analysis_id = facts.require(r, "analysis_id");
    f.run_tag = facts.get(r, "run_tag").value_or("");
    const auto& tech = facts.require(r, "technique");
    auto t = parse_technique(tech);
    if (!t) facts.fail(r, "unknown technique: " + tech);
    f.technique = *t;
    f.component = facts.require(r, "component");
    const auto& value = facts.require(r, "value");
    auto v = Decimal::parse(value);
    if (!v) facts.fail(r, "column 'value': not a decimal: " + value);
    f.value = *v;
    const auto& unit = facts.require(r, "unit");
    auto u = parse_unit(unit);
    if (!u) facts.fail(r, "unknown unit: " + unit);
    f.unit = *u;
    f.provenance_key = parse_key(facts, r, "provenance_key");
    f.dating_key = parse_key(facts, r, "dating_key");
    f.description_key = parse_key(facts, r, "description_key");
    f.group_key = parse_key(facts, r, "group_key");
    if (f.provenance_key == 0 || f.provenance_key > star.dim_provenance.size() ||
        f.dating_key >= star.dim_dating.size() ||
        f.description_key >= star.dim_description.size() || f.group_key >= star.dim_group.size())
      facts.fail(r, "dimension key does not resolve");
    star.facts.push_back(std::move(f));
  }
  return star;
}

FileSet read_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw MissingFile(dir);
  FileSet files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[entry.path().filename().string()] = ss.str();
  }
  return files;
}

void write_directory(const std::string& dir, const FileSet& files) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const auto& [name, content] : files) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + (fs::path(dir) / name).string());
    out << content;
  }
}

}  // namespace ceramdw
