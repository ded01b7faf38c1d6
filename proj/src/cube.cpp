#include <algorithm>
#include <cstring>
#include <map>
#include <numeric>
#include <unordered_map>

#include "ceramdw/cube.hpp"
#include "cube_internal.hpp"

namespace ceramdw {

// ---------------------------------------------------------------------------
// Dimension definitions
// ---------------------------------------------------------------------------

DimensionSpec DimensionSpec::standard(std::string_view name) {
  if (name == "provenance") return {"provenance", {"site", "town", "region", "country"}};
  if (name == "dating") return {"dating", {"sub_period", "period"}};
  if (name == "description") return {"description", {"typology", "category"}};
  if (name == "groups") return {"groups", {"group"}};
  if (name == "technique") return {"technique", {"technique"}};
  throw UnknownDimension(std::string(name));
}

std::vector<DimensionSpec> DimensionSpec::all_standard() {
  return {standard("provenance"), standard("dating"), standard("description"), standard("groups"),
          standard("technique")};
}

namespace {

std::size_t leaf_count(const StarSchema& star, std::string_view dim) {
  if (dim == "provenance") return star.dim_provenance.size();
  if (dim == "dating") return star.dim_dating.size();
  if (dim == "description") return star.dim_description.size();
  if (dim == "groups") return star.dim_group.size();
  return std::size(kAllTechniques);
}

std::uint32_t fact_leaf(const FactRecord& f, std::string_view dim) {
  if (dim == "provenance") return f.provenance_key - 1;
  if (dim == "dating") return f.dating_key;
  if (dim == "description") return f.description_key;
  if (dim == "groups") return f.group_key;
  return static_cast<std::uint32_t>(f.technique);
}

Member leaf_member(const StarSchema& star, std::string_view dim, std::string_view level,
                   std::size_t leaf) {
  if (dim == "provenance") {
    const auto& row = star.dim_provenance[leaf];
    return row.level(*parse_location_level(level));
  }
  if (dim == "dating") {
    const auto& row = star.dim_dating[leaf];
    return level == "period" ? row.period : row.sub_period;
  }
  if (dim == "description") {
    const auto& row = star.dim_description[leaf];
    return level == "category" ? row.category : row.typology;
  }
  if (dim == "groups") return star.dim_group[leaf].name;
  return Member::known(std::string(to_string(kAllTechniques[leaf])));
}

void check_specs(const std::vector<DimensionSpec>& specs) {
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto standard = DimensionSpec::standard(specs[i].name);
    for (std::size_t j = 0; j < i; ++j) {
      if (specs[j].name == specs[i].name)
        throw InvalidPredicate("dimension listed twice: " + specs[i].name);
    }
    if (specs[i].levels.empty()) throw UnknownLevel(specs[i].name, "");
    std::ptrdiff_t last = -1;
    for (const auto& level : specs[i].levels) {
      auto it = std::find(standard.levels.begin(), standard.levels.end(), level);
      if (it == standard.levels.end()) throw UnknownLevel(specs[i].name, level);
      const auto pos = it - standard.levels.begin();
      if (pos <= last)
        throw InvalidPredicate("levels of " + specs[i].name +
                               " must be distinct and ordered finest to coarsest");
      last = pos;
    }
  }
}

bool member_less(const Member& a, const Member& b) { return compare_members(a, b) < 0; }

}  // namespace

// ---------------------------------------------------------------------------
// TupleIndexer
// ---------------------------------------------------------------------------

namespace detail {

TupleIndexer::TupleIndexer(std::vector<std::uint64_t> radices)
    : width_(radices.size()), radices_(std::move(radices)) {
  unsigned __int128 product = 1;
  for (auto r : radices_) {
    product *= std::max<std::uint64_t>(r, 1);
    if (product > std::numeric_limits<std::uint64_t>::max()) {
      packed_ = false;
      break;
    }
  }
}

std::uint32_t TupleIndexer::index_of(std::span<const std::uint32_t> tuple) {
  std::pair<std::uint32_t, bool> res;
  if (packed_) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < width_; ++i) key = key * radices_[i] + tuple[i];
    auto [it, inserted] = packed_map_.try_emplace(key, count_);
    res = {it->second, inserted};
  } else {
    std::string key(width_ * sizeof(std::uint32_t), '\0');
    std::memcpy(key.data(), tuple.data(), key.size());
    auto [it, inserted] = wide_map_.try_emplace(std::move(key), count_);
    res = {it->second, inserted};
  }
  if (res.second) {
    tuples_.insert(tuples_.end(), tuple.begin(), tuple.end());
    ++count_;
  }
  return res.first;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Cube construction
// ---------------------------------------------------------------------------

Cube::~Cube() = default;

CubePtr build_cube(const StarSchema& star, std::vector<DimensionSpec> dims) {
  check_specs(dims);
  std::shared_ptr<Cube> cube(new Cube());
  cube->specs_ = std::move(dims);
  cube->fact_count_ = star.facts.size();
  const std::size_t ndims = cube->specs_.size();
  const std::size_t nfacts = star.facts.size();

  // Leaves per fact, and which leaves are populated.
  std::vector<std::uint32_t> fact_leaves(nfacts * ndims);
  cube->dim_data_.resize(ndims);
  for (std::size_t d = 0; d < ndims; ++d) {
    const auto& spec = cube->specs_[d];
    auto& dim = cube->dim_data_[d];
    dim.leaf_count = leaf_count(star, spec.name);
    std::vector<char> used(dim.leaf_count, 0);
    for (std::size_t f = 0; f < nfacts; ++f) {
      const auto leaf = fact_leaf(star.facts[f], spec.name);
      fact_leaves[f * ndims + d] = leaf;
      used[leaf] = 1;
    }
    for (const auto& level : spec.levels) {
      std::vector<Member> labels(dim.leaf_count);
      std::vector<Member> members;
      for (std::size_t leaf = 0; leaf < dim.leaf_count; ++leaf) {
        if (!used[leaf]) continue;
        labels[leaf] = leaf_member(star, spec.name, level, leaf);
        members.push_back(labels[leaf]);
      }
      std::sort(members.begin(), members.end(), member_less);
      members.erase(std::unique(members.begin(), members.end()), members.end());
      std::vector<std::uint32_t> ids(dim.leaf_count, kNoMember);
      for (std::size_t leaf = 0; leaf < dim.leaf_count; ++leaf) {
        if (!used[leaf]) continue;
        auto it = std::lower_bound(members.begin(), members.end(), labels[leaf], member_less);
        ids[leaf] = static_cast<std::uint32_t>(it - members.begin());
      }
      dim.member_of.push_back(std::move(ids));
      dim.members.push_back(std::move(members));
    }
    if (spec.name == "description") {
      dim.has_text = true;
      for (const auto& row : star.dim_description) {
        dim.typology_text.push_back(row.typology.unknown ? "" : row.typology.label);
        dim.free_text.push_back(row.free_text);
      }
    }
  }

  // Measure keys.
  std::map<MeasureKey, std::uint32_t> key_index;
  for (const auto& f : star.facts) key_index.emplace(MeasureKey{f.technique, f.component, f.unit}, 0);
  for (auto& [key, idx] : key_index) {
    idx = static_cast<std::uint32_t>(cube->measure_keys_.size());
    cube->measure_keys_.push_back(key);
  }

  // Sample and analysis-run dictionaries.
  std::unordered_map<std::string, std::uint32_t> sample_index;
  std::unordered_map<std::string, std::uint32_t> run_index;
  std::vector<std::uint32_t> fact_sample(nfacts), fact_run(nfacts), fact_measure(nfacts);
  std::string run_key;
  for (std::size_t f = 0; f < nfacts; ++f) {
    const auto& fact = star.facts[f];
    auto [sit, _] = sample_index.try_emplace(fact.sample_id,
                                             static_cast<std::uint32_t>(sample_index.size()));
    fact_sample[f] = sit->second;
    run_key = fact.sample_id;
    run_key += '\x1f';
    run_key += to_string(fact.technique);
    run_key += '\x1f';
    run_key += fact.run_tag;
    auto [rit, __] = run_index.try_emplace(run_key, static_cast<std::uint32_t>(run_index.size()));
    fact_run[f] = rit->second;
    fact_measure[f] = key_index.at(MeasureKey{fact.technique, fact.component, fact.unit});
  }

  // Partitions.
  auto parts = std::make_unique<Cube::Partitions>();
  parts->dims = ndims;
  parts->sample_universe = sample_index.size();
  parts->run_universe = run_index.size();
  std::vector<std::uint64_t> radices;
  for (const auto& dim : cube->dim_data_) radices.push_back(dim.leaf_count);
  radices.push_back(std::max<std::size_t>(cube->measure_keys_.size(), 1));
  detail::TupleIndexer indexer(radices);
  std::vector<std::uint32_t> fact_part(nfacts);
  std::vector<std::uint32_t> tuple(ndims + 1);
  for (std::size_t f = 0; f < nfacts; ++f) {
    std::copy_n(fact_leaves.begin() + static_cast<std::ptrdiff_t>(f * ndims), ndims, tuple.begin());
    tuple[ndims] = fact_measure[f];
    fact_part[f] = indexer.index_of(tuple);
  }
  const std::size_t nparts = indexer.size();
  parts->leaves.resize(nparts * ndims);
  parts->measure.resize(nparts);
  parts->stats.resize(nparts);
  for (std::uint32_t p = 0; p < nparts; ++p) {
    auto t = indexer.tuple(p);
    std::copy_n(t.begin(), ndims, parts->leaves.begin() + static_cast<std::ptrdiff_t>(p * ndims));
    parts->measure[p] = t[ndims];
  }
  for (std::size_t f = 0; f < nfacts; ++f) {
    auto& s = parts->stats[fact_part[f]];
    const Decimal v = star.facts[f].value;
    if (s.count == 0) {
      s.min = v;
      s.max = v;
    } else {
      s.min = std::min(s.min, v);
      s.max = std::max(s.max, v);
    }
    s.sum += v;
    ++s.count;
  }

  // CSR id sets: bucket facts by partition, then sort/unique within each bucket.
  auto build_sets = [&](const std::vector<std::uint32_t>& fact_id, std::vector<std::uint32_t>& offsets,
                        std::vector<std::uint32_t>& ids) {
    std::vector<std::uint32_t> start(nparts + 1, 0);
    for (std::size_t f = 0; f < nfacts; ++f) ++start[fact_part[f] + 1];
    std::partial_sum(start.begin(), start.end(), start.begin());
    std::vector<std::uint32_t> bucket(nfacts);
    std::vector<std::uint32_t> cursor(start.begin(), start.end() - 1);
    for (std::size_t f = 0; f < nfacts; ++f) bucket[cursor[fact_part[f]]++] = fact_id[f];
    offsets.assign(1, 0);
    ids.clear();
    ids.reserve(nfacts);
    for (std::size_t p = 0; p < nparts; ++p) {
      auto b = bucket.begin() + start[p];
      auto e = bucket.begin() + start[p + 1];
      std::sort(b, e);
      e = std::unique(b, e);
      ids.insert(ids.end(), b, e);
      offsets.push_back(static_cast<std::uint32_t>(ids.size()));
    }
  };
  build_sets(fact_sample, parts->sample_offsets, parts->samples);
  build_sets(fact_run, parts->run_offsets, parts->runs);

  cube->parts_ = std::move(parts);
  return cube;
}

std::size_t Cube::sample_count() const { return parts_->sample_universe; }

std::size_t Cube::dim_index(std::string_view name) const {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    if (specs_[i].name == name) return i;
  }
  throw UnknownDimension(std::string(name));
}

std::size_t Cube::level_index(std::size_t dim, std::string_view level) const {
  const auto& levels = specs_.at(dim).levels;
  if (level == kAllLevel) return levels.size();
  auto it = std::find(levels.begin(), levels.end(), level);
  if (it == levels.end()) throw UnknownLevel(specs_[dim].name, std::string(level));
  return static_cast<std::size_t>(it - levels.begin());
}

std::string_view Cube::level_name(std::size_t dim, std::size_t level) const {
  const auto& levels = specs_.at(dim).levels;
  return level >= levels.size() ? kAllLevel : std::string_view(levels[level]);
}

const std::vector<Member>& Cube::members(std::size_t dim, std::size_t level) const {
  return dim_data_.at(dim).members.at(level);
}

std::optional<std::uint32_t> Cube::find_member(std::size_t dim, std::size_t level,
                                               std::string_view label) const {
  const auto& list = members(dim, level);
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (list[i].label == label) return static_cast<std::uint32_t>(i);
  }
  return std::nullopt;
}

CubeView Cube::base_view() const {
  return CubeView(shared_from_this(), std::vector<std::size_t>(specs_.size(), 0), {});
}

const std::vector<Cell>& Cube::base_cells() const {
  std::call_once(base_once_, [this] {
    base_cells_ = std::make_shared<const std::vector<Cell>>(base_view().cells());
  });
  return *base_cells_;
}

void MeasureStats::add(const MeasureStats& o) {
  if (o.count == 0) return;
  if (count == 0) {
    min = o.min;
    max = o.max;
  } else {
    min = std::min(min, o.min);
    max = std::max(max, o.max);
  }
  sum += o.sum;
  count += o.count;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace detail {
namespace {

bool text_contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

// Per-dimension leaf masks; an empty mask means unfiltered.
std::vector<std::vector<char>> leaf_masks(const Cube& cube, std::span<const Predicate> filters) {
  const auto& data = cube.dimension_data();
  std::vector<std::vector<char>> masks(data.size());
  for (const auto& pred : filters) {
    const std::size_t d = cube.dim_index(pred.dim);
    const auto& dim = data[d];
    std::vector<char> allowed(dim.leaf_count, 0);
    if (pred.kind == Predicate::Kind::contains) {
      const std::string& needle = pred.values.at(0);
      const bool typology_only = pred.level.has_value();
      for (std::size_t leaf = 0; leaf < dim.leaf_count; ++leaf) {
        allowed[leaf] = text_contains(dim.typology_text[leaf], needle) ||
                        (!typology_only && text_contains(dim.free_text[leaf], needle));
      }
    } else {
      const std::size_t level = cube.level_index(d, *pred.level);
      std::vector<char> wanted(cube.members(d, level).size(), 0);
      for (const auto& v : pred.values) {
        if (auto id = cube.find_member(d, level, v)) wanted[*id] = 1;
      }
      const auto& ids = dim.member_of[level];
      for (std::size_t leaf = 0; leaf < dim.leaf_count; ++leaf) {
        allowed[leaf] = ids[leaf] != kNoMember && wanted[ids[leaf]];
      }
    }
    if (masks[d].empty()) {
      masks[d] = std::move(allowed);
    } else {
      for (std::size_t i = 0; i < allowed.size(); ++i) masks[d][i] &= allowed[i];
    }
  }
  return masks;
}

}  // namespace

std::vector<EvalCell> evaluate(const Cube& cube, std::span<const Grouping> grouping,
                               std::span<const Predicate> filters,
                               std::span<const char> measure_filter) {
  const auto& parts = cube.partitions();
  const auto& data = cube.dimension_data();
  const auto masks = leaf_masks(cube, filters);
  std::vector<std::size_t> masked_dims;
  for (std::size_t d = 0; d < masks.size(); ++d) {
    if (!masks[d].empty()) masked_dims.push_back(d);
  }

  std::vector<std::uint64_t> radices;
  std::vector<const std::vector<std::uint32_t>*> member_of;
  for (const auto& g : grouping) {
    radices.push_back(std::max<std::size_t>(cube.members(g.dim, g.level).size(), 1));
    member_of.push_back(&data[g.dim].member_of[g.level]);
  }
  TupleIndexer indexer(radices);

  const std::size_t nparts = parts.size();
  std::vector<std::uint32_t> part_cell(nparts, kNoMember);
  std::vector<std::uint32_t> key(grouping.size());
  for (std::size_t p = 0; p < nparts; ++p) {
    if (!measure_filter.empty() && !measure_filter[parts.measure[p]]) continue;
    bool keep = true;
    for (std::size_t d : masked_dims) {
      if (!masks[d][parts.leaf(p, d)]) {
        keep = false;
        break;
      }
    }
    if (!keep) continue;
    for (std::size_t i = 0; i < grouping.size(); ++i)
      key[i] = (*member_of[i])[parts.leaf(p, grouping[i].dim)];
    part_cell[p] = indexer.index_of(key);
  }

  const std::size_t ncells = indexer.size();
  // Partitions per cell, in partition order.
  std::vector<std::uint32_t> start(ncells + 1, 0);
  for (auto c : part_cell) {
    if (c != kNoMember) ++start[c + 1];
  }
  std::partial_sum(start.begin(), start.end(), start.begin());
  std::vector<std::uint32_t> members_of_cell(start.back());
  {
    std::vector<std::uint32_t> cursor(start.begin(), start.end() - 1);
    for (std::size_t p = 0; p < nparts; ++p) {
      if (part_cell[p] != kNoMember) members_of_cell[cursor[part_cell[p]]++] = static_cast<std::uint32_t>(p);
    }
  }

  const auto& keys = cube.measure_keys();
  std::vector<MeasureStats> scratch(keys.size());
  std::vector<char> touched(keys.size(), 0);
  std::vector<std::uint32_t> sample_stamp(parts.sample_universe, kNoMember);
  std::vector<std::uint32_t> run_stamp(parts.run_universe, kNoMember);

  std::vector<EvalCell> cells(ncells);
  for (std::uint32_t c = 0; c < ncells; ++c) {
    auto& cell = cells[c];
    auto t = indexer.tuple(c);
    cell.member_ids.assign(t.begin(), t.end());
    auto& st = cell.stats;
    for (auto i = start[c]; i < start[c + 1]; ++i) {
      const auto p = members_of_cell[i];
      const auto& ps = parts.stats[p];
      st.fact_count += ps.count;
      scratch[parts.measure[p]].add(ps);
      touched[parts.measure[p]] = 1;
      for (auto s = parts.sample_offsets[p]; s < parts.sample_offsets[p + 1]; ++s) {
        auto& stamp = sample_stamp[parts.samples[s]];
        if (stamp != c) {
          stamp = c;
          ++st.distinct_samples;
        }
      }
      for (auto r = parts.run_offsets[p]; r < parts.run_offsets[p + 1]; ++r) {
        auto& stamp = run_stamp[parts.runs[r]];
        if (stamp != c) {
          stamp = c;
          ++st.distinct_analyses;
        }
      }
    }
    for (std::size_t k = 0; k < keys.size(); ++k) {
      if (!touched[k]) continue;
      st.measures.emplace_back(keys[k], scratch[k]);
      scratch[k] = MeasureStats{};
      touched[k] = 0;
    }
  }

  std::sort(cells.begin(), cells.end(), [](const EvalCell& a, const EvalCell& b) {
    return a.member_ids < b.member_ids;
  });
  return cells;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CubeView
// ---------------------------------------------------------------------------

struct CubeView::Cache {
  std::once_flag once;
  std::vector<Cell> cells;
};

CubeView::CubeView(CubePtr cube, std::vector<std::size_t> levels, std::vector<Predicate> filters)
    : cube_(std::move(cube)),
      levels_(std::move(levels)),
      filters_(std::move(filters)),
      cache_(std::make_shared<Cache>()) {}

std::string_view CubeView::level_of(std::string_view dim) const {
  const auto d = cube_->dim_index(dim);
  return cube_->level_name(d, levels_[d]);
}

bool CubeView::is_fixed(std::string_view dim) const {
  return std::any_of(filters_.begin(), filters_.end(), [&](const Predicate& p) {
    return p.dim == dim && p.kind == Predicate::Kind::equals;
  });
}

std::vector<Axis> CubeView::axes() const {
  std::vector<Axis> out;
  for (std::size_t d = 0; d < levels_.size(); ++d) {
    if (levels_[d] < cube_->dims()[d].levels.size())
      out.push_back(Axis{cube_->dims()[d].name, std::string(cube_->level_name(d, levels_[d]))});
  }
  return out;
}

const std::vector<Cell>& CubeView::cells() const {
  std::call_once(cache_->once, [this] {
    std::vector<detail::Grouping> grouping;
    for (std::size_t d = 0; d < levels_.size(); ++d) {
      if (levels_[d] < cube_->dims()[d].levels.size()) grouping.push_back({d, levels_[d]});
    }
    auto evaluated = detail::evaluate(*cube_, grouping, filters_, {});
    cache_->cells.reserve(evaluated.size());
    for (auto& ec : evaluated) {
      Cell cell;
      for (std::size_t i = 0; i < grouping.size(); ++i)
        cell.members.push_back(cube_->members(grouping[i].dim, grouping[i].level)[ec.member_ids[i]]);
      cell.stats = std::move(ec.stats);
      cache_->cells.push_back(std::move(cell));
    }
  });
  return cache_->cells;
}

bool CubeView::operator==(const CubeView& o) const {
  return cube_ == o.cube_ && levels_ == o.levels_ && filters_ == o.filters_ && cells() == o.cells();
}

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

Predicate Predicate::equals(std::string dim, std::string level, std::string member) {
  return Predicate{Kind::equals, std::move(dim), std::move(level), {std::move(member)}};
}

Predicate Predicate::member_set(std::string dim, std::string level,
                                std::vector<std::string> members) {
  return Predicate{Kind::member_set, std::move(dim), std::move(level), std::move(members)};
}

Predicate Predicate::contains(std::string dim, std::optional<std::string> level, std::string text) {
  return Predicate{Kind::contains, std::move(dim), std::move(level), {std::move(text)}};
}

namespace {

CubeView with_level(const CubeView& view, std::size_t dim, std::size_t level) {
  auto levels = view.levels();
  levels[dim] = level;
  return CubeView(view.cube_ptr(), std::move(levels), view.filters());
}

void check_predicate(const Cube& cube, const Predicate& pred) {
  const std::size_t d = cube.dim_index(pred.dim);
  if (pred.kind == Predicate::Kind::contains) {
    if (pred.dim != "description")
      throw InvalidPredicate("CONTAINS applies only to the description dimension");
    if (pred.level && *pred.level != "typology")
      throw InvalidPredicate("CONTAINS applies only to description typology or free text");
    if (pred.values.size() != 1) throw InvalidPredicate("CONTAINS takes exactly one string");
    return;
  }
  if (!pred.level) throw InvalidPredicate("member predicate on " + pred.dim + " needs a level");
  const std::size_t level = cube.level_index(d, *pred.level);
  if (level >= cube.dims()[d].levels.size())
    throw InvalidPredicate("cannot filter " + pred.dim + " at level all");
  if (pred.kind == Predicate::Kind::equals && pred.values.size() != 1)
    throw InvalidPredicate("equality predicate takes exactly one member");
  for (const auto& v : pred.values) {
    if (!cube.find_member(d, level, v)) throw UnknownMember(pred.dim, *pred.level, v);
  }
}

}  // namespace

CubeView rollup(const CubeView& view, std::string_view dim, std::string_view to_level) {
  const Cube& cube = view.cube();
  const auto d = cube.dim_index(dim);
  const auto target = cube.level_index(d, to_level);
  if (target <= view.levels()[d])
    throw LevelOrderViolation("rollup of " + std::string(dim) + " to " + std::string(to_level) +
                              ": target must be coarser than " +
                              std::string(cube.level_name(d, view.levels()[d])));
  return with_level(view, d, target);
}

CubeView drill_down(const CubeView& view, std::string_view dim, std::string_view to_level) {
  const Cube& cube = view.cube();
  const auto d = cube.dim_index(dim);
  const auto target = cube.level_index(d, to_level);
  if (target >= view.levels()[d])
    throw LevelOrderViolation("drill-down of " + std::string(dim) + " to " + std::string(to_level) +
                              ": target must be finer than " +
                              std::string(cube.level_name(d, view.levels()[d])));
  return with_level(view, d, target);
}

CubeView slice(const CubeView& view, std::string_view dim, std::string_view member) {
  const auto level = view.level_of(dim);
  if (level == kAllLevel)
    throw LevelOrderViolation("cannot slice " + std::string(dim) + " at level all");
  return slice_at(view, dim, level, member);
}

CubeView slice_at(const CubeView& view, std::string_view dim, std::string_view level,
                  std::string_view member) {
  auto pred = Predicate::equals(std::string(dim), std::string(level), std::string(member));
  check_predicate(view.cube(), pred);
  auto filters = view.filters();
  filters.push_back(std::move(pred));
  return CubeView(view.cube_ptr(), view.levels(), std::move(filters));
}

CubeView dice(const CubeView& view, const std::vector<Predicate>& predicates) {
  if (predicates.empty()) return view;
  for (const auto& p : predicates) check_predicate(view.cube(), p);
  auto filters = view.filters();
  filters.insert(filters.end(), predicates.begin(), predicates.end());
  return CubeView(view.cube_ptr(), view.levels(), std::move(filters));
}

CubeView with_levels(const CubeView& view, const std::vector<Axis>& grouping) {
  const Cube& cube = view.cube();
  std::vector<std::size_t> levels(cube.dims().size());
  for (std::size_t d = 0; d < levels.size(); ++d) levels[d] = cube.dims()[d].levels.size();
  std::vector<char> seen(levels.size(), 0);
  for (const auto& axis : grouping) {
    const auto d = cube.dim_index(axis.dim);
    if (seen[d]) throw InvalidPredicate("dimension grouped twice: " + axis.dim);
    seen[d] = 1;
    levels[d] = cube.level_index(d, axis.level);
  }
  return CubeView(view.cube_ptr(), std::move(levels), view.filters());
}

}  // namespace ceramdw
