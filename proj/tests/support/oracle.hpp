#pragma once

// Naive reference evaluator: one pass over the fact table with std::map grouping.
// Shares no code with the cube engine beyond the record types and Decimal.

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ceramdw/cube.hpp"
#include "ceramdw/etl.hpp"

namespace oracle {

using namespace ceramdw;

inline Member member_at(const StarSchema& star, const FactRecord& f, const std::string& dim,
                        const std::string& level) {
  if (dim == "provenance") {
    const auto& row = star.dim_provenance.at(f.provenance_key - 1);
    if (level == "site") return row.site;
    if (level == "town") return row.town;
    if (level == "region") return row.region;
    return row.country;
  }
  if (dim == "dating") {
    const auto& row = star.dim_dating.at(f.dating_key);
    return level == "period" ? row.period : row.sub_period;
  }
  if (dim == "description") {
    const auto& row = star.dim_description.at(f.description_key);
    return level == "category" ? row.category : row.typology;
  }
  if (dim == "groups") return star.dim_group.at(f.group_key).name;
  return Member{std::string(to_string(f.technique)), false};
}

inline bool member_less(const Member& a, const Member& b) {
  return std::tie(a.unknown, a.label) < std::tie(b.unknown, b.label);
}

struct TupleLess {
  bool operator()(const MemberTuple& a, const MemberTuple& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), member_less);
  }
};

inline bool matches(const StarSchema& star, const FactRecord& f, const Predicate& p) {
  if (p.kind == Predicate::Kind::contains) {
    const auto& row = star.dim_description.at(f.description_key);
    const std::string typology = row.typology.unknown ? "" : row.typology.label;
    const std::string& needle = p.values.at(0);
    if (typology.find(needle) != std::string::npos) return true;
    return !p.level && row.free_text.find(needle) != std::string::npos;
  }
  const Member m = member_at(star, f, p.dim, *p.level);
  for (const auto& v : p.values) {
    if (m.label == v) return true;
  }
  return false;
}

struct Query {
  std::vector<DimensionSpec> dims;  // cube definition, for "all" resolution
  std::vector<Axis> group_by;       // output column order; level "all" = not grouped
  std::vector<Predicate> filters;
  MeasureSpec measure;
};

struct Target {
  Technique technique;
  std::string component;
  Unit unit;
};

inline bool concentration(Unit u) { return u != Unit::dimensionless; }

/// Mirrors the unit policy: conversion only between wt_percent and ppm.
inline Target resolve(const StarSchema& star, const MeasureTarget& t) {
  std::set<Unit> units;
  for (const auto& f : star.facts) {
    if (f.technique == t.technique && f.component == t.component) units.insert(f.unit);
  }
  if (units.empty()) throw MissingComponent(t.component);
  if (t.unit) {
    for (Unit u : units) {
      if (u != *t.unit && !(concentration(u) && concentration(*t.unit))) throw UnitMismatch(t.component);
    }
    return {t.technique, t.component, *t.unit};
  }
  if (units.size() > 1) throw UnitMismatch(t.component);
  return {t.technique, t.component, *units.begin()};
}

inline __int128 converted(const FactRecord& f, Unit to) {
  __int128 raw = f.value.raw();
  if (f.unit == to) return raw;
  if (f.unit == Unit::wt_percent) return raw * 10000;
  return raw / 10000;  // exact: inputs carry at most six decimals
}

struct Acc {
  std::int64_t facts = 0;
  std::set<std::string> samples;
  std::set<std::tuple<std::string, Technique, std::string>> runs;
  std::int64_t n = 0;
  __int128 sum = 0, lo = 0, hi = 0;

  void add(const FactRecord& f, const std::optional<Target>& t) {
    ++facts;
    samples.insert(f.sample_id);
    runs.insert({f.sample_id, f.technique, f.run_tag});
    if (t) {
      const __int128 v = converted(f, t->unit);
      if (n == 0 || v < lo) lo = v;
      if (n == 0 || v > hi) hi = v;
      sum += v;
      ++n;
    }
  }

  Value value(Measure m) const {
    switch (m) {
      case Measure::count_facts: return Value::of_int(facts);
      case Measure::count_samples: return Value::of_int(static_cast<std::int64_t>(samples.size()));
      case Measure::count_analyses: return Value::of_int(static_cast<std::int64_t>(runs.size()));
      case Measure::sum: return Value::of_decimal(Decimal::from_raw(sum));
      case Measure::min: return Value::of_decimal(Decimal::from_raw(lo));
      case Measure::max: return Value::of_decimal(Decimal::from_raw(hi));
      case Measure::avg: return Value::of_real(static_cast<double>(sum) / 1e10 / static_cast<double>(n));
      default: return Value::of_int(0);
    }
  }
};

inline const DimensionSpec& spec_of(const Query& q, const std::string& dim) {
  for (const auto& d : q.dims) {
    if (d.name == dim) return d;
  }
  throw UnknownDimension(dim);
}

/// Result columns follow q.group_by (minus "all" axes).
inline ResultTable scan(const StarSchema& star, const Query& q) {
  const auto& m = q.measure;
  const bool needs_target =
      m.measure == Measure::sum || m.measure == Measure::avg || m.measure == Measure::min || m.measure == Measure::max;
  if (needs_target && !m.over) throw MissingComponent("no target");
  std::optional<Target> target;
  if (m.over) target = resolve(star, *m.over);

  std::vector<Axis> axes;
  for (const auto& a : q.group_by) {
    if (a.level != kAllLevel) axes.push_back(a);
  }

  std::vector<const FactRecord*> selected;
  for (const auto& f : star.facts) {
    if (target && (f.technique != target->technique || f.component != target->component)) continue;
    bool ok = true;
    for (const auto& p : q.filters) ok = ok && matches(star, f, p);
    if (ok) selected.push_back(&f);
  }

  auto key_of = [&](const FactRecord& f, const std::vector<Axis>& ax) {
    MemberTuple t;
    for (const auto& a : ax) t.push_back(member_at(star, f, a.dim, a.level));
    return t;
  };

  ResultTable out;
  out.columns = axes;

  if (m.measure == Measure::avg_samples_per_child) {
    const auto& spec = spec_of(q, m.child_dim);
    std::size_t level = spec.levels.size();
    for (const auto& a : axes) {
      if (a.dim == m.child_dim)
        level = static_cast<std::size_t>(std::find(spec.levels.begin(), spec.levels.end(), a.level) -
                                         spec.levels.begin());
    }
    if (level == 0) throw LevelOrderViolation("finest level");
    const std::string child_level = spec.levels[level - 1];
    std::map<MemberTuple, std::map<MemberTuple, std::set<std::string>, TupleLess>, TupleLess> groups;
    for (const auto* f : selected) {
      MemberTuple child{member_at(star, *f, m.child_dim, child_level)};
      groups[key_of(*f, axes)][child].insert(f->sample_id);
    }
    double grand = 0;
    for (const auto& [key, children] : groups) {
      std::int64_t samples = 0;
      for (const auto& [c, s] : children) samples += static_cast<std::int64_t>(s.size());
      out.rows.push_back({key, Value::of_real(static_cast<double>(samples) / static_cast<double>(children.size()))});
      std::set<std::string> all;
      for (const auto& [c, s] : children) all.insert(s.begin(), s.end());
      grand += static_cast<double>(all.size());
    }
    if (!groups.empty()) out.total = Value::of_real(grand / static_cast<double>(groups.size()));
    return out;
  }

  std::map<MemberTuple, Acc, TupleLess> cells;
  Acc total;
  for (const auto* f : selected) {
    cells[key_of(*f, axes)].add(*f, target);
    total.add(*f, target);
  }
  for (const auto& [key, acc] : cells) out.rows.push_back({key, acc.value(m.measure)});
  if (!selected.empty()) out.total = total.value(m.measure);
  return out;
}

/// Values compare exactly except real-valued ones (averages), which use a
/// relative tolerance.
inline bool same_value(const Value& a, const Value& b, double rel = 1e-9) {
  if (a.kind == Value::Kind::real || b.kind == Value::Kind::real) {
    if (a.kind != b.kind) return false;
    const double scale = std::max({1.0, std::fabs(a.real), std::fabs(b.real)});
    return std::fabs(a.real - b.real) <= rel * scale;
  }
  return a == b;
}

/// Empty string when equal, otherwise a description of the first difference.
inline std::string diff(const ResultTable& got, const ResultTable& want) {
  if (got.columns != want.columns) return "columns differ";
  if (got.rows.size() != want.rows.size())
    return "row count " + std::to_string(got.rows.size()) + " vs " + std::to_string(want.rows.size());
  for (std::size_t i = 0; i < got.rows.size(); ++i) {
    if (got.rows[i].members != want.rows[i].members) return "members differ at row " + std::to_string(i);
    if (!same_value(got.rows[i].value, want.rows[i].value))
      return "value at row " + std::to_string(i) + ": " + got.rows[i].value.to_string() + " vs " +
             want.rows[i].value.to_string();
  }
  if (got.total.has_value() != want.total.has_value()) return "total presence differs";
  if (got.total && !same_value(*got.total, *want.total))
    return "total " + got.total->to_string() + " vs " + want.total->to_string();
  return {};
}

}  // namespace oracle
