#include <algorithm>
#include <charconv>
#include <map>

#include "ceramdw/cube.hpp"
#include "cube_internal.hpp"

namespace ceramdw {

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::count_facts: return "count_facts";
    case Measure::count_samples: return "count_samples";
    case Measure::count_analyses: return "count_analyses";
    case Measure::sum: return "sum";
    case Measure::avg: return "avg";
    case Measure::min: return "min";
    case Measure::max: return "max";
    case Measure::avg_samples_per_child: return "avg_samples_per_child";
  }
  return "count_samples";
}

std::optional<Measure> parse_measure(std::string_view s) {
  for (auto m : {Measure::count_facts, Measure::count_samples, Measure::count_analyses,
                 Measure::sum, Measure::avg, Measure::min, Measure::max,
                 Measure::avg_samples_per_child}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

double Value::as_double() const {
  switch (kind) {
    case Kind::integer: return static_cast<double>(integer);
    case Kind::decimal: return decimal.to_double();
    case Kind::real: return real;
  }
  return 0.0;
}

std::string Value::to_string() const {
  switch (kind) {
    case Kind::integer: return std::to_string(integer);
    case Kind::decimal: return decimal.to_string();
    case Kind::real: {
      char buf[64];
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, real);
      return std::string(buf, p);
    }
  }
  return {};
}

namespace {

bool is_concentration(Unit u) { return u == Unit::wt_percent || u == Unit::ppm; }

// Power of ten converting `from` into `to` (1 wt% = 10^4 ppm).
int conversion_exponent(Unit from, Unit to) {
  if (from == to) return 0;
  return from == Unit::wt_percent ? 4 : -4;
}

struct ResolvedTarget {
  std::vector<char> mask;     // per measure key
  std::vector<int> exponent;  // per measure key
  std::string label;
};

ResolvedTarget resolve_target(const Cube& cube, const MeasureTarget& target) {
  const auto& keys = cube.measure_keys();
  ResolvedTarget out{std::vector<char>(keys.size(), 0), std::vector<int>(keys.size(), 0), {}};
  std::vector<Unit> units;
  for (const auto& k : keys) {
    if (k.technique == target.technique && k.component == target.component) units.push_back(k.unit);
  }
  const std::string what = std::string(to_string(target.technique)) + "." + target.component;
  if (units.empty()) throw MissingComponent("no facts for " + what);

  Unit unit;
  if (target.unit) {
    unit = *target.unit;
    for (Unit u : units) {
      if (u != unit && !(is_concentration(u) && is_concentration(unit)))
        throw UnitMismatch(what + " has values in " + std::string(to_string(u)) +
                           " which cannot be converted to " + std::string(to_string(unit)));
    }
  } else {
    unit = units.front();
    for (Unit u : units) {
      if (u != unit)
        throw UnitMismatch(what + " mixes " + std::string(to_string(unit)) + " and " +
                           std::string(to_string(u)) + "; name a unit with IN");
    }
  }
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i].technique == target.technique && keys[i].component == target.component) {
      out.mask[i] = 1;
      out.exponent[i] = conversion_exponent(keys[i].unit, unit);
    }
  }
  out.label = what + " " + std::string(to_string(unit));
  return out;
}

MeasureStats combined(const CellStats& stats, const Cube& cube, const ResolvedTarget& target) {
  MeasureStats out;
  const auto& keys = cube.measure_keys();
  for (const auto& [key, ms] : stats.measures) {
    const auto idx = static_cast<std::size_t>(
        std::lower_bound(keys.begin(), keys.end(), key) - keys.begin());
    if (!target.mask[idx]) continue;
    const int e = target.exponent[idx];
    out.add(MeasureStats{ms.count, ms.sum.scaled_pow10(e), ms.min.scaled_pow10(e),
                         ms.max.scaled_pow10(e)});
  }
  return out;
}

Value value_of(Measure m, const CellStats& stats, const Cube& cube,
               const std::optional<ResolvedTarget>& target) {
  switch (m) {
    case Measure::count_facts: return Value::of_int(stats.fact_count);
    case Measure::count_samples: return Value::of_int(stats.distinct_samples);
    case Measure::count_analyses: return Value::of_int(stats.distinct_analyses);
    default: break;
  }
  const MeasureStats ms = combined(stats, cube, *target);
  switch (m) {
    case Measure::sum: return Value::of_decimal(ms.sum);
    case Measure::min: return Value::of_decimal(ms.min);
    case Measure::max: return Value::of_decimal(ms.max);
    case Measure::avg: {
      const long double sum = static_cast<long double>(ms.sum.raw()) / Decimal::kScale;
      return Value::of_real(static_cast<double>(sum / ms.count));
    }
    default: return Value::of_int(0);
  }
}

std::vector<detail::Grouping> view_grouping(const CubeView& view) {
  std::vector<detail::Grouping> g;
  const auto& dims = view.cube().dims();
  for (std::size_t d = 0; d < dims.size(); ++d) {
    if (view.levels()[d] < dims[d].levels.size()) g.push_back({d, view.levels()[d]});
  }
  return g;
}

MemberTuple members_of(const Cube& cube, std::span<const detail::Grouping> grouping,
                       std::span<const std::uint32_t> ids) {
  MemberTuple out;
  for (std::size_t i = 0; i < grouping.size(); ++i)
    out.push_back(cube.members(grouping[i].dim, grouping[i].level)[ids[i]]);
  return out;
}

bool tuple_less(const MemberTuple& a, const MemberTuple& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [](const Member& x, const Member& y) {
                                        return compare_members(x, y) < 0;
                                      });
}

ResultTable avg_samples_per_child(const CubeView& view, const MeasureSpec& spec,
                                  std::span<const char> mask, ResultTable table) {
  const Cube& cube = view.cube();
  if (spec.child_dim.empty())
    throw InvalidMeasure("avg_samples_per_child needs the dimension whose children are averaged");
  const auto d = cube.dim_index(spec.child_dim);
  const auto level = view.levels()[d];
  if (level == 0)
    throw LevelOrderViolation(spec.child_dim + " is at its finest level; it has no children");

  const auto grouping = view_grouping(view);
  auto child_grouping = grouping;
  child_grouping.push_back({d, level - 1});
  const auto children = detail::evaluate(cube, child_grouping, view.filters(), mask);

  // Children arrive sorted, so those of one parent are contiguous.
  std::size_t i = 0;
  while (i < children.size()) {
    std::size_t j = i;
    std::int64_t samples = 0;
    const auto parent = std::span(children[i].member_ids).first(grouping.size());
    while (j < children.size() &&
           std::equal(parent.begin(), parent.end(), children[j].member_ids.begin())) {
      samples += children[j].stats.distinct_samples;
      ++j;
    }
    table.rows.push_back(ResultRow{
        members_of(cube, grouping, parent),
        Value::of_real(static_cast<double>(samples) / static_cast<double>(j - i))});
    i = j;
  }

  const auto cells = detail::evaluate(cube, grouping, view.filters(), mask);
  if (!cells.empty()) {
    std::int64_t samples = 0;
    for (const auto& c : cells) samples += c.stats.distinct_samples;
    table.total = Value::of_real(static_cast<double>(samples) / static_cast<double>(cells.size()));
  }
  return table;
}

}  // namespace

ResultTable aggregate(const CubeView& view, const MeasureSpec& spec) {
  const Cube& cube = view.cube();
  const bool needs_target = spec.measure == Measure::sum || spec.measure == Measure::avg ||
                            spec.measure == Measure::min || spec.measure == Measure::max;
  if (needs_target && !spec.over)
    throw MissingComponent(std::string(to_string(spec.measure)) +
                           " needs a measured component (OF technique.component)");

  std::optional<ResolvedTarget> target;
  if (spec.over) target = resolve_target(cube, *spec.over);
  const std::span<const char> mask = target ? std::span<const char>(target->mask) : std::span<const char>();

  ResultTable table;
  table.columns = view.axes();
  table.measure = std::string(to_string(spec.measure));
  if (target) table.measure += "(" + target->label + ")";

  if (spec.measure == Measure::avg_samples_per_child)
    return avg_samples_per_child(view, spec, mask, std::move(table));

  const auto grouping = view_grouping(view);
  for (const auto& cell : detail::evaluate(cube, grouping, view.filters(), mask)) {
    table.rows.push_back(
        ResultRow{members_of(cube, grouping, cell.member_ids), value_of(spec.measure, cell.stats, cube, target)});
  }
  const auto total = detail::evaluate(cube, {}, view.filters(), mask);
  if (!total.empty()) table.total = value_of(spec.measure, total.front().stats, cube, target);
  return table;
}

ResultTable ResultTable::reordered(std::span<const std::size_t> order) const {
  if (order.size() != columns.size())
    throw InvalidPermutation("permutation has " + std::to_string(order.size()) +
                             " entries for " + std::to_string(columns.size()) + " columns");
  std::vector<char> seen(columns.size(), 0);
  for (auto i : order) {
    if (i >= columns.size() || seen[i]) throw InvalidPermutation("not a permutation of the columns");
    seen[i] = 1;
  }
  ResultTable out;
  out.measure = measure;
  out.total = total;
  for (auto i : order) out.columns.push_back(columns[i]);
  for (const auto& row : rows) {
    ResultRow r{{}, row.value};
    for (auto i : order) r.members.push_back(row.members[i]);
    out.rows.push_back(std::move(r));
  }
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [](const ResultRow& a, const ResultRow& b) { return tuple_less(a.members, b.members); });
  return out;
}

std::vector<std::pair<MemberTuple, Value>> PivotTable::entries() const {
  std::vector<std::pair<MemberTuple, Value>> out;
  for (std::size_t r = 0; r < grid.size(); ++r) {
    for (std::size_t c = 0; c < grid[r].size(); ++c) {
      if (!grid[r][c]) continue;
      MemberTuple t = row_headers[r];
      if (column_axis) t.push_back(column_headers[c]);
      out.emplace_back(std::move(t), *grid[r][c]);
    }
  }
  return out;
}

PivotTable pivot(const ResultTable& table, const std::vector<std::string>& axis_order) {
  if (axis_order.size() != table.columns.size())
    throw InvalidPermutation("axis order must name each of the " +
                             std::to_string(table.columns.size()) + " grouped dimensions");
  std::vector<std::size_t> order;
  for (const auto& name : axis_order) {
    auto it = std::find_if(table.columns.begin(), table.columns.end(),
                           [&](const Axis& a) { return a.dim == name; });
    if (it == table.columns.end()) throw InvalidPermutation("not a grouped dimension: " + name);
    order.push_back(static_cast<std::size_t>(it - table.columns.begin()));
  }
  const ResultTable t = table.reordered(order);

  PivotTable out;
  if (t.columns.empty()) {
    out.row_headers.push_back({});
    out.grid.push_back({t.rows.empty() ? std::nullopt : std::optional<Value>(t.rows.front().value)});
    return out;
  }
  out.row_axes.assign(t.columns.begin(), t.columns.end() - 1);
  out.column_axis = t.columns.back();
  const std::size_t nrow = t.columns.size() - 1;

  for (const auto& row : t.rows) {
    MemberTuple prefix(row.members.begin(), row.members.begin() + static_cast<std::ptrdiff_t>(nrow));
    if (out.row_headers.empty() || out.row_headers.back() != prefix) out.row_headers.push_back(prefix);
    out.column_headers.push_back(row.members.back());
  }
  std::sort(out.column_headers.begin(), out.column_headers.end(),
            [](const Member& a, const Member& b) { return compare_members(a, b) < 0; });
  out.column_headers.erase(std::unique(out.column_headers.begin(), out.column_headers.end()),
                           out.column_headers.end());

  out.grid.assign(out.row_headers.size(),
                  std::vector<std::optional<Value>>(out.column_headers.size()));
  std::size_t r = 0;
  for (const auto& row : t.rows) {
    MemberTuple prefix(row.members.begin(), row.members.begin() + static_cast<std::ptrdiff_t>(nrow));
    while (out.row_headers[r] != prefix) ++r;
    auto c = std::lower_bound(out.column_headers.begin(), out.column_headers.end(), row.members.back(),
                              [](const Member& a, const Member& b) { return compare_members(a, b) < 0; }) -
             out.column_headers.begin();
    out.grid[r][static_cast<std::size_t>(c)] = row.value;
  }
  return out;
}

}  // namespace ceramdw
