#pragma once

// Immutable OLAP cube over a StarSchema, and the navigation operators
// (rollup, drill-down, slice, dice, pivot) producing new CubeViews.
//
// Every dimension has an implicit top level "all"; a dimension at "all" does not
// appear in a view's cell tuples. Levels are ordered finest -> coarsest.
//
// Distinct counts are never summed: each internal partition keeps its sorted set of
// sample and analysis-run ids and every granularity recomputes the union.

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ceramdw/decimal.hpp"
#include "ceramdw/errors.hpp"
#include "ceramdw/etl.hpp"
#include "ceramdw/validate.hpp"

namespace ceramdw {

inline constexpr std::string_view kAllLevel = "all";

struct DimensionSpec {
  std::string name;
  std::vector<std::string> levels;  // finest -> coarsest

  /// provenance: site<town<region<country; dating: sub_period<period;
  /// description: typology<category; groups: group; technique: technique.
  static DimensionSpec standard(std::string_view name);
  /// The five dimensions above, in that order.
  static std::vector<DimensionSpec> all_standard();

  bool operator==(const DimensionSpec&) const = default;
};

struct MeasureKey {
  Technique technique = Technique::chemistry;
  std::string component;
  Unit unit = Unit::wt_percent;

  bool operator==(const MeasureKey&) const = default;
  auto operator<=>(const MeasureKey&) const = default;
};

struct MeasureStats {
  std::int64_t count = 0;
  Decimal sum, min, max;

  void add(const MeasureStats& o);
  bool operator==(const MeasureStats&) const = default;
};

struct CellStats {
  std::int64_t fact_count = 0;
  std::int64_t distinct_samples = 0;
  std::int64_t distinct_analyses = 0;  // distinct (sample, technique, run_tag)
  std::vector<std::pair<MeasureKey, MeasureStats>> measures;  // sorted by key

  bool operator==(const CellStats&) const = default;
};

using MemberTuple = std::vector<Member>;

struct Cell {
  MemberTuple members;
  CellStats stats;

  bool operator==(const Cell&) const = default;
};

struct Axis {
  std::string dim;
  std::string level;

  std::string to_string() const { return dim + "." + level; }
  bool operator==(const Axis&) const = default;
};

/// Filter on one dimension. `equals` and `member_set` match members at `level`;
/// `contains` is a substring match on description typology/free_text.
struct Predicate {
  enum class Kind { equals, member_set, contains };

  Kind kind = Kind::equals;
  std::string dim;
  std::optional<std::string> level;
  std::vector<std::string> values;

  static Predicate equals(std::string dim, std::string level, std::string member);
  static Predicate member_set(std::string dim, std::string level, std::vector<std::string> members);
  static Predicate contains(std::string dim, std::optional<std::string> level, std::string text);

  bool operator==(const Predicate&) const = default;
};

class InvalidPredicate : public Error {
 public:
  using Error::Error;
};

class InvalidMeasure : public Error {
 public:
  using Error::Error;
};

class CubeView;

class Cube : public std::enable_shared_from_this<Cube> {
 public:
  struct Dimension;
  struct Partitions;

  ~Cube();
  Cube(const Cube&) = delete;
  Cube& operator=(const Cube&) = delete;

  const std::vector<DimensionSpec>& dims() const { return specs_; }
  std::size_t fact_count() const { return fact_count_; }
  std::size_t sample_count() const;

  /// Index of a dimension by name; throws UnknownDimension.
  std::size_t dim_index(std::string_view name) const;
  /// Index of a level in a dimension; "all" maps to levels.size(). Throws UnknownLevel.
  std::size_t level_index(std::size_t dim, std::string_view level) const;
  std::string_view level_name(std::size_t dim, std::size_t level) const;

  /// Members present in the facts, in output order (UNKNOWN last).
  const std::vector<Member>& members(std::size_t dim, std::size_t level) const;
  std::optional<std::uint32_t> find_member(std::size_t dim, std::size_t level,
                                           std::string_view label) const;

  /// Distinct measure keys present in the facts, sorted.
  const std::vector<MeasureKey>& measure_keys() const { return measure_keys_; }

  /// View with every dimension at its finest level and no filters.
  CubeView base_view() const;
  /// Cells of base_view(): one per populated finest-level member tuple.
  const std::vector<Cell>& base_cells() const;

  // Internal access for the evaluator.
  const std::vector<Dimension>& dimension_data() const { return dim_data_; }
  const Partitions& partitions() const { return *parts_; }

 private:
  Cube() = default;
  friend std::shared_ptr<const Cube> build_cube(const StarSchema&, std::vector<DimensionSpec>);

  std::vector<DimensionSpec> specs_;
  std::vector<Dimension> dim_data_;
  std::vector<MeasureKey> measure_keys_;
  std::unique_ptr<Partitions> parts_;
  std::size_t fact_count_ = 0;
  mutable std::once_flag base_once_;
  mutable std::shared_ptr<const std::vector<Cell>> base_cells_;
};

using CubePtr = std::shared_ptr<const Cube>;

/// Throws UnknownDimension / UnknownLevel for dimensions or levels the star does
/// not define, and InvalidPredicate for duplicate dimensions or unordered levels.
CubePtr build_cube(const StarSchema& star,
                   std::vector<DimensionSpec> dims = DimensionSpec::all_standard());

/// Immutable navigation state over a cube. Cells are computed on first access and
/// cached; copies share the cache.
class CubeView {
 public:
  CubeView(CubePtr cube, std::vector<std::size_t> levels, std::vector<Predicate> filters);

  const Cube& cube() const { return *cube_; }
  const CubePtr& cube_ptr() const { return cube_; }
  /// Current level index per cube dimension (levels.size() == "all").
  const std::vector<std::size_t>& levels() const { return levels_; }
  std::string_view level_of(std::string_view dim) const;
  const std::vector<Predicate>& filters() const { return filters_; }
  /// True when a slice fixed `dim` to one member.
  bool is_fixed(std::string_view dim) const;

  /// Dimensions not at "all", in cube order; the columns of cells().
  std::vector<Axis> axes() const;
  /// Cells in deterministic order: lexicographic by member, UNKNOWN last.
  const std::vector<Cell>& cells() const;

  /// Same levels, filters and cells over the same cube.
  bool operator==(const CubeView& o) const;

 private:
  struct Cache;
  CubePtr cube_;
  std::vector<std::size_t> levels_;
  std::vector<Predicate> filters_;
  std::shared_ptr<Cache> cache_;
};

/// to_level must be strictly coarser than the current level ("all" allowed).
CubeView rollup(const CubeView& view, std::string_view dim, std::string_view to_level);
/// to_level must be strictly finer than the current level.
CubeView drill_down(const CubeView& view, std::string_view dim, std::string_view to_level);
/// Keeps facts whose member at the current level of `dim` equals `member`.
CubeView slice(const CubeView& view, std::string_view dim, std::string_view member);
/// Same, at an explicit level.
CubeView slice_at(const CubeView& view, std::string_view dim, std::string_view level,
                  std::string_view member);
/// Conjunction of predicates; an empty list is the identity.
CubeView dice(const CubeView& view, const std::vector<Predicate>& predicates);
/// Moves every dimension to the given level in one step (no order constraint).
CubeView with_levels(const CubeView& view, const std::vector<Axis>& grouping);

// ---- aggregation ------------------------------------------------------------

enum class Measure {
  count_facts,
  count_samples,
  count_analyses,
  sum,
  avg,
  min,
  max,
  avg_samples_per_child,
};

std::string_view to_string(Measure m);
std::optional<Measure> parse_measure(std::string_view s);

struct MeasureTarget {
  Technique technique = Technique::chemistry;
  std::string component;
  std::optional<Unit> unit;

  bool operator==(const MeasureTarget&) const = default;
};

struct MeasureSpec {
  Measure measure = Measure::count_samples;
  /// Required for sum/avg/min/max; optional restriction for counts.
  std::optional<MeasureTarget> over;
  /// Required for avg_samples_per_child: the dimension whose children are averaged.
  std::string child_dim;

  bool operator==(const MeasureSpec&) const = default;
};

/// A typed aggregate value; serialized as a decimal string.
struct Value {
  enum class Kind { integer, decimal, real };
  Kind kind = Kind::integer;
  std::int64_t integer = 0;
  Decimal decimal;
  double real = 0.0;

  static Value of_int(std::int64_t v) { return Value{Kind::integer, v, {}, 0.0}; }
  static Value of_decimal(Decimal d) { return Value{Kind::decimal, 0, d, 0.0}; }
  static Value of_real(double r) { return Value{Kind::real, 0, {}, r}; }

  double as_double() const;
  std::string to_string() const;
  bool operator==(const Value&) const = default;
};

struct ResultRow {
  MemberTuple members;
  Value value;

  bool operator==(const ResultRow&) const = default;
};

struct ResultTable {
  std::vector<Axis> columns;
  std::string measure;  // e.g. "count_samples", "avg(CHEMISTRY.Al wt_percent)"
  std::vector<ResultRow> rows;
  /// Measure over the whole filtered view; absent when no fact matches.
  std::optional<Value> total;

  /// Reorders columns (a permutation of column indices) and re-sorts rows.
  ResultTable reordered(std::span<const std::size_t> order) const;
  bool operator==(const ResultTable&) const = default;
};

/// Throws UnitMismatch, MissingComponent, LevelOrderViolation or InvalidMeasure.
ResultTable aggregate(const CubeView& view, const MeasureSpec& spec);

/// Presentation grid: the last axis in `axis_order` spans the columns, the others
/// nest down the rows.
struct PivotTable {
  std::vector<Axis> row_axes;
  std::optional<Axis> column_axis;
  std::vector<MemberTuple> row_headers;
  std::vector<Member> column_headers;
  std::vector<std::vector<std::optional<Value>>> grid;

  /// Every filled grid cell as (members in `row_axes + column_axis` order, value).
  std::vector<std::pair<MemberTuple, Value>> entries() const;
  bool operator==(const PivotTable&) const = default;
};

/// axis_order lists every column dimension of `table` exactly once (by dimension
/// name); otherwise InvalidPermutation.
PivotTable pivot(const ResultTable& table, const std::vector<std::string>& axis_order);

}  // namespace ceramdw
