#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ceramdw/cube.hpp"

namespace ceramdw {

inline constexpr std::uint32_t kNoMember = std::numeric_limits<std::uint32_t>::max();

struct Cube::Dimension {
  std::size_t leaf_count = 0;
  std::vector<std::vector<std::uint32_t>> member_of;  // [level][leaf]; kNoMember if unused
  std::vector<std::vector<Member>> members;           // [level], output order
  bool has_text = false;                              // description: CONTAINS target
  std::vector<std::string> typology_text;             // [leaf], empty when unknown
  std::vector<std::string> free_text;                 // [leaf]
};

/// Facts grouped by (finest leaf per dimension, measure key).
struct Cube::Partitions {
  std::size_t dims = 0;
  std::vector<std::uint32_t> leaves;   // [partition * dims + d]
  std::vector<std::uint32_t> measure;  // [partition] index into measure_keys
  std::vector<MeasureStats> stats;     // [partition]
  std::vector<std::uint32_t> sample_offsets, samples;  // CSR of sorted unique ids
  std::vector<std::uint32_t> run_offsets, runs;
  std::size_t sample_universe = 0;
  std::size_t run_universe = 0;

  std::size_t size() const { return measure.size(); }
  std::uint32_t leaf(std::size_t p, std::size_t d) const { return leaves[p * dims + d]; }
};

namespace detail {

/// Dense numbering of fixed-width uint32 tuples. Uses a mixed-radix uint64 key when
/// the radices fit, a byte-string key otherwise.
class TupleIndexer {
 public:
  explicit TupleIndexer(std::vector<std::uint64_t> radices);

  std::uint32_t index_of(std::span<const std::uint32_t> tuple);
  std::size_t size() const { return count_; }
  std::span<const std::uint32_t> tuple(std::uint32_t index) const {
    return {tuples_.data() + index * width_, width_};
  }

 private:
  std::size_t width_;
  std::vector<std::uint64_t> radices_;
  bool packed_ = true;
  std::unordered_map<std::uint64_t, std::uint32_t> packed_map_;
  std::unordered_map<std::string, std::uint32_t> wide_map_;
  std::vector<std::uint32_t> tuples_;
  std::uint32_t count_ = 0;
};

struct EvalCell {
  std::vector<std::uint32_t> member_ids;  // one per grouping entry
  CellStats stats;
};

struct Grouping {
  std::size_t dim;
  std::size_t level;
};

/// Core evaluator shared by views and aggregate(): filters partitions, groups them
/// by `grouping`, and recomputes distinct counts from id sets. `measure_filter`,
/// when non-empty, is a per-measure-key inclusion mask. Cells come back sorted.
std::vector<EvalCell> evaluate(const Cube& cube, std::span<const Grouping> grouping,
                               std::span<const Predicate> filters,
                               std::span<const char> measure_filter);

}  // namespace detail
}  // namespace ceramdw
