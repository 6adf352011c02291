#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dew/config.hpp"
#include "dew/errors.hpp"

namespace dew {

// EMPTY sentinels. Valid block addresses never exceed kMaxAddress (63 bits)
// and way indices never reach 2^32-1, so neither value can collide with
// trace-derivable content.
inline constexpr std::uint64_t kEmptyTag =
    std::numeric_limits<std::uint64_t>::max();
inline constexpr std::uint32_t kEmptyWave =
    std::numeric_limits<std::uint32_t>::max();

// A stored tag plus its wave pointer: the way index in the child set where
// this tag was last placed, or EMPTY if unknown. The wave is meaningful only
// while the tag is non-EMPTY.
struct WayEntry {
  std::uint64_t tag = kEmptyTag;
  std::uint32_t wave = kEmptyWave;

  bool operator==(const WayEntry&) const = default;
};

// One cache set at one tree level. The A way entries live in the forest's
// flat per-level array; this header carries the rest.
//
//   mra         most recently accessed tag of this set; doubles as the
//               resident block of the corresponding direct-mapped cache
//   mre         most recently evicted tag plus its wave pointer; never
//               resident in the ways
//   fifo_cursor next insertion/victim way; with fill-in-order and
//               replace-in-order, cursor order equals insertion order, so
//               the cursor always names the least recently inserted way
//               once the set is full
//
// Per node this is the tag-plus-pointer layout of the tree: MRA, MRE and its
// wave, plus A (tag, wave) entries -- S*(96 + 64*A) bits per level at 32-bit
// tags, stored here at 64-bit address width.
struct TreeNode {
  std::uint64_t mra = kEmptyTag;
  WayEntry mre{};
  std::uint32_t fifo_cursor = 0;
};

// Mutable view of one node: header plus its span of way entries.
struct NodeRef {
  unsigned level;
  std::uint64_t index;
  TreeNode& node;
  std::span<WayEntry> ways;
};

// Set index of a block address at tree level l (set size 2^l). The node for
// (l, addr) parents the nodes for sets (index) and (index + 2^l) at level
// l+1; bit l of the block address selects between them.
inline std::uint64_t set_index(unsigned level, std::uint64_t block_addr) {
  return block_addr & ((std::uint64_t{1} << level) - 1);
}

// Next FIFO insertion/victim position of a node.
inline std::uint32_t fifo_victim(const TreeNode& node) {
  return node.fifo_cursor;
}

// Per-level miss counters. Hits are derived (accesses - misses), never
// counted. The access total is level-independent and lives on the forest.
struct LevelStats {
  std::uint64_t misses_assoc = 0;  // A-way misses at this level
  std::uint64_t misses_dm = 0;     // direct-mapped (A=1) misses at this level
};

// All levels of one (B, A) simulation tree: level l holds 2^l nodes, for a
// total of 2^(L+1)-1, eagerly allocated. Node (l, i) is stored at flat index
// (2^l - 1) + i; its ways occupy [index*A, (index+1)*A) of the ways array.
//
// Single-writer: exactly one execution context mutates a forest at a time.
// Distinct forests are independent.
class SimulationForest {
public:
  static constexpr std::uint64_t kDefaultNodeBudget = std::uint64_t{1} << 24;

  explicit SimulationForest(ForestPlan plan,
                            std::uint64_t node_budget = kDefaultNodeBudget)
      : plan_(std::move(plan)) {
    validate_plan(plan_);
    const unsigned levels = plan_.top_set_exponent + 1;
    const std::uint64_t nodes = (std::uint64_t{1} << levels) - 1;
    if (nodes > node_budget) {
      throw ResourceError(
          "simulation forest needs " + std::to_string(nodes) +
          " nodes (top set size " +
          std::to_string(std::uint64_t{1} << plan_.top_set_exponent) +
          "), budget is " + std::to_string(node_budget));
    }
    level_count_ = levels;
    nodes_.resize(nodes);
    ways_.resize(nodes * plan_.assoc);
    stats_.resize(levels);
  }

  const ForestPlan& plan() const { return plan_; }
  unsigned level_count() const { return level_count_; }
  std::uint64_t assoc() const { return plan_.assoc; }
  std::uint64_t node_count() const { return nodes_.size(); }

  NodeRef node(unsigned level, std::uint64_t set) {
    const std::uint64_t flat = (std::uint64_t{1} << level) - 1 + set;
    return NodeRef{level, set, nodes_[flat],
                   std::span<WayEntry>(&ways_[flat * plan_.assoc],
                                       plan_.assoc)};
  }

  LevelStats& stats(unsigned level) { return stats_[level]; }
  const LevelStats& stats(unsigned level) const { return stats_[level]; }

  std::uint64_t accesses() const { return accesses_; }
  void note_access() { ++accesses_; }

private:
  ForestPlan plan_;
  unsigned level_count_ = 0;
  std::vector<TreeNode> nodes_;
  std::vector<WayEntry> ways_;
  std::vector<LevelStats> stats_;
  std::uint64_t accesses_ = 0;
};

}  // namespace dew
