#pragma once

#include <cassert>
#include <charconv>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dew/forest.hpp"
#include "dew/oracle.hpp"

namespace dew {

// Per-forest work counters. unoptimized_evals is the worst case for any
// algorithm on this forest: accesses times level count. tag_comparisons
// counts every equality test made by the decision ladder (wave probe, MRE
// probe, each searched way) plus the MRA test at every evaluated node; the
// MRA test is counted even against an empty node, while the wave and MRE
// rules only run (and only count) when there is a stored value to test.
struct Instrumentation {
  std::uint64_t unoptimized_evals = 0;
  std::uint64_t node_evals = 0;
  std::uint64_t mra_count = 0;   // early terminations on the MRA tag
  std::uint64_t searches = 0;    // full way scans
  std::uint64_t wave_count = 0;  // lookups decided by a wave pointer
  std::uint64_t mre_count = 0;   // misses decided by the MRE tag
  std::uint64_t tag_comparisons = 0;
};

// The three search shortcuts can be disabled independently; results must be
// identical either way, only the work changes. State maintenance (MRA, MRE,
// wave pointers, cursor) always follows the full update rules regardless of
// these switches. shadow_check revalidates every shortcut decision with a
// full search and every outcome against a per-level reference model, and
// throws ShadowViolation with a state dump on any disagreement.
struct EngineOptions {
  bool use_mra_stop = true;  // stop descending on an MRA match
  bool use_wave = true;      // decide child lookups by the wave pointer
  bool use_mre = true;       // decide misses by the MRE tag
  bool shadow_check = false;
};

enum class LookupResult { Hit, Miss };
enum class LookupVia { Mra, Wave, Mre, Search, SearchFail };

// way is meaningful for hits only; misses insert later and learn their way
// from the FIFO cursor.
struct LookupOutcome {
  LookupResult result;
  std::uint32_t way;
  LookupVia via;
};

// Link to the parent node's way entry matching the tag being processed.
// Absent at the root.
struct ParentLink {
  TreeNode* node = nullptr;
  WayEntry* entry = nullptr;
  std::uint32_t entry_index = 0;
};

namespace detail {

inline std::string format_tag(std::uint64_t tag) {
  if (tag == kEmptyTag) return "EMPTY";
  char buf[20];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), tag, 16);
  return "0x" + std::string(buf, ptr);
}

inline std::string format_wave(std::uint32_t wave) {
  return wave == kEmptyWave ? "EMPTY" : std::to_string(wave);
}

inline std::string dump_node(const NodeRef& node) {
  std::string out = "  node level=" + std::to_string(node.level) + " set=" +
                    std::to_string(node.index) + " assoc=" +
                    std::to_string(node.ways.size()) + "\n  mra=" +
                    format_tag(node.node.mra) + " mre={tag=" +
                    format_tag(node.node.mre.tag) + ", wave=" +
                    format_wave(node.node.mre.wave) + "} cursor=" +
                    std::to_string(node.node.fifo_cursor) + "\n";
  for (std::size_t i = 0; i < node.ways.size(); ++i) {
    out += "  ways[" + std::to_string(i) + "]={tag=" +
           format_tag(node.ways[i].tag) + ", wave=" +
           format_wave(node.ways[i].wave) + "}\n";
  }
  return out;
}

// Debug-mode revalidation: per-level reference caches stepped in lockstep
// with the forest, plus full-search shadows of every shortcut decision.
class ShadowChecker {
public:
  explicit ShadowChecker(SimulationForest& forest) : forest_(&forest) {
    const unsigned levels = forest.level_count();
    for (unsigned l = 0; l < levels; ++l) {
      const std::uint64_t sets = std::uint64_t{1} << l;
      // Fed block addresses directly, so block size 1.
      assoc_.emplace_back(CacheConfig{sets, forest.assoc(), 1}, Policy::Fifo);
      dm_.emplace_back(CacheConfig{sets, 1, 1}, Policy::Fifo);
    }
    dm_hits_.resize(levels);
    assoc_hits_.resize(levels);
  }

  void begin_access(std::uint64_t block) {
    ++access_no_;
    block_ = block;
    for (std::size_t l = 0; l < assoc_.size(); ++l) {
      dm_hits_[l] = dm_[l].access_block(block);
      assoc_hits_[l] = assoc_[l].access_block(block);
    }
  }

  void check_level(const NodeRef& node, bool dew_dm_hit, bool dew_assoc_hit) {
    if (dew_dm_hit != dm_hits_[node.level]) {
      fail(node, std::string("direct-mapped outcome (") +
                     (dew_dm_hit ? "hit" : "miss") +
                     ") disagrees with the reference model");
    }
    if (dew_assoc_hit != assoc_hits_[node.level]) {
      fail(node, std::string("set-associative outcome (") +
                     (dew_assoc_hit ? "hit" : "miss") +
                     ") disagrees with the reference model");
    }
  }

  // Early-termination soundness: every level skipped after an MRA stop must
  // be a hit in both reference models.
  void check_skipped_levels(unsigned first_skipped) {
    for (unsigned l = first_skipped; l < assoc_.size(); ++l) {
      if (!dm_hits_[l] || !assoc_hits_[l]) {
        fail(forest_->node(l, set_index(l, block_)),
             "MRA stop skipped a level the reference model misses");
      }
    }
  }

  void validate_wave_decision(const NodeRef& node, std::uint64_t tag,
                              std::uint32_t wave_hint, bool hit) {
    if (wave_hint >= node.ways.size()) {
      fail(node, "wave hint " + std::to_string(wave_hint) +
                     " is out of range");
    }
    if (node.ways[wave_hint].tag == kEmptyTag) {
      fail(node, "wave hint points at a never-filled way");
    }
    const std::uint32_t found = find_way(node, tag);
    if (hit && found != wave_hint) {
      fail(node, "wave pointer declared a hit but the tag is " +
                     (found == kEmptyWave
                          ? std::string("not resident")
                          : "resident at way " + std::to_string(found)));
    }
    if (!hit && found != kEmptyWave) {
      fail(node, "wave pointer declared a miss but the tag is resident at "
                 "way " + std::to_string(found));
    }
  }

  void validate_mre_decision(const NodeRef& node, std::uint64_t tag) {
    const std::uint32_t found = find_way(node, tag);
    if (found != kEmptyWave) {
      fail(node, "MRE declared a miss but the tag is resident at way " +
                     std::to_string(found));
    }
  }

  void check_node_invariants(const NodeRef& node) {
    if (node.node.mra != kEmptyTag &&
        find_way(node, node.node.mra) == kEmptyWave) {
      fail(node, "MRA tag is not resident in the ways");
    }
    if (node.node.mre.tag != kEmptyTag &&
        find_way(node, node.node.mre.tag) != kEmptyWave) {
      fail(node, "MRE tag is resident in the ways");
    }
    for (std::size_t i = 0; i < node.ways.size(); ++i) {
      if (node.ways[i].tag == kEmptyTag) continue;
      for (std::size_t j = i + 1; j < node.ways.size(); ++j) {
        if (node.ways[j].tag == node.ways[i].tag) {
          fail(node, "tag stored in more than one way");
        }
      }
    }
    if (node.node.fifo_cursor >= node.ways.size()) {
      fail(node, "FIFO cursor out of range");
    }
  }

private:
  static std::uint32_t find_way(const NodeRef& node, std::uint64_t tag) {
    for (std::size_t i = 0; i < node.ways.size(); ++i) {
      if (node.ways[i].tag == tag) return static_cast<std::uint32_t>(i);
    }
    return kEmptyWave;
  }

  [[noreturn]] void fail(const NodeRef& node, const std::string& reason) {
    throw ShadowViolation("shadow check failed: " + reason + "\n  access #" +
                          std::to_string(access_no_) + " block=" +
                          format_tag(block_) + "\n" + dump_node(node));
  }

  SimulationForest* forest_;
  std::vector<ReferenceCache> assoc_;
  std::vector<ReferenceCache> dm_;
  std::vector<char> dm_hits_;
  std::vector<char> assoc_hits_;
  std::uint64_t access_no_ = 0;
  std::uint64_t block_ = 0;
};

}  // namespace detail

// Executes the top-down traversal for one forest: MRA early termination,
// wave-pointer decisions, MRE miss shortcut, full FIFO search fallback.
//
// Per access, levels are walked from the single-set root downward. At each
// node, one comparison against the MRA tag settles the direct-mapped
// outcome; a match additionally proves the access hits every remaining
// configuration (the last access to this set was this very tag, so nothing
// since can have evicted it anywhere below), and FIFO hits mutate nothing,
// so the walk stops there. Otherwise the set-associative outcome is
// resolved by the decision ladder in lookup(), state is updated per the hit
// and miss rules, and the walk descends to the child selected by bit
// `level` of the block address, carrying the matching entry's wave pointer
// as the child's lookup hint.
class DewEngine {
public:
  explicit DewEngine(SimulationForest& forest, EngineOptions options = {})
      : forest_(&forest), opts_(options) {
    if (opts_.shadow_check) {
      shadow_ = std::make_unique<detail::ShadowChecker>(forest);
    }
  }

  const Instrumentation& instrumentation() const { return inst_; }
  const EngineOptions& options() const { return opts_; }
  SimulationForest& forest() { return *forest_; }

  // block_addr must already be divided by the forest's block size.
  void process_access(std::uint64_t block_addr) {
    SimulationForest& forest = *forest_;
    const unsigned levels = forest.level_count();
    forest.note_access();
    inst_.unoptimized_evals += levels;
    if (shadow_) shadow_->begin_access(block_addr);

    ParentLink parent;
    std::uint32_t wave_hint = kEmptyWave;
    unsigned level = 0;
    for (; level < levels; ++level) {
      NodeRef node = forest.node(level, set_index(level, block_addr));
      ++inst_.node_evals;
      ++inst_.tag_comparisons;
      const bool mra_match = node.node.mra == block_addr;

      if (mra_match && opts_.use_mra_stop) {
        ++inst_.mra_count;
        if (shadow_) {
          shadow_->check_level(node, true, true);
          shadow_->check_node_invariants(node);
        }
        ++level;
        break;
      }

      if (!mra_match) forest.stats(level).misses_dm += 1;

      const LookupOutcome outcome = lookup(node, block_addr, wave_hint);
      std::uint32_t way;
      if (outcome.result == LookupResult::Hit) {
        way = handle_hit(node, outcome.way, parent);
      } else {
        assert(!mra_match && "a most-recently-accessed tag must be resident");
        way = handle_miss(node, block_addr, parent);
      }
      node.node.mra = block_addr;

      if (shadow_) {
        shadow_->check_level(node, mra_match,
                             outcome.result == LookupResult::Hit);
        shadow_->check_node_invariants(node);
      }

      // The child's hint, read after this node's handling completes and
      // before the child can touch it.
      wave_hint = node.ways[way].wave;
      parent = ParentLink{&node.node, &node.ways[way], way};
    }

    if (shadow_) shadow_->check_skipped_levels(level);
  }

  // Decision ladder for one set, first applicable rule wins. The caller has
  // already tested the MRA tag.
  LookupOutcome lookup(NodeRef node, std::uint64_t tag,
                       std::uint32_t wave_hint) {
    // (a) Wave pointer: under FIFO a block never moves between ways without
    // being accessed, and every access rewrites the pointer, so one probe of
    // the pointed-to way decides hit or miss outright.
    if (opts_.use_wave && wave_hint != kEmptyWave) {
      ++inst_.wave_count;
      ++inst_.tag_comparisons;
      const bool hit = node.ways[wave_hint].tag == tag;
      if (shadow_) shadow_->validate_wave_decision(node, tag, wave_hint, hit);
      return {hit ? LookupResult::Hit : LookupResult::Miss, wave_hint,
              LookupVia::Wave};
    }
    // (b) MRE: the most recently evicted tag is never resident.
    if (opts_.use_mre && node.node.mre.tag != kEmptyTag) {
      ++inst_.tag_comparisons;
      if (node.node.mre.tag == tag) {
        ++inst_.mre_count;
        if (shadow_) shadow_->validate_mre_decision(node, tag);
        return {LookupResult::Miss, kEmptyWave, LookupVia::Mre};
      }
    }
    // (c) Full search, one comparison per probed way.
    ++inst_.searches;
    for (std::uint32_t i = 0; i < node.ways.size(); ++i) {
      ++inst_.tag_comparisons;
      if (node.ways[i].tag == tag) {
        return {LookupResult::Hit, i, LookupVia::Search};
      }
    }
    return {LookupResult::Miss, kEmptyWave, LookupVia::SearchFail};
  }

  // FIFO hits are state-preserving: only the parent's wave pointer is
  // refreshed. The caller sets the MRA tag afterwards.
  std::uint32_t handle_hit(NodeRef node, std::uint32_t way,
                           const ParentLink& parent) {
    (void)node;
    if (parent.entry) parent.entry->wave = way;
    return way;
  }

  // Replace the least recently inserted way. A reinserted MRE tag recovers
  // its previous child-position hint by swapping with the MRE entry;
  // otherwise the freshly evicted entry (tag and wave pointer) becomes the
  // new MRE. Cold-start insertions evict nothing and leave the MRE alone.
  std::uint32_t handle_miss(NodeRef node, std::uint64_t tag,
                            const ParentLink& parent) {
    forest_->stats(node.level).misses_assoc += 1;
    const std::uint32_t way = fifo_victim(node.node);
    const WayEntry victim = node.ways[way];
    if (node.node.mre.tag == tag) {
      node.ways[way] = WayEntry{tag, node.node.mre.wave};
      node.node.mre = victim;
    } else {
      node.ways[way] = WayEntry{tag, kEmptyWave};
      if (victim.tag != kEmptyTag) node.node.mre = victim;
    }
    node.node.fifo_cursor =
        static_cast<std::uint32_t>((way + 1) % node.ways.size());
    if (parent.entry) parent.entry->wave = way;
    return way;
  }

private:
  SimulationForest* forest_;
  EngineOptions opts_;
  Instrumentation inst_;
  std::unique_ptr<detail::ShadowChecker> shadow_;
};

}  // namespace dew
