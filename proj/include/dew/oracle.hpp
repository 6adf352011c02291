#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dew/config.hpp"
#include "dew/errors.hpp"
#include "dew/trace_io.hpp"

namespace dew {

enum class Policy { Fifo, Lru };

struct OracleStats {
  CacheConfig config;
  std::uint64_t accesses = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t tag_comparisons = 0;
};

// Classic single-configuration set-associative simulator, the ground truth
// for differential testing. Deliberately shares no storage or traversal code
// with the tree simulator: each set is a plain age-ordered list of blocks.
//
// Comparison counting mirrors a naive simulator: a lookup probes the set's
// ways oldest-first (least recent first for LRU) and counts one comparison
// per probed way; a miss probes all A ways, empty or not, with no early
// exit.
//
// Unlike sweep geometries, the reference model accepts any positive set or
// way count (non-power-of-two associativities are needed to exhibit the
// FIFO anomaly); only the block size must be a power of two.
class ReferenceCache {
public:
  ReferenceCache(const CacheConfig& config, Policy policy)
      : config_(config), policy_(policy) {
    if (config.sets == 0 || config.assoc == 0) {
      throw ConfigError("reference cache needs at least one set and one way");
    }
    if (config.block_bytes == 0 || !std::has_single_bit(config.block_bytes)) {
      throw ConfigError("block size must be a power of two, got " +
                        std::to_string(config.block_bytes));
    }
    sets_.resize(config.sets);
    stats_.config = config;
  }

  // Feed one byte-addressed access. The access kind never influences hit or
  // miss behaviour (unified cache model).
  bool access(const MemoryAccess& a) {
    return access_block(block_address(a.address, config_.block_bytes));
  }

  // Feed one already-divided block address.
  bool access_block(std::uint64_t block) {
    ++stats_.accesses;
    std::vector<std::uint64_t>& set = sets_[block % config_.sets];

    for (std::size_t i = 0; i < set.size(); ++i) {
      ++stats_.tag_comparisons;
      if (set[i] == block) {
        ++stats_.hits;
        if (policy_ == Policy::Lru) {
          // Move to most recently used; FIFO leaves the order untouched.
          set.erase(set.begin() + static_cast<std::ptrdiff_t>(i));
          set.push_back(block);
        }
        return true;
      }
    }
    // Unprobed (empty) ways still cost a comparison each on a miss.
    stats_.tag_comparisons += config_.assoc - set.size();
    ++stats_.misses;
    if (set.size() == config_.assoc) {
      set.erase(set.begin());  // oldest inserted (FIFO) / least recent (LRU)
    }
    set.push_back(block);
    return false;
  }

  const OracleStats& stats() const { return stats_; }

private:
  CacheConfig config_;
  Policy policy_;
  std::vector<std::vector<std::uint64_t>> sets_;
  OracleStats stats_;
};

inline OracleStats oracle_simulate(const CacheConfig& config,
                                   std::span<const MemoryAccess> trace,
                                   Policy policy = Policy::Fifo) {
  ReferenceCache cache(config, policy);
  for (const MemoryAccess& a : trace) cache.access(a);
  return cache.stats();
}

// Per-configuration miss totals from one side of a differential run.
struct ConfigMisses {
  CacheConfig config;
  std::uint64_t misses = 0;
};

struct CrossCheckEntry {
  CacheConfig config;
  std::uint64_t lhs_misses = 0;
  std::uint64_t rhs_misses = 0;
};

struct CrossCheckReport {
  std::size_t compared = 0;
  std::vector<CrossCheckEntry> mismatches;

  bool pass() const { return mismatches.empty(); }
};

// Exact per-configuration comparison of two result sets. Both sides must
// cover the same configurations; anything missing on either side is a usage
// error naming the configs.
inline CrossCheckReport cross_check(std::span<const ConfigMisses> lhs,
                                    std::span<const ConfigMisses> rhs) {
  auto sorted = [](std::span<const ConfigMisses> in) {
    std::vector<ConfigMisses> v(in.begin(), in.end());
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
      return config_less(a.config, b.config);
    });
    return v;
  };
  std::vector<ConfigMisses> a = sorted(lhs);
  std::vector<ConfigMisses> b = sorted(rhs);

  std::string missing;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j >= b.size() ||
        (i < a.size() && config_less(a[i].config, b[j].config))) {
      missing += "\n  only on left side: " + describe(a[i].config);
      ++i;
    } else if (i >= a.size() || config_less(b[j].config, a[i].config)) {
      missing += "\n  only on right side: " + describe(b[j].config);
      ++j;
    } else {
      ++i;
      ++j;
    }
  }
  if (!missing.empty()) {
    throw UsageError("cross-check inputs cover different configurations:" +
                     missing);
  }

  CrossCheckReport report;
  report.compared = a.size();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].misses != b[k].misses) {
      report.mismatches.push_back({a[k].config, a[k].misses, b[k].misses});
    }
  }
  return report;
}

}  // namespace dew
