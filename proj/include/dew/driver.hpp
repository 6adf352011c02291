#pragma once

#include <bit>
#include <chrono>
#include <cstdint>
#include <span>
#include <vector>

#include "dew/config.hpp"
#include "dew/engine.hpp"
#include "dew/forest.hpp"
#include "dew/oracle.hpp"
#include "dew/report.hpp"
#include "dew/trace_io.hpp"

namespace dew {

// Everything one forest produced: per-level miss counts plus the engine's
// work counters.
struct PlanOutcome {
  ForestPlan plan;
  std::uint64_t accesses = 0;
  std::vector<LevelStats> levels;
  Instrumentation counters;
};

struct SweepOutcome {
  std::vector<PlanOutcome> plans;
};

// One pass over the buffered trace per forest; each pass covers every set
// count for that (block size, associativity) pair at once.
inline SweepOutcome run_sweep(std::span<const MemoryAccess> trace,
                              const SweepSpec& sweep,
                              const EngineOptions& options = {}) {
  validate_sweep(sweep);
  SweepOutcome outcome;
  for (const ForestPlan& plan : plan_forests(sweep)) {
    SimulationForest forest(plan);
    DewEngine engine(forest, options);
    const unsigned shift =
        static_cast<unsigned>(std::countr_zero(plan.block_bytes));
    for (const MemoryAccess& access : trace) {
      engine.process_access(access.address >> shift);
    }
    PlanOutcome& result = outcome.plans.emplace_back();
    result.plan = plan;
    result.accesses = forest.accesses();
    for (unsigned level = 0; level <= plan.top_set_exponent; ++level) {
      result.levels.push_back(forest.stats(level));
    }
    result.counters = engine.instrumentation();
  }
  return outcome;
}

// Flattens forest outcomes to one row per swept configuration. A forest
// reports its own associativity at every requested set count, and the
// designated forest per block size additionally reports the direct-mapped
// column it tracked on the side.
inline std::vector<ResultRow> result_rows(const SweepOutcome& outcome) {
  std::vector<ResultRow> rows;
  for (const PlanOutcome& plan_outcome : outcome.plans) {
    const ForestPlan& plan = plan_outcome.plan;
    for (const std::uint64_t sets : plan.reported_sets) {
      const unsigned level = static_cast<unsigned>(std::countr_zero(sets));
      const LevelStats& stats = plan_outcome.levels.at(level);
      ResultRow row;
      row.block_bytes = plan.block_bytes;
      row.assoc = plan.assoc;
      row.sets = sets;
      row.accesses = plan_outcome.accesses;
      row.misses = stats.misses_assoc;
      row.hits = row.accesses - row.misses;
      rows.push_back(row);
      if (plan.report_direct_mapped) {
        ResultRow dm = row;
        dm.assoc = 1;
        dm.misses = stats.misses_dm;
        dm.hits = dm.accesses - dm.misses;
        rows.push_back(dm);
      }
    }
  }
  sort_rows(rows);
  return rows;
}

inline std::vector<InstrumentationRow> instrumentation_rows(
    const SweepOutcome& outcome) {
  std::vector<InstrumentationRow> rows;
  for (const PlanOutcome& plan_outcome : outcome.plans) {
    InstrumentationRow row;
    row.block_bytes = plan_outcome.plan.block_bytes;
    row.assoc = plan_outcome.plan.assoc;
    row.counters = plan_outcome.counters;
    rows.push_back(row);
  }
  sort_rows(rows);
  return rows;
}

inline std::vector<ConfigMisses> dew_config_misses(
    const SweepOutcome& outcome) {
  std::vector<ConfigMisses> misses;
  for (const ResultRow& row : result_rows(outcome)) {
    misses.push_back(ConfigMisses{row_config(row), row.misses});
  }
  return misses;
}

// Brute-force baseline: one full simulation per configuration.
inline std::vector<ConfigMisses> oracle_config_misses(
    std::span<const MemoryAccess> trace, const SweepSpec& sweep,
    Policy policy = Policy::Fifo) {
  validate_sweep(sweep);
  std::vector<ConfigMisses> misses;
  for (const CacheConfig& config : enumerate_configs(sweep)) {
    misses.push_back(
        ConfigMisses{config, oracle_simulate(config, trace, policy).misses});
  }
  return misses;
}

struct CompareOutcome {
  CrossCheckReport check;
  std::uint64_t dew_tag_comparisons = 0;
  std::uint64_t oracle_tag_comparisons = 0;
  double dew_seconds = 0.0;
  double oracle_seconds = 0.0;

  double comparison_ratio() const {
    return oracle_tag_comparisons == 0
               ? 0.0
               : static_cast<double>(dew_tag_comparisons) /
                     static_cast<double>(oracle_tag_comparisons);
  }
};

// Runs the same sweep both ways, cross-checks every per-configuration miss
// count, and records the work and wall time of each side.
inline CompareOutcome compare_run(std::span<const MemoryAccess> trace,
                                  const SweepSpec& sweep,
                                  const EngineOptions& options = {}) {
  using clock = std::chrono::steady_clock;
  CompareOutcome outcome;

  const auto dew_start = clock::now();
  const SweepOutcome forests = run_sweep(trace, sweep, options);
  outcome.dew_seconds =
      std::chrono::duration<double>(clock::now() - dew_start).count();
  for (const PlanOutcome& plan_outcome : forests.plans) {
    outcome.dew_tag_comparisons += plan_outcome.counters.tag_comparisons;
  }

  std::vector<ConfigMisses> oracle;
  const auto oracle_start = clock::now();
  for (const CacheConfig& config : enumerate_configs(sweep)) {
    const OracleStats stats = oracle_simulate(config, trace, Policy::Fifo);
    oracle.push_back(ConfigMisses{config, stats.misses});
    outcome.oracle_tag_comparisons += stats.tag_comparisons;
  }
  outcome.oracle_seconds =
      std::chrono::duration<double>(clock::now() - oracle_start).count();

  outcome.check = cross_check(dew_config_misses(forests), oracle);
  return outcome;
}

}  // namespace dew
