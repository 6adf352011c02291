// End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
// exit code is the number of failures. Everything runs in-process against
// deterministic generated traces, so two runs of this binary print the same
// counts (wall-clock figures aside).

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "dew/driver.hpp"
#include "dew/errors.hpp"

namespace {

struct Checker {
  int failures = 0;

  void report(bool pass, const std::string& name, const std::string& note) {
    if (!pass) ++failures;
    std::cout << (pass ? "PASS  " : "FAIL  ") << name;
    if (!note.empty()) std::cout << " (" << note << ")";
    std::cout << "\n";
  }
};

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

std::string seconds(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.1f s", value);
  return buffer;
}

// The textbook sequence whose FIFO miss count rises when a fourth way is
// added to a one-set cache.
std::vector<dew::MemoryAccess> anomaly_trace() {
  std::vector<dew::MemoryAccess> trace;
  for (const std::uint64_t block : {1, 2, 3, 4, 1, 2, 5, 1, 2, 3, 4, 5}) {
    trace.push_back({block * 256, dew::AccessKind::Read});
  }
  return trace;
}

// 200 generated traces (50 seeds, four loop intensities) plus the anomaly
// sequence. 16-bit addresses, 10^4 accesses each.
std::vector<std::vector<dew::MemoryAccess>> acceptance_traces() {
  const double fractions[] = {0.0, 0.5, 0.9, 1.0};
  std::vector<std::vector<dew::MemoryAccess>> traces;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (std::size_t f = 0; f < 4; ++f) {
      dew::TraceSpec spec;
      spec.length = 10000;
      spec.address_bits = 16;
      spec.loop_fraction = fractions[f];
      spec.loop_body = 1 + seed % 64;
      spec.stride = 4;
      spec.seed = seed * 4 + f;
      traces.push_back(dew::generate_trace(spec));
    }
  }
  traces.push_back(anomaly_trace());
  return traces;
}

dew::SweepSpec acceptance_sweep() {
  dew::SweepSpec sweep;
  sweep.set_exponents = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  sweep.block_exponents = {2, 4, 6};        // 4, 16, 64 bytes
  sweep.assoc_exponents = {0, 1, 2, 3, 4};  // 1..16 ways
  return sweep;
}

}  // namespace

int main() {
  Checker checker;
  const std::vector<std::vector<dew::MemoryAccess>> traces =
      acceptance_traces();
  const dew::SweepSpec sweep = acceptance_sweep();
  const std::size_t config_count = dew::enumerate_configs(sweep).size();

  // Exactness and shadow checking share one pass: every trace runs the full
  // sweep with shadow checking enabled, and every per-configuration miss
  // count must equal the brute-force single-configuration result.
  bool exact = true;
  bool shadow_clean = true;
  std::string exact_note;
  std::string shadow_note;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t t = 0; t < traces.size(); ++t) {
    const std::vector<dew::MemoryAccess>& trace = traces[t];
    dew::EngineOptions options;
    options.shadow_check = true;
    dew::SweepOutcome outcome;
    try {
      outcome = dew::run_sweep(trace, sweep, options);
    } catch (const dew::ShadowViolation& violation) {
      shadow_clean = false;
      if (shadow_note.empty()) {
        shadow_note = "trace " + std::to_string(t) + ": " +
                      first_line(violation.what());
      }
      outcome = dew::run_sweep(trace, sweep);
    }
    const dew::CrossCheckReport report = dew::cross_check(
        dew::dew_config_misses(outcome), dew::oracle_config_misses(trace, sweep));
    if (!report.pass() && exact) {
      exact = false;
      const dew::CrossCheckEntry& bad = report.mismatches.front();
      exact_note = "trace " + std::to_string(t) + " " +
                   dew::describe(bad.config) + ": simulated " +
                   std::to_string(bad.lhs_misses) + ", reference " +
                   std::to_string(bad.rhs_misses);
    }
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (elapsed > 300.0) {
    exact = false;
    exact_note = "exceeded the 300 s budget: " + seconds(elapsed);
  }
  if (exact_note.empty()) {
    exact_note = std::to_string(traces.size()) + " traces, " +
                 std::to_string(config_count) + " configurations each, " +
                 seconds(elapsed);
  }
  checker.report(
      exact, "sweep miss counts equal the reference simulator's everywhere",
      exact_note);

  // The direct-mapped column piggybacked on a wider forest must not depend
  // on which forest carried it.
  {
    dew::SweepSpec wide;
    wide.set_exponents = sweep.set_exponents;
    wide.block_exponents = sweep.block_exponents;
    wide.assoc_exponents = {1, 2, 3};  // 2-, 4-, 8-way forests
    bool consistent = true;
    std::string note;
    for (std::size_t t = 0; t < 20 && consistent; ++t) {
      const dew::SweepOutcome outcome = dew::run_sweep(traces[t], wide);
      for (std::size_t i = 0; i < outcome.plans.size() && consistent; ++i) {
        const dew::PlanOutcome& lhs = outcome.plans[i];
        for (std::size_t j = i + 1; j < outcome.plans.size(); ++j) {
          const dew::PlanOutcome& rhs = outcome.plans[j];
          if (lhs.plan.block_bytes != rhs.plan.block_bytes) continue;
          for (std::size_t level = 0; level < lhs.levels.size(); ++level) {
            if (lhs.levels[level].misses_dm == rhs.levels[level].misses_dm) {
              continue;
            }
            consistent = false;
            note = "trace " + std::to_string(t) + " B=" +
                   std::to_string(lhs.plan.block_bytes) + " S=2^" +
                   std::to_string(level) + ": " +
                   std::to_string(lhs.plan.assoc) + "-way forest says " +
                   std::to_string(lhs.levels[level].misses_dm) + ", " +
                   std::to_string(rhs.plan.assoc) + "-way says " +
                   std::to_string(rhs.levels[level].misses_dm);
            break;
          }
        }
      }
    }
    checker.report(consistent,
                   "direct-mapped counts agree across 2-, 4-, and 8-way forests",
                   note.empty() ? "20 traces, 3 block sizes" : note);
  }

  // Adding a way to a one-set FIFO cache makes this sequence miss more.
  {
    const std::vector<dew::MemoryAccess> trace = anomaly_trace();
    const std::uint64_t three_way =
        dew::oracle_simulate({1, 3, 256}, trace).misses;
    const std::uint64_t four_way =
        dew::oracle_simulate({1, 4, 256}, trace).misses;
    dew::SweepSpec one_set;
    one_set.set_exponents = {0};
    one_set.block_exponents = {8};
    one_set.assoc_exponents = {2};
    const std::vector<dew::ConfigMisses> dew_misses =
        dew::dew_config_misses(dew::run_sweep(trace, one_set));
    const bool pass = three_way == 9 && four_way == 10 &&
                      dew_misses.size() == 1 && dew_misses[0].misses == 10;
    checker.report(pass, "the FIFO anomaly sequence replays exactly",
                   "3-way reference " + std::to_string(three_way) +
                       ", 4-way reference " + std::to_string(four_way) +
                       ", 4-way simulated " +
                       std::to_string(dew_misses.at(0).misses));
  }

  // The widest advertised sweep: 15 set sizes x 7 block sizes x 5 way counts.
  {
    dew::SweepSpec full;
    full.set_exponents = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
    full.block_exponents = {0, 1, 2, 3, 4, 5, 6};
    full.assoc_exponents = {0, 1, 2, 3, 4};
    const std::size_t count = dew::enumerate_configs(full).size();
    checker.report(count == 525,
                   "the full dimension sweep enumerates 525 configurations",
                   std::to_string(count) + " configurations");
  }

  checker.report(shadow_clean,
                 "shadow checking holds on every access of every trace",
                 shadow_clean ? std::to_string(traces.size()) +
                                    " traces through the full sweep"
                              : shadow_note);

  // The shortcuts only skip work. Toggling them off, alone or together, must
  // reproduce identical result rows, and with everything off the engine must
  // evaluate every node on every access.
  {
    dew::SweepSpec small;
    small.set_exponents = {0, 1, 2, 3, 4, 5, 6, 7, 8};
    small.block_exponents = {2, 4};
    small.assoc_exponents = {0, 1, 2};
    bool neutral = true;
    std::string note;
    for (std::size_t t = 0; t < 4 && neutral; ++t) {
      const std::vector<dew::MemoryAccess>& trace = traces[t];
      const std::vector<dew::ResultRow> baseline =
          dew::result_rows(dew::run_sweep(trace, small));
      const dew::EngineOptions variants[] = {
          {.use_mra_stop = false},
          {.use_wave = false},
          {.use_mre = false},
          {.use_mra_stop = false, .use_wave = false, .use_mre = false},
      };
      for (const dew::EngineOptions& options : variants) {
        const dew::SweepOutcome outcome = dew::run_sweep(trace, small, options);
        if (dew::result_rows(outcome) != baseline) {
          neutral = false;
          note = "trace " + std::to_string(t) + ": miss counts changed";
          break;
        }
        const bool all_off =
            !options.use_mra_stop && !options.use_wave && !options.use_mre;
        if (!all_off) continue;
        for (const dew::PlanOutcome& plan_outcome : outcome.plans) {
          const std::uint64_t expected =
              plan_outcome.accesses * (plan_outcome.plan.top_set_exponent + 1);
          if (plan_outcome.counters.node_evals == expected &&
              plan_outcome.counters.unoptimized_evals == expected) {
            continue;
          }
          neutral = false;
          note = "trace " + std::to_string(t) + ": expected " +
                 std::to_string(expected) + " node evaluations, got " +
                 std::to_string(plan_outcome.counters.node_evals);
          break;
        }
      }
    }
    checker.report(neutral,
                   "search shortcuts never change a miss count and, disabled, "
                   "the engine touches every node",
                   note.empty() ? "4 traces, 4 option variants" : note);
  }

  // A loop-heavy million-access trace over fifteen set sizes: the one-pass
  // engine must do at most half the tag comparisons of the per-configuration
  // baseline, in less wall time. A tight four-block loop keeps the hot path
  // resident near the root, where the most-recently-accessed tag terminates
  // the walk after a couple of levels.
  {
    dew::TraceSpec spec;
    spec.length = 1000000;
    spec.address_bits = 16;
    spec.loop_fraction = 0.9;
    spec.loop_body = 4;
    spec.stride = 4;
    spec.seed = 2024;
    const std::vector<dew::MemoryAccess> trace = dew::generate_trace(spec);
    dew::SweepSpec fifteen;
    fifteen.set_exponents = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
    fifteen.block_exponents = {2};
    fifteen.assoc_exponents = {0, 2};
    const dew::CompareOutcome compare = dew::compare_run(trace, fifteen);
    char ratio[32];
    std::snprintf(ratio, sizeof(ratio), "%.3f", compare.comparison_ratio());
    const bool pass = compare.check.pass() &&
                      compare.comparison_ratio() <= 0.5 &&
                      compare.dew_seconds < compare.oracle_seconds;
    checker.report(pass,
                   "one pass does at most half the baseline's comparisons, "
                   "faster",
                   "comparison ratio " + std::string(ratio) + ", " +
                       seconds(compare.dew_seconds) + " vs " +
                       seconds(compare.oracle_seconds));
  }

  return checker.failures;
}
