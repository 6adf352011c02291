#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dew/config.hpp"
#include "dew/driver.hpp"
#include "dew/errors.hpp"
#include "dew/report.hpp"
#include "dew/trace_io.hpp"

namespace dew {

// Everything a simulate/verify run needs, resolved from flags. Empty paths
// mean stdout for results and "off" for instrumentation.
struct RunManifest {
  std::string trace_path;
  TraceFormat trace_format = TraceFormat::Din;
  SweepSpec sweep;
  std::string results_path;
  std::string instrument_path;
  ReportFormat report_format = ReportFormat::Csv;
  bool shadow_check = false;
  bool verify = false;
  Policy policy = Policy::Fifo;
};

namespace detail {

inline TraceFormat parse_trace_format(const std::string& text,
                                      const std::string& flag) {
  if (text == "din") return TraceFormat::Din;
  if (text == "raw_hex") return TraceFormat::RawHex;
  throw UsageError(flag + ": expected din or raw_hex, got \"" + text + "\"");
}

inline ReportFormat parse_report_format(const std::string& text,
                                        const std::string& flag) {
  if (text == "csv") return ReportFormat::Csv;
  if (text == "json") return ReportFormat::Json;
  throw UsageError(flag + ": expected csv or json, got \"" + text + "\"");
}

inline Policy parse_policy(const std::string& text, const std::string& flag) {
  if (text == "fifo") return Policy::Fifo;
  if (text == "lru") return Policy::Lru;
  throw UsageError(flag + ": expected fifo or lru, got \"" + text + "\"");
}

inline std::vector<MemoryAccess> load_trace(const std::string& path,
                                            TraceFormat format) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open trace file \"" + path + "\"");
  try {
    return parse_trace(in, format);
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

// Flags override the config file; everything must be pinned down by one or
// the other.
inline SweepSpec build_sweep(const std::string& config_path,
                             const std::string& sets,
                             const std::string& blocks,
                             const std::string& assocs) {
  SweepSpec sweep;
  bool from_file = false;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      throw UsageError("cannot open sweep config \"" + config_path + "\"");
    }
    try {
      sweep = parse_sweep_file(in);
    } catch (const ParseError& e) {
      throw UsageError(config_path + ": " + e.what());
    }
    from_file = true;
  }
  if (!sets.empty()) {
    sweep.set_exponents = parse_exponent_spec(sets, "--sets");
  } else if (!from_file) {
    throw UsageError("--sets is required unless --config is given");
  }
  if (!blocks.empty()) {
    sweep.block_exponents = parse_exponent_spec(blocks, "--blocks");
  } else if (!from_file) {
    throw UsageError("--blocks is required unless --config is given");
  }
  if (!assocs.empty()) {
    sweep.assoc_exponents = parse_exponent_spec(assocs, "--assocs");
  } else if (!from_file) {
    throw UsageError("--assocs is required unless --config is given");
  }
  validate_sweep(sweep);
  return sweep;
}

template <typename Fn>
void write_output(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open output file \"" + path + "\"");
  fn(out);
  out.flush();
  if (!out) throw UsageError("failed writing output file \"" + path + "\"");
}

inline std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
  return buf;
}

inline std::string format_seconds(double seconds) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f s", seconds);
  return buf;
}

}  // namespace detail

// Runs simulate (and optionally the per-configuration reference check).
// Returns 0 on success / full match, 1 on a verification mismatch.
inline int execute_manifest(const RunManifest& manifest,
                            std::ostream& out = std::cout,
                            std::ostream& err = std::cerr) {
  const std::vector<MemoryAccess> trace =
      detail::load_trace(manifest.trace_path, manifest.trace_format);
  EngineOptions options;
  options.shadow_check = manifest.shadow_check;

  const SweepOutcome outcome = run_sweep(trace, manifest.sweep, options);
  const std::vector<ResultRow> rows = result_rows(outcome);

  // In verify mode the results file is optional; stdout stays reserved for
  // the verdict.
  if (!manifest.verify || !manifest.results_path.empty()) {
    detail::write_output(manifest.results_path, out, [&](std::ostream& o) {
      emit_results(o, rows, manifest.report_format);
    });
  }
  if (!manifest.instrument_path.empty()) {
    detail::write_output(manifest.instrument_path, out, [&](std::ostream& o) {
      emit_instrumentation(o, instrumentation_rows(outcome),
                           manifest.report_format);
    });
  }
  if (!manifest.verify) return 0;

  const std::vector<ConfigMisses> reference =
      oracle_config_misses(trace, manifest.sweep, manifest.policy);
  const CrossCheckReport check = cross_check(dew_config_misses(outcome),
                                             reference);
  if (!check.pass()) {
    for (const CrossCheckEntry& entry : check.mismatches) {
      err << describe(entry.config) << ": simulated=" << entry.lhs_misses
          << " reference=" << entry.rhs_misses << '\n';
    }
    err << "error: " << check.mismatches.size() << " of " << check.compared
        << " configurations mismatch\n";
    return 1;
  }
  out << "all " << check.compared << " configurations match the "
      << (manifest.policy == Policy::Fifo ? "fifo" : "lru")
      << " reference\n";
  return 0;
}

inline int execute_compare(const std::string& trace_path,
                           TraceFormat trace_format, const SweepSpec& sweep,
                           std::ostream& out = std::cout,
                           std::ostream& err = std::cerr) {
  const std::vector<MemoryAccess> trace =
      detail::load_trace(trace_path, trace_format);
  const CompareOutcome outcome = compare_run(trace, sweep);
  out << "configurations:         " << outcome.check.compared << '\n'
      << "accesses:               " << trace.size() << '\n'
      << "dew tag comparisons:    " << outcome.dew_tag_comparisons << '\n'
      << "oracle tag comparisons: " << outcome.oracle_tag_comparisons << '\n'
      << "reduction:              "
      << detail::format_percent(1.0 - outcome.comparison_ratio()) << '\n'
      << "dew wall time:          "
      << detail::format_seconds(outcome.dew_seconds) << '\n'
      << "oracle wall time:       "
      << detail::format_seconds(outcome.oracle_seconds) << '\n'
      << "speedup:                ";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2fx",
                outcome.dew_seconds > 0.0
                    ? outcome.oracle_seconds / outcome.dew_seconds
                    : 0.0);
  out << buf << '\n';
  if (!outcome.check.pass()) {
    for (const CrossCheckEntry& entry : outcome.check.mismatches) {
      err << describe(entry.config) << ": simulated=" << entry.lhs_misses
          << " reference=" << entry.rhs_misses << '\n';
    }
    err << "error: " << outcome.check.mismatches.size() << " of "
        << outcome.check.compared << " configurations mismatch\n";
    return 1;
  }
  return 0;
}

inline int execute_gen_trace(const TraceSpec& spec, const std::string& path,
                             TraceFormat format,
                             std::ostream& out = std::cout) {
  const std::vector<MemoryAccess> trace = generate_trace(spec);
  detail::write_output(path, out, [&](std::ostream& o) {
    write_trace(o, trace, format);
  });
  return 0;
}

// Full command-line entry point; args excludes the program name. Exit codes:
// 0 success / full match, 1 verification mismatch or shadow-check failure,
// 2 usage or parse error.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"single-pass multi-configuration cache simulator"};
  app.require_subcommand(1);

  std::string trace_path;
  std::string trace_format_text = "din";
  std::string config_path;
  std::string sets_text;
  std::string blocks_text;
  std::string assocs_text;
  std::string results_path;
  std::string instrument_path;
  std::string report_format_text = "csv";
  std::string policy_text = "fifo";
  bool shadow_check = false;

  const auto add_sweep_flags = [&](CLI::App* cmd) {
    cmd->add_option("--trace", trace_path, "trace file to simulate")
        ->required();
    cmd->add_option("--format", trace_format_text,
                    "trace format: din or raw_hex");
    cmd->add_option("--config", config_path,
                    "sweep config file (key=value: sets, blocks, assocs)");
    cmd->add_option("--sets", sets_text,
                    "set counts, e.g. 2^0..2^10 or 1,4,16");
    cmd->add_option("--blocks", blocks_text,
                    "block sizes in bytes, e.g. 2^2..2^6 or 4,16,64");
    cmd->add_option("--assocs", assocs_text,
                    "associativities, e.g. 2^0..2^4 or 1,2,4");
  };

  CLI::App* simulate = app.add_subcommand(
      "simulate", "run every swept configuration in one trace pass");
  add_sweep_flags(simulate);
  simulate->add_option("--out", results_path,
                       "results file (default: stdout)");
  simulate->add_option("--instrument", instrument_path,
                       "also write per-forest work counters");
  simulate->add_option("--report-format", report_format_text,
                       "results format: csv or json");
  simulate->add_flag("--shadow-check", shadow_check,
                     "revalidate every shortcut against a reference model");

  CLI::App* verify = app.add_subcommand(
      "verify", "simulate, then cross-check every configuration against the "
                "brute-force reference");
  add_sweep_flags(verify);
  verify->add_option("--out", results_path, "optional results file");
  verify->add_option("--instrument", instrument_path,
                     "also write per-forest work counters");
  verify->add_option("--report-format", report_format_text,
                     "results format: csv or json");
  verify->add_flag("--shadow-check", shadow_check,
                   "revalidate every shortcut against a reference model");
  verify->add_option("--policy", policy_text,
                     "reference replacement policy: fifo or lru");

  CLI::App* compare = app.add_subcommand(
      "compare", "report tag-comparison and wall-time totals for the "
                 "single-pass run versus per-configuration reference runs");
  add_sweep_flags(compare);

  TraceSpec trace_spec;
  std::string gen_out_path;
  std::string gen_format_text = "din";
  CLI::App* gen = app.add_subcommand("gen-trace",
                                     "generate a synthetic trace");
  gen->add_option("--length", trace_spec.length, "number of accesses")
      ->required();
  gen->add_option("--address-bits", trace_spec.address_bits,
                  "address space width in bits (1..63)");
  gen->add_option("--loop-fraction", trace_spec.loop_fraction,
                  "fraction of accesses drawn from the loop body");
  gen->add_option("--loop-body", trace_spec.loop_body,
                  "distinct addresses in the loop body");
  gen->add_option("--stride", trace_spec.stride,
                  "byte stride between loop addresses");
  gen->add_option("--seed", trace_spec.seed, "generator seed");
  gen->add_option("--out", gen_out_path, "trace file (default: stdout)");
  gen->add_option("--format", gen_format_text,
                  "trace format: din or raw_hex");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (gen->parsed()) {
      validate_spec(trace_spec);
      return execute_gen_trace(
          trace_spec, gen_out_path,
          detail::parse_trace_format(gen_format_text, "--format"), out);
    }
    const TraceFormat trace_format =
        detail::parse_trace_format(trace_format_text, "--format");
    const SweepSpec sweep = detail::build_sweep(config_path, sets_text,
                                                blocks_text, assocs_text);
    if (compare->parsed()) {
      return execute_compare(trace_path, trace_format, sweep, out, err);
    }
    RunManifest manifest;
    manifest.trace_path = trace_path;
    manifest.trace_format = trace_format;
    manifest.sweep = sweep;
    manifest.results_path = results_path;
    manifest.instrument_path = instrument_path;
    manifest.report_format =
        detail::parse_report_format(report_format_text, "--report-format");
    manifest.shadow_check = shadow_check;
    manifest.verify = verify->parsed();
    manifest.policy = detail::parse_policy(policy_text, "--policy");
    return execute_manifest(manifest, out, err);
  } catch (const ShadowViolation& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace dew
