#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "dew/errors.hpp"

namespace dew {

// One (S, A, B) point. Total capacity T = S * A * B is always recomputed,
// never stored.
struct CacheConfig {
  std::uint64_t sets = 1;
  std::uint64_t assoc = 1;
  std::uint64_t block_bytes = 1;

  std::uint64_t total_bytes() const { return sets * assoc * block_bytes; }

  bool operator==(const CacheConfig&) const = default;
};

// (B, A, S) ordering, the order sweeps are enumerated and results emitted in.
inline bool config_less(const CacheConfig& a, const CacheConfig& b) {
  return std::tie(a.block_bytes, a.assoc, a.sets) <
         std::tie(b.block_bytes, b.assoc, b.sets);
}

inline std::string describe(const CacheConfig& c) {
  return "B=" + std::to_string(c.block_bytes) + " A=" +
         std::to_string(c.assoc) + " S=" + std::to_string(c.sets);
}

// Geometry used by sweeps and the tree simulator: every dimension a power of
// two. The brute-force reference model does not require this (it can run any
// positive set count or way count), so validation lives here rather than in
// the struct.
inline void validate_config(const CacheConfig& c) {
  auto check = [](std::uint64_t v, const char* name) {
    if (v == 0 || !std::has_single_bit(v)) {
      throw ConfigError(std::string(name) + " must be a power of two >= 1, got " +
                        std::to_string(v));
    }
  };
  check(c.sets, "sets");
  check(c.assoc, "assoc");
  check(c.block_bytes, "block size");
}

// A power-of-two sweep over the three cache dimensions. Each dimension is a
// sorted list of exponents, covering both "2^lo..2^hi" ranges and explicit
// comma lists such as blocks {4,16,64}.
struct SweepSpec {
  std::vector<unsigned> set_exponents;
  std::vector<unsigned> block_exponents;
  std::vector<unsigned> assoc_exponents;
};

inline void validate_sweep(const SweepSpec& sweep) {
  auto check = [](const std::vector<unsigned>& exps, const char* name) {
    if (exps.empty()) {
      throw ConfigError(std::string(name) + ": empty exponent list");
    }
    if (!std::is_sorted(exps.begin(), exps.end()) ||
        std::adjacent_find(exps.begin(), exps.end()) != exps.end()) {
      throw ConfigError(std::string(name) +
                        ": exponents must be sorted and distinct");
    }
    if (exps.back() >= 62) {
      throw ConfigError(std::string(name) + ": exponent " +
                        std::to_string(exps.back()) + " is too large");
    }
  };
  check(sweep.set_exponents, "sets");
  check(sweep.block_exponents, "blocks");
  check(sweep.assoc_exponents, "assocs");
}

// Parse one sweep dimension: either an inclusive exponent range "2^lo..2^hi"
// or a comma list of powers of two ("4,16,64"). `what` names the flag or key
// in diagnostics.
inline std::vector<unsigned> parse_exponent_spec(std::string_view text,
                                                 std::string_view what) {
  auto fail = [&](const std::string& msg) -> void {
    throw ConfigError(std::string(what) + ": " + msg);
  };
  std::vector<unsigned> exps;

  auto parse_uint = [&](std::string_view tok) -> std::uint64_t {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      fail("cannot parse \"" + std::string(tok) + "\" as a number");
    }
    return v;
  };

  if (text.starts_with("2^")) {
    auto dots = text.find("..");
    if (dots == std::string_view::npos) {
      // A bare "2^k" is a singleton range.
      std::uint64_t e = parse_uint(text.substr(2));
      exps.push_back(static_cast<unsigned>(e));
    } else {
      std::string_view hi = text.substr(dots + 2);
      if (!hi.starts_with("2^")) {
        fail("range must look like 2^lo..2^hi, got \"" + std::string(text) +
             "\"");
      }
      std::uint64_t lo = parse_uint(text.substr(2, dots - 2));
      std::uint64_t hi_e = parse_uint(hi.substr(2));
      if (hi_e < lo) fail("range upper bound is below the lower bound");
      if (hi_e >= 62) fail("exponent " + std::to_string(hi_e) + " is too large");
      for (std::uint64_t e = lo; e <= hi_e; ++e) {
        exps.push_back(static_cast<unsigned>(e));
      }
    }
  } else {
    std::string_view rest = text;
    while (true) {
      auto comma = rest.find(',');
      std::string_view tok = rest.substr(0, comma);
      std::uint64_t v = parse_uint(tok);
      if (v == 0 || !std::has_single_bit(v)) {
        fail(std::string(tok) + " is not a power of two");
      }
      exps.push_back(static_cast<unsigned>(std::countr_zero(v)));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    std::sort(exps.begin(), exps.end());
    exps.erase(std::unique(exps.begin(), exps.end()), exps.end());
  }
  if (exps.empty()) fail("empty exponent list");
  if (exps.back() >= 62) {
    fail("exponent " + std::to_string(exps.back()) + " is too large");
  }
  return exps;
}

// Plain key=value sweep file: keys sets, blocks, assocs; '#' comments and
// blank lines ignored. Values use the same syntax as the CLI flags.
inline SweepSpec parse_sweep_file(std::istream& in) {
  SweepSpec sweep;
  bool have_sets = false, have_blocks = false, have_assocs = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) {
      line.remove_prefix(1);
    }
    while (!line.empty() &&
           (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
      line.remove_suffix(1);
    }
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(line_no, "expected key=value, got \"" + raw + "\"");
    }
    std::string_view key = line.substr(0, eq);
    std::string_view value = line.substr(eq + 1);
    if (key == "sets") {
      sweep.set_exponents = parse_exponent_spec(value, "sets");
      have_sets = true;
    } else if (key == "blocks") {
      sweep.block_exponents = parse_exponent_spec(value, "blocks");
      have_blocks = true;
    } else if (key == "assocs") {
      sweep.assoc_exponents = parse_exponent_spec(value, "assocs");
      have_assocs = true;
    } else {
      throw ParseError(line_no, "unknown key \"" + std::string(key) + "\"");
    }
  }
  if (!have_sets || !have_blocks || !have_assocs) {
    throw ConfigError("sweep file must define sets, blocks and assocs");
  }
  return sweep;
}

// Cross product of the three exponent lists in (B, A, S) lexicographic order.
inline std::vector<CacheConfig> enumerate_configs(const SweepSpec& sweep) {
  validate_sweep(sweep);
  std::vector<CacheConfig> out;
  out.reserve(sweep.block_exponents.size() * sweep.assoc_exponents.size() *
              sweep.set_exponents.size());
  for (unsigned b : sweep.block_exponents) {
    for (unsigned a : sweep.assoc_exponents) {
      for (unsigned s : sweep.set_exponents) {
        out.push_back({std::uint64_t{1} << s, std::uint64_t{1} << a,
                       std::uint64_t{1} << b});
      }
    }
  }
  return out;
}

// The forest a sweep point group (B, A) is simulated on. A forest is always
// a single tree rooted at the one-set level, so it simulates every set size
// 2^0..2^top even when the sweep requests only a subset; reported_sets is
// the subset the sweep asked for.
//
// FIFO contents for A ways are not derivable from A'-way contents (no
// inclusion under FIFO), so each associativity above 1 gets its own forest.
// Direct-mapped results fall out of every forest; amongst the plans of one
// block size exactly one (the smallest associativity above 1) is designated
// to report them.
struct ForestPlan {
  std::uint64_t block_bytes = 1;
  std::uint64_t assoc = 1;
  unsigned top_set_exponent = 0;
  std::vector<std::uint64_t> reported_sets;
  bool include_direct_mapped = false;  // forest tracks A=1 results (A > 1)
  bool report_direct_mapped = false;   // this plan emits the A=1 rows

  // Simulated set sizes 2^0, 2^1, ..., 2^top: strictly doubling, one tree.
  std::vector<std::uint64_t> levels() const {
    std::vector<std::uint64_t> out(top_set_exponent + 1);
    for (unsigned l = 0; l <= top_set_exponent; ++l) {
      out[l] = std::uint64_t{1} << l;
    }
    return out;
  }
};

inline void validate_plan(const ForestPlan& plan) {
  validate_config({1, plan.assoc, plan.block_bytes});
  if (plan.reported_sets.empty()) {
    throw ConfigError("forest plan reports no set sizes");
  }
  for (std::uint64_t s : plan.reported_sets) {
    if (!std::has_single_bit(s) ||
        std::countr_zero(s) > plan.top_set_exponent) {
      throw ConfigError("reported set size " + std::to_string(s) +
                        " is outside the simulated levels");
    }
  }
  if (plan.assoc > 1 && !plan.include_direct_mapped) {
    throw ConfigError("plans with associativity above 1 always carry the "
                      "direct-mapped results");
  }
}

// One plan per (B, A>1) pair, each covering all requested set sizes. When the
// sweep contains A=1, the smallest A>1 plan of each block size reports the
// direct-mapped rows; a sweep of only A=1 degenerates to plain A=1 plans.
// Together the plans report every enumerated configuration exactly once.
inline std::vector<ForestPlan> plan_forests(const SweepSpec& sweep) {
  validate_sweep(sweep);
  const unsigned top = sweep.set_exponents.back();
  std::vector<std::uint64_t> sets;
  sets.reserve(sweep.set_exponents.size());
  for (unsigned s : sweep.set_exponents) sets.push_back(std::uint64_t{1} << s);

  const bool has_dm = sweep.assoc_exponents.front() == 0;
  std::vector<unsigned> wide_assocs;
  for (unsigned a : sweep.assoc_exponents) {
    if (a > 0) wide_assocs.push_back(a);
  }

  std::vector<ForestPlan> plans;
  for (unsigned b : sweep.block_exponents) {
    if (wide_assocs.empty()) {
      ForestPlan plan;
      plan.block_bytes = std::uint64_t{1} << b;
      plan.assoc = 1;
      plan.top_set_exponent = top;
      plan.reported_sets = sets;
      plan.include_direct_mapped = false;
      plan.report_direct_mapped = false;
      plans.push_back(std::move(plan));
      continue;
    }
    for (std::size_t i = 0; i < wide_assocs.size(); ++i) {
      ForestPlan plan;
      plan.block_bytes = std::uint64_t{1} << b;
      plan.assoc = std::uint64_t{1} << wide_assocs[i];
      plan.top_set_exponent = top;
      plan.reported_sets = sets;
      plan.include_direct_mapped = true;
      plan.report_direct_mapped = has_dm && i == 0;
      plans.push_back(std::move(plan));
    }
  }
  return plans;
}

// Configurations a plan is responsible for in the final report.
inline std::vector<CacheConfig> reported_configs(const ForestPlan& plan) {
  std::vector<CacheConfig> out;
  for (std::uint64_t s : plan.reported_sets) {
    out.push_back({s, plan.assoc, plan.block_bytes});
  }
  if (plan.report_direct_mapped) {
    for (std::uint64_t s : plan.reported_sets) {
      out.push_back({s, 1, plan.block_bytes});
    }
  }
  return out;
}

}  // namespace dew
