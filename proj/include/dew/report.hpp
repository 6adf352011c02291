#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "dew/config.hpp"
#include "dew/engine.hpp"
#include "dew/errors.hpp"

namespace dew {

enum class ReportFormat { Csv, Json };

// One simulated configuration's outcome. miss_rate is derived, never
// stored, so equality stays exact.
struct ResultRow {
  std::uint64_t block_bytes = 1;
  std::uint64_t assoc = 1;
  std::uint64_t sets = 1;
  std::uint64_t accesses = 0;
  std::uint64_t misses = 0;
  std::uint64_t hits = 0;

  double miss_rate() const {
    return accesses == 0 ? 0.0
                         : static_cast<double>(misses) /
                               static_cast<double>(accesses);
  }

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

// One forest's work counters; a forest is identified by block size and
// associativity and covers every set count at once.
struct InstrumentationRow {
  std::uint64_t block_bytes = 1;
  std::uint64_t assoc = 1;
  Instrumentation counters;

  friend bool operator==(const InstrumentationRow& a,
                         const InstrumentationRow& b) {
    return a.block_bytes == b.block_bytes && a.assoc == b.assoc &&
           a.counters.unoptimized_evals == b.counters.unoptimized_evals &&
           a.counters.node_evals == b.counters.node_evals &&
           a.counters.mra_count == b.counters.mra_count &&
           a.counters.searches == b.counters.searches &&
           a.counters.wave_count == b.counters.wave_count &&
           a.counters.mre_count == b.counters.mre_count &&
           a.counters.tag_comparisons == b.counters.tag_comparisons;
  }
};

inline CacheConfig row_config(const ResultRow& row) {
  return CacheConfig{row.sets, row.assoc, row.block_bytes};
}

inline constexpr std::string_view kResultsHeader =
    "block_bytes,assoc,sets,accesses,misses,hits,miss_rate";
inline constexpr std::string_view kInstrumentationHeader =
    "block_bytes,assoc,unoptimized_evals,node_evals,mra_count,searches,"
    "wave_count,mre_count,tag_comparisons";

namespace detail {

inline std::string format_rate(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", rate);
  return buf;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline std::uint64_t parse_csv_u64(const std::string& field,
                                   std::size_t line_no) {
  std::uint64_t value = 0;
  const char* first = field.data();
  const char* last = first + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value, 10);
  if (ec != std::errc{} || ptr != last || field.empty()) {
    throw ParseError(line_no, "expected an unsigned integer, got \"" + field +
                                  "\"");
  }
  return value;
}

inline double parse_csv_double(const std::string& field,
                               std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double value = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return value;
  } catch (const std::exception&) {
    throw ParseError(line_no, "expected a number, got \"" + field + "\"");
  }
}

inline void expect_header(std::istream& in, std::string_view want) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(1, "missing header line");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != want) {
    throw ParseError(1, "expected header \"" + std::string(want) +
                            "\", got \"" + line + "\"");
  }
}

}  // namespace detail

inline void sort_rows(std::vector<ResultRow>& rows) {
  std::sort(rows.begin(), rows.end(),
            [](const ResultRow& a, const ResultRow& b) {
              return std::tie(a.block_bytes, a.assoc, a.sets) <
                     std::tie(b.block_bytes, b.assoc, b.sets);
            });
}

inline void sort_rows(std::vector<InstrumentationRow>& rows) {
  std::sort(rows.begin(), rows.end(),
            [](const InstrumentationRow& a, const InstrumentationRow& b) {
              return std::tie(a.block_bytes, a.assoc) <
                     std::tie(b.block_bytes, b.assoc);
            });
}

inline void emit_results(std::ostream& out, std::vector<ResultRow> rows,
                         ReportFormat format) {
  sort_rows(rows);
  if (format == ReportFormat::Csv) {
    out << kResultsHeader << '\n';
    for (const ResultRow& row : rows) {
      out << row.block_bytes << ',' << row.assoc << ',' << row.sets << ','
          << row.accesses << ',' << row.misses << ',' << row.hits << ','
          << detail::format_rate(row.miss_rate()) << '\n';
    }
    return;
  }
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const ResultRow& row : rows) {
    doc.push_back({{"block_bytes", row.block_bytes},
                   {"assoc", row.assoc},
                   {"sets", row.sets},
                   {"accesses", row.accesses},
                   {"misses", row.misses},
                   {"hits", row.hits},
                   {"miss_rate", row.miss_rate()}});
  }
  out << doc.dump(2) << '\n';
}

inline void emit_instrumentation(std::ostream& out,
                                 std::vector<InstrumentationRow> rows,
                                 ReportFormat format) {
  sort_rows(rows);
  if (format == ReportFormat::Csv) {
    out << kInstrumentationHeader << '\n';
    for (const InstrumentationRow& row : rows) {
      const Instrumentation& c = row.counters;
      out << row.block_bytes << ',' << row.assoc << ','
          << c.unoptimized_evals << ',' << c.node_evals << ',' << c.mra_count
          << ',' << c.searches << ',' << c.wave_count << ',' << c.mre_count
          << ',' << c.tag_comparisons << '\n';
    }
    return;
  }
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const InstrumentationRow& row : rows) {
    const Instrumentation& c = row.counters;
    doc.push_back({{"block_bytes", row.block_bytes},
                   {"assoc", row.assoc},
                   {"unoptimized_evals", c.unoptimized_evals},
                   {"node_evals", c.node_evals},
                   {"mra_count", c.mra_count},
                   {"searches", c.searches},
                   {"wave_count", c.wave_count},
                   {"mre_count", c.mre_count},
                   {"tag_comparisons", c.tag_comparisons}});
  }
  out << doc.dump(2) << '\n';
}

// Reads back emit_results CSV output. The stored miss_rate column is
// checked for shape only; the returned rows re-derive it exactly.
inline std::vector<ResultRow> parse_results_csv(std::istream& in) {
  detail::expect_header(in, kResultsHeader);
  std::vector<ResultRow> rows;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = detail::split_csv(line);
    if (fields.size() != 7) {
      throw ParseError(line_no, "expected 7 fields, got " +
                                    std::to_string(fields.size()));
    }
    ResultRow row;
    row.block_bytes = detail::parse_csv_u64(fields[0], line_no);
    row.assoc = detail::parse_csv_u64(fields[1], line_no);
    row.sets = detail::parse_csv_u64(fields[2], line_no);
    row.accesses = detail::parse_csv_u64(fields[3], line_no);
    row.misses = detail::parse_csv_u64(fields[4], line_no);
    row.hits = detail::parse_csv_u64(fields[5], line_no);
    detail::parse_csv_double(fields[6], line_no);
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<InstrumentationRow> parse_instrumentation_csv(
    std::istream& in) {
  detail::expect_header(in, kInstrumentationHeader);
  std::vector<InstrumentationRow> rows;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = detail::split_csv(line);
    if (fields.size() != 9) {
      throw ParseError(line_no, "expected 9 fields, got " +
                                    std::to_string(fields.size()));
    }
    InstrumentationRow row;
    row.block_bytes = detail::parse_csv_u64(fields[0], line_no);
    row.assoc = detail::parse_csv_u64(fields[1], line_no);
    row.counters.unoptimized_evals = detail::parse_csv_u64(fields[2], line_no);
    row.counters.node_evals = detail::parse_csv_u64(fields[3], line_no);
    row.counters.mra_count = detail::parse_csv_u64(fields[4], line_no);
    row.counters.searches = detail::parse_csv_u64(fields[5], line_no);
    row.counters.wave_count = detail::parse_csv_u64(fields[6], line_no);
    row.counters.mre_count = detail::parse_csv_u64(fields[7], line_no);
    row.counters.tag_comparisons = detail::parse_csv_u64(fields[8], line_no);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dew
