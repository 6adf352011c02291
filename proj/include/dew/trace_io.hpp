#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dew/errors.hpp"

namespace dew {

// Addresses are byte addresses up to 63 bits wide. The top bit is reserved
// so that the all-ones word can serve as an EMPTY sentinel elsewhere without
// ever colliding with a trace-derivable value.
inline constexpr unsigned kMaxAddressBits = 63;
inline constexpr std::uint64_t kMaxAddress =
    (std::uint64_t{1} << kMaxAddressBits) - 1;

enum class AccessKind : std::uint8_t { Read = 0, Write = 1, Ifetch = 2 };

struct MemoryAccess {
  std::uint64_t address = 0;
  AccessKind kind = AccessKind::Read;

  bool operator==(const MemoryAccess&) const = default;
};

enum class TraceFormat { Din, RawHex };

// Block address: floor(address / block_bytes). All hit/miss logic downstream
// operates on block addresses.
inline std::uint64_t block_address(std::uint64_t address,
                                   std::uint64_t block_bytes) {
  if (block_bytes == 0 || !std::has_single_bit(block_bytes)) {
    throw ConfigError("block size must be a power of two, got " +
                      std::to_string(block_bytes));
  }
  return address >> std::countr_zero(block_bytes);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::uint64_t parse_hex_address(std::string_view token,
                                       std::size_t line_no,
                                       std::string_view line) {
  std::string_view digits = token;
  if (digits.size() >= 2 && digits[0] == '0' &&
      (digits[1] == 'x' || digits[1] == 'X')) {
    digits.remove_prefix(2);
  }
  std::uint64_t value = 0;
  if (digits.empty()) {
    throw ParseError(line_no, "empty address in \"" + std::string(line) + "\"");
  }
  auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), value, 16);
  if (ec == std::errc::result_out_of_range) {
    throw RangeError("line " + std::to_string(line_no) + ": address \"" +
                     std::string(token) + "\" exceeds the supported " +
                     std::to_string(kMaxAddressBits) + "-bit width");
  }
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
    throw ParseError(line_no, "malformed address \"" + std::string(token) +
                                  "\" in \"" + std::string(line) + "\"");
  }
  if (value > kMaxAddress) {
    throw RangeError("line " + std::to_string(line_no) + ": address \"" +
                     std::string(token) + "\" exceeds the supported " +
                     std::to_string(kMaxAddressBits) + "-bit width");
  }
  return value;
}

}  // namespace detail

// Parse a newline-delimited trace.
//
// din lines are "<label> <hex-address>" with label 0=read, 1=write, 2=ifetch;
// raw_hex lines are a single hexadecimal address each and parse as reads.
// Blank lines and lines starting with '#' are skipped in both formats.
// Addresses are accepted with or without a 0x prefix.
inline std::vector<MemoryAccess> parse_trace(std::istream& in,
                                             TraceFormat format) {
  std::vector<MemoryAccess> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (format == TraceFormat::RawHex) {
      if (line.find_first_of(" \t") != std::string_view::npos) {
        throw ParseError(line_no,
                         "expected a single address, got \"" + raw + "\"");
      }
      out.push_back({detail::parse_hex_address(line, line_no, line),
                     AccessKind::Read});
      continue;
    }

    auto space = line.find_first_of(" \t");
    if (space == std::string_view::npos) {
      throw ParseError(line_no, "expected \"<label> <hex-address>\", got \"" +
                                    raw + "\"");
    }
    std::string_view label = line.substr(0, space);
    std::string_view rest = detail::trim(line.substr(space + 1));
    if (rest.empty() || rest.find_first_of(" \t") != std::string_view::npos) {
      throw ParseError(line_no, "expected \"<label> <hex-address>\", got \"" +
                                    raw + "\"");
    }
    AccessKind kind;
    if (label == "0") {
      kind = AccessKind::Read;
    } else if (label == "1") {
      kind = AccessKind::Write;
    } else if (label == "2") {
      kind = AccessKind::Ifetch;
    } else {
      throw ParseError(line_no, "access label \"" + std::string(label) +
                                    "\" is outside {0,1,2}");
    }
    out.push_back({detail::parse_hex_address(rest, line_no, line), kind});
  }
  return out;
}

// Serialize a trace. Parsing the result yields a record-equivalent trace.
inline void write_trace(std::ostream& out, std::span<const MemoryAccess> trace,
                        TraceFormat format) {
  char buf[32];
  for (const MemoryAccess& a : trace) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), a.address, 16);
    std::string_view hex(buf, static_cast<std::size_t>(ptr - buf));
    if (format == TraceFormat::Din) {
      out << static_cast<unsigned>(a.kind) << ' ' << hex << '\n';
    } else {
      out << hex << '\n';
    }
  }
}

// Synthetic workload description: a fraction of accesses cycles through one
// strided loop body, the rest are uniform over the address space. Generation
// is a pure function of the spec; the same spec always yields the same trace.
struct TraceSpec {
  std::uint64_t length = 0;
  unsigned address_bits = 32;
  double loop_fraction = 0.0;
  std::uint64_t loop_body = 1;  // distinct addresses per loop
  std::uint64_t stride = 4;     // byte stride within the loop
  std::uint64_t seed = 0;
};

inline void validate_spec(const TraceSpec& spec) {
  if (!(spec.loop_fraction >= 0.0 && spec.loop_fraction <= 1.0)) {
    throw ConfigError("loop_fraction must lie in [0,1], got " +
                      std::to_string(spec.loop_fraction));
  }
  if (spec.address_bits == 0 || spec.address_bits > kMaxAddressBits) {
    throw ConfigError("address_bits must lie in [1," +
                      std::to_string(kMaxAddressBits) + "], got " +
                      std::to_string(spec.address_bits));
  }
  if (spec.loop_body == 0) throw ConfigError("loop_body must be at least 1");
  if (spec.stride == 0) throw ConfigError("stride must be at least 1");
  // Keeps the loop-body addresses distinct after masking to the space.
  if (spec.address_bits < 64 &&
      spec.loop_body > (std::uint64_t{1} << spec.address_bits) / spec.stride) {
    throw ConfigError("loop_body * stride exceeds the address space");
  }
}

inline std::vector<MemoryAccess> generate_trace(const TraceSpec& spec) {
  validate_spec(spec);
  std::vector<MemoryAccess> out;
  out.reserve(spec.length);

  std::mt19937_64 rng(spec.seed);
  const std::uint64_t mask = (std::uint64_t{1} << spec.address_bits) - 1;
  const std::uint64_t base = rng() & mask;
  std::uint64_t loop_pos = 0;

  for (std::uint64_t i = 0; i < spec.length; ++i) {
    // mt19937_64 output is pinned by the standard; the unit mapping below
    // keeps generation bit-reproducible across platforms.
    const std::uint64_t draw = rng();
    bool in_loop;
    if (spec.loop_fraction >= 1.0) {
      in_loop = true;
    } else if (spec.loop_fraction <= 0.0) {
      in_loop = false;
    } else {
      const double unit = static_cast<double>(draw >> 11) * 0x1.0p-53;
      in_loop = unit < spec.loop_fraction;
    }
    std::uint64_t addr;
    if (in_loop) {
      addr = (base + loop_pos * spec.stride) & mask;
      loop_pos = (loop_pos + 1) % spec.loop_body;
    } else {
      addr = rng() & mask;
    }
    out.push_back({addr, AccessKind::Read});
  }
  return out;
}

}  // namespace dew
