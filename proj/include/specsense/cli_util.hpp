#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace specsense {
namespace cli {

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string::size_type start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

inline double parse_double(const std::string& text) {
  std::size_t used = 0;
  const double value = std::stod(text, &used);
  if (used != text.size())
    throw std::invalid_argument("not a number: '" + text + "'");
  return value;
}

inline long long parse_integer(const std::string& text) {
  std::size_t used = 0;
  const long long value = std::stoll(text, &used);
  if (used != text.size())
    throw std::invalid_argument("not an integer: '" + text + "'");
  return value;
}

inline std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  for (const auto& part : split(text, ',')) values.push_back(parse_double(part));
  return values;
}

inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  for (const auto& part : split(text, ',')) {
    const long long v = parse_integer(part);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
      throw std::invalid_argument("integer out of range: '" + part + "'");
    values.push_back(static_cast<int>(v));
  }
  return values;
}

/// Sweep range syntax: "lo:hi:logN" (N geometrically spaced points),
/// "lo:hi:linN" (N arithmetically spaced points), or a plain comma list.
/// Spaced points are rounded to integers; duplicates created by rounding
/// are dropped.
inline std::vector<int> parse_int_range(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_int_list(text);
  const auto parts = split(text, ':');
  if (parts.size() != 3)
    throw std::invalid_argument("range must be lo:hi:logN or lo:hi:linN: '" + text + "'");
  const long long lo = parse_integer(parts[0]);
  const long long hi = parse_integer(parts[1]);
  if (parts[2].size() < 4)
    throw std::invalid_argument("range needs a point count: '" + text + "'");
  const std::string mode = parts[2].substr(0, 3);
  if (mode != "log" && mode != "lin")
    throw std::invalid_argument("range spacing must be log or lin: '" + text + "'");
  const long long count = parse_integer(parts[2].substr(3));
  if (lo < 1 || hi < lo)
    throw std::invalid_argument("range needs 1 <= lo <= hi: '" + text + "'");
  if (count < 1 || count > 1000000)
    throw std::invalid_argument("range point count out of range: '" + text + "'");

  std::vector<int> values;
  for (long long i = 0; i < count; ++i) {
    const double frac = count == 1 ? 0.0
                                   : static_cast<double>(i) / static_cast<double>(count - 1);
    const double raw = mode == "log"
                           ? static_cast<double>(lo) *
                                 std::pow(static_cast<double>(hi) / static_cast<double>(lo), frac)
                           : static_cast<double>(lo) +
                                 (static_cast<double>(hi) - static_cast<double>(lo)) * frac;
    const long long v = std::llround(raw);
    if (v > std::numeric_limits<int>::max())
      throw std::invalid_argument("range value exceeds int: '" + text + "'");
    if (values.empty() || values.back() != static_cast<int>(v))
      values.push_back(static_cast<int>(v));
  }
  return values;
}

}  // namespace cli
}  // namespace specsense
