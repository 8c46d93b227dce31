#pragma once

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace romnls {

// 17 significant digits round-trips every double.
inline std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

struct KeyValueLine {
  std::string key;
  std::string value;
  int line = 0;
};

// "key = value" lines; '#' starts a comment, blank lines are skipped.
// Throws std::invalid_argument naming the offending line.
std::vector<KeyValueLine> parse_key_values(std::string_view text);

double parse_real(std::string_view text, std::string_view what);

}  // namespace romnls
