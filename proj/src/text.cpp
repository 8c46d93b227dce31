#include "romnls/text.hpp"

#include <charconv>
#include <stdexcept>

namespace romnls {

std::vector<KeyValueLine> parse_key_values(std::string_view text) {
  std::vector<KeyValueLine> out;
  int line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": empty key");
    }
    out.push_back({std::string(key), std::string(value), line_no});
  }
  return out;
}

double parse_real(std::string_view text, std::string_view what) {
  text = trim(text);
  double value = 0.0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw std::invalid_argument(std::string(what) + ": '" + std::string(text) +
                                "' is not a real number");
  }
  return value;
}

}  // namespace romnls
