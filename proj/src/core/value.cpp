#include "core/value.h"

#include <charconv>

#include "core/error.h"

namespace erblox {

bool value_less(const Value& a, const Value& b) {
  // Total order: null < integers < strings.
  if (a.index() != b.index()) return a.index() < b.index();
  if (std::holds_alternative<int64_t>(a)) return std::get<int64_t>(a) < std::get<int64_t>(b);
  if (std::holds_alternative<std::string>(a)) return std::get<std::string>(a) < std::get<std::string>(b);
  return false;
}

std::string value_to_string(const Value& v) {
  if (is_null(v)) return "";
  if (std::holds_alternative<int64_t>(v)) return std::to_string(std::get<int64_t>(v));
  return std::get<std::string>(v);
}

int64_t parse_int(const std::string& token, const std::string& context) {
  int64_t out = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || token.empty()) {
    fail(ErrorCode::Parse, context + ": not an integer: '" + token + "'");
  }
  return out;
}

}  // namespace erblox
