// Attribute values: null, 64-bit integer, or string. Columns are
// homogeneously typed by their schema domain tag.
#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace erblox {

using Value = std::variant<std::monostate, int64_t, std::string>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

bool value_less(const Value& a, const Value& b);

// Display form: null renders as the empty string, integers in decimal.
std::string value_to_string(const Value& v);

// Strict int64 parse; the whole token must be consumed.
int64_t parse_int(const std::string& token, const std::string& context);

}  // namespace erblox
