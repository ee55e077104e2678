// RFC-4180 style CSV: quoted fields may contain commas, doubled quotes,
// and line breaks; rows end at LF or CRLF; the final newline is optional.
#pragma once

#include <string>
#include <vector>

namespace erblox {

std::vector<std::vector<std::string>> parse_csv(const std::string& text);

std::string csv_escape(const std::string& field);

std::string write_csv_row(const std::vector<std::string>& fields);

std::string read_file(const std::string& path);

void write_file(const std::string& path, const std::string& content);

}  // namespace erblox
