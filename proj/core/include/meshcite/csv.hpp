#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace meshcite::csv {

// RFC-4180 field encoding: fields containing a comma, quote, CR or LF are
// quoted, with embedded quotes doubled. Everything else passes through.
std::string encode_field(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Full RFC-4180 parse, including quoted fields with embedded separators and
// newlines. Accepts LF and CRLF row endings; the final newline is optional.
std::vector<std::vector<std::string>> parse(std::string_view text);

std::vector<std::vector<std::string>> read_file(const std::filesystem::path& path);

}  // namespace meshcite::csv
