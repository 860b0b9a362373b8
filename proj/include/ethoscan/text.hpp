#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ethoscan::text {

bool is_valid_utf8(std::string_view bytes);

/// Decodes as UTF-8, replacing each invalid sequence with U+FFFD.
std::string lossy_utf8(std::string_view bytes);

bool looks_binary(std::string_view bytes);  // NUL byte present

std::string to_lower_ascii(std::string_view s);

/// CRLF and lone CR become LF.
std::string normalize_line_endings(std::string_view s);

/// Collapses every whitespace run to a single space and trims both ends.
std::string collapse_whitespace(std::string_view s);

bool icontains(std::string_view haystack, std::string_view needle);

/// Case-insensitive search for `needle` where the match is not glued to an
/// alphanumeric character on either side. Returns npos when absent.
size_t find_word_icase(std::string_view haystack, std::string_view needle);

std::string base64_encode(std::string_view bytes);
/// Whitespace (the API wraps lines at 60 columns) is ignored.
std::string base64_decode(std::string_view encoded);

std::vector<std::string> split(std::string_view s, char sep);

/// Extension without the dot, lower-cased; empty when the basename has none.
std::string extension_of(std::string_view path);
std::string basename_of(std::string_view path);
bool is_root_path(std::string_view path);

}  // namespace ethoscan::text
