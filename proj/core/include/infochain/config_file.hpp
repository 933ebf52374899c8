#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace infochain {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// `key = value` lines. '#' starts a comment; blank lines are ignored; keys
/// and values are trimmed. Throws ParseError on a line without '='.
KeyValues parse_key_values(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomically(const std::filesystem::path& path, std::string_view contents);

}  // namespace infochain
