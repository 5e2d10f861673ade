#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace pqlab::csv {

/// Shortest decimal that round-trips to the same double; "inf", "-inf", "nan"
/// for non-finite values.
std::string number(double v);

/// Writes `content` to a sibling temporary file and renames it over `path`.
/// Throws IoError on failure.
void write_atomic(const std::filesystem::path& path, std::string_view content);

} // namespace pqlab::csv
