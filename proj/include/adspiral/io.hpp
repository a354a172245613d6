#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace adspiral {

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never see a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// Formats a double with 17 significant digits ("%.17g"); NaN is written "nan".
std::string format_double(double v);

/// Header row plus one line per row, comma separated.
std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& value);

}  // namespace adspiral
