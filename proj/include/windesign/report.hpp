#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace windesign {

// Rendered in-memory so byte-identity across worker counts can be tested
// without touching the filesystem.

// Doubles print with up to six significant digits (%.6g); integers as-is.
std::string format_g6(double v);

// CSV from a header row plus value rows; fields are escaped per RFC 4180.
std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows);

// Pretty two-space-indented JSON with a trailing newline.
std::string render_json(const nlohmann::json& j);

// Creates parent directories as needed; overwrites.
void write_file(const std::string& path, const std::string& contents);

}  // namespace windesign
