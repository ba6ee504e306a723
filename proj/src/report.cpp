#include "windesign/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "windesign/errors.hpp"

namespace windesign {

std::string format_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace {

std::string escape_csv(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void append_row(std::string& out, const std::vector<std::string>& row) {
  for (size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    out += escape_csv(row[i]);
  }
  out += '\n';
}

}  // namespace

std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  append_row(out, header);
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw Error(ErrorCode::ConfigError, "csv row width does not match header");
    append_row(out, row);
  }
  return out;
}

std::string render_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void write_file(const std::string& path, const std::string& contents) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot open for writing: " + path);
  f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!f) throw Error(ErrorCode::ConfigError, "write failed: " + path);
}

}  // namespace windesign
