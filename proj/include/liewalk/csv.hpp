#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace liewalk {

/// Lowercase hex SHA-1 of a byte string.
std::string sha1_hex(const std::string& data);

/// Git-style blob hash: SHA-1 of "blob <size>\0<content>".
std::string git_blob_sha1(const std::string& content);

/// Fixed-format decimal rendering used everywhere output must be
/// byte-reproducible: shortest form with up to 17 significant digits.
std::string format_double(double v);

/// RFC-4180 CSV with a '#'-prefixed comment header block.  All writes use
/// '\n' line endings; numeric fields go through format_double, so identical
/// inputs produce byte-identical files.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void comment(const std::string& text);
  void columns(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& fields);

  static std::string cell(double v) { return format_double(v); }
  static std::string cell(std::int64_t v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }

 private:
  void emit(const std::vector<std::string>& fields);
  std::ofstream out_;
};

}  // namespace liewalk
