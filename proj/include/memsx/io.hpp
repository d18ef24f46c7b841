#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace memsx {

inline constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

// Full-precision (17 significant digits) formatting for CSV payloads.
std::string fmt_double(double v);

// CSV with '#'-prefixed metadata lines (version + config hash first).
class CsvFile {
 public:
  CsvFile(const std::string& path, const std::string& config_hash);
  CsvFile(const CsvFile&) = delete;
  CsvFile& operator=(const CsvFile&) = delete;
  void meta(const std::string& key, const std::string& value);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);
  void close();
  ~CsvFile();

 private:
  struct Impl;
  Impl* impl_;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace memsx
