#include "memsx/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "memsx/errors.hpp"

namespace memsx {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

struct CsvFile::Impl {
  std::ofstream out;
};

CsvFile::CsvFile(const std::string& path, const std::string& config_hash) : impl_(new Impl) {
  impl_->out.open(path, std::ios::binary);
  if (!impl_->out) throw ConfigError("cannot open output file: " + path);
  impl_->out << "# memsx " << kVersion << "\n";
  impl_->out << "# config_hash=" << config_hash << "\n";
}

void CsvFile::meta(const std::string& key, const std::string& value) {
  impl_->out << "# " << key << "=" << value << "\n";
}

void CsvFile::header(const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i)
    impl_->out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

void CsvFile::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i)
    impl_->out << cells[i] << (i + 1 < cells.size() ? "," : "\n");
}

void CsvFile::close() {
  if (impl_ && impl_->out.is_open()) impl_->out.close();
}

CsvFile::~CsvFile() {
  close();
  delete impl_;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace memsx
