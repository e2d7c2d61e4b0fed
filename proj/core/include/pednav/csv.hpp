#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace pednav {

/// Shortest-safe text form of a double: 17 significant digits, which
/// round-trips bit-exactly through `parse_double`.
std::string format_double(double v);
double parse_double(std::string_view text);

/// Comma-separated writer with LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);

  void header(std::initializer_list<std::string_view> names);

  template <typename... Ts>
  void row(const Ts&... values) {
    bool first = true;
    (write_field(values, first), ...);
    out_ << '\n';
  }

  void row(const std::vector<double>& values);

 private:
  void write_field(double v, bool& first);
  void write_field(int v, bool& first);
  void write_field(std::string_view v, bool& first);
  void write_field(const std::string& v, bool& first) { write_field(std::string_view(v), first); }
  void write_field(const char* v, bool& first) { write_field(std::string_view(v), first); }

  std::filesystem::path path_;
  std::ofstream out_;
};

/// Reads a CSV with a header row. Errors name the file and line.
class CsvReader {
 public:
  CsvReader(const std::filesystem::path& path, std::initializer_list<std::string_view> expected_header);

  /// Next data row split into fields; false at end of file.
  bool next(std::vector<std::string>& fields);
  /// Next data row as doubles with an exact field count.
  bool next_numeric(std::vector<double>& values);

  [[noreturn]] void fail(const std::string& what) const;
  int line() const { return line_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t columns_ = 0;
  int line_ = 0;
};

}  // namespace pednav
