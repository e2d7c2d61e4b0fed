#include "pednav/csv.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace pednav {

std::string format_double(double v) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot open for writing: " + path.string());
}

void CsvWriter::header(std::initializer_list<std::string_view> names) {
  bool first = true;
  for (auto n : names) write_field(n, first);
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  bool first = true;
  for (double v : values) write_field(v, first);
  out_ << '\n';
}

void CsvWriter::write_field(double v, bool& first) {
  if (!first) out_ << ',';
  first = false;
  out_ << format_double(v);
}

void CsvWriter::write_field(int v, bool& first) {
  if (!first) out_ << ',';
  first = false;
  out_ << v;
}

void CsvWriter::write_field(std::string_view v, bool& first) {
  if (!first) out_ << ',';
  first = false;
  out_ << v;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvReader::CsvReader(const std::filesystem::path& path,
                     std::initializer_list<std::string_view> expected_header)
    : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw std::runtime_error(path.string() + ": cannot open file");
  std::vector<std::string> fields;
  std::string line;
  if (!std::getline(in_, line)) fail("missing header");
  ++line_;
  fields = split(line);
  std::size_t i = 0;
  if (fields.size() != expected_header.size()) fail("unexpected header '" + line + "'");
  for (auto name : expected_header) {
    if (fields[i++] != name) fail("unexpected header '" + line + "'");
  }
  columns_ = expected_header.size();
}

bool CsvReader::next(std::vector<std::string>& fields) {
  std::string line;
  if (!std::getline(in_, line)) return false;
  ++line_;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  fields = split(line);
  if (fields.size() != columns_) {
    fail("expected " + std::to_string(columns_) + " fields, found " + std::to_string(fields.size()));
  }
  return true;
}

bool CsvReader::next_numeric(std::vector<double>& values) {
  std::vector<std::string> fields;
  if (!next(fields)) return false;
  values.resize(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    try {
      values[i] = parse_double(fields[i]);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  return true;
}

void CsvReader::fail(const std::string& what) const {
  throw std::runtime_error(path_.string() + ":" + std::to_string(line_) + ": " + what);
}

}  // namespace pednav
