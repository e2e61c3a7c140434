#include "tactile/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tactile/errors.hpp"

namespace tactile::csv {

namespace {

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
    out.emplace_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += ',';
    s += items[i];
  }
  return s;
}

}  // namespace

Table Table::parse(std::string_view text, std::string source) {
  Table t;
  t.source_ = std::move(source);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    auto cells = split_line(line);
    if (!have_header) {
      t.header_ = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != t.header_.size()) {
        throw InputError(t.source_ + ":" + std::to_string(line_no) + ": expected " +
                         std::to_string(t.header_.size()) + " columns, found " +
                         std::to_string(cells.size()));
      }
      t.cells_.push_back(std::move(cells));
      t.line_numbers_.push_back(line_no);
    }
    if (end == text.size()) break;
  }
  if (!have_header) throw InputError(t.source_ + ": missing header row");
  return t;
}

Table Table::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void Table::require_header(const std::vector<std::string>& expected) const {
  if (header_ != expected) {
    throw InputError(source_ + ":1: header '" + join(header_) + "' does not match expected '" +
                     join(expected) + "'");
  }
}

void Table::require_header_prefix(const std::vector<std::string>& prefix) const {
  if (header_.size() < prefix.size() ||
      !std::equal(prefix.begin(), prefix.end(), header_.begin())) {
    throw InputError(source_ + ":1: header '" + join(header_) + "' must start with '" +
                     join(prefix) + "'");
  }
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  throw InputError(source_ + ":1: missing column '" + std::string(name) + "'");
}

std::string Table::location(std::size_t row, std::size_t col) const {
  return source_ + ":" + std::to_string(line_numbers_.at(row)) + ":" + std::to_string(col + 1) +
         " (" + header_.at(col) + ")";
}

double Table::number(std::size_t row, std::size_t col) const {
  const std::string& cell = cells_.at(row).at(col);
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v)) {
    throw InputError(location(row, col) + ": '" + cell + "' is not a finite number");
  }
  return v;
}

std::int64_t Table::integer(std::size_t row, std::size_t col) const {
  const std::string& cell = cells_.at(row).at(col);
  std::int64_t v = 0;
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), last, v);
  if (cell.empty() || ec != std::errc{} || ptr != last) {
    throw InputError(location(row, col) + ": '" + cell + "' is not an integer");
  }
  return v;
}

const std::string& Table::text(std::size_t row, std::size_t col) const {
  return cells_.at(row).at(col);
}

std::string format_exact(double v) { return format_sig(v, 17); }

std::string format_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace tactile::csv
