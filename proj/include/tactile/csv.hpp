#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tactile::csv {

// A parsed CSV table with a mandatory header row. Errors report the source
// name together with 1-based line and column numbers.
class Table {
 public:
  static Table parse(std::string_view text, std::string source = "<memory>");
  static Table read(const std::filesystem::path& path);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return cells_.size(); }
  const std::string& source() const { return source_; }

  // Throws InputError unless the header matches `expected` exactly.
  void require_header(const std::vector<std::string>& expected) const;
  // Throws InputError unless the header starts with `prefix`.
  void require_header_prefix(const std::vector<std::string>& prefix) const;

  std::size_t column(std::string_view name) const;

  double number(std::size_t row, std::size_t col) const;
  std::int64_t integer(std::size_t row, std::size_t col) const;
  const std::string& text(std::size_t row, std::size_t col) const;

 private:
  std::string location(std::size_t row, std::size_t col) const;

  std::string source_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> cells_;
  std::vector<std::size_t> line_numbers_;
};

// Shortest round-trip representation ("%.17g").
std::string format_exact(double v);
// Fixed number of significant digits ("%.<digits>g").
std::string format_sig(double v, int digits);

}  // namespace tactile::csv
