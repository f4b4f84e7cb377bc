#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace fairsmile::cli {

enum class Format { csv, json };

// Empty cells print as an empty CSV field and as null in JSON.
using Cell = std::variant<std::monostate, std::string, long long, double>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

// Shortest round-trip decimal for finite values; "nan"/"inf" otherwise.
[[nodiscard]] std::string format_number(double v);

void write_table(std::ostream& out, const Table& t, Format f);

// Plain comma-separated text with a header row; no quoting.
struct CsvText {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::size_t column(const std::string& name) const;
};
[[nodiscard]] CsvText read_csv(std::istream& in);

}  // namespace fairsmile::cli
