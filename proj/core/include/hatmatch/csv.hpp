#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hatmatch::csv {

using Row = std::vector<std::string>;

// RFC-4180 style quoting when a cell contains a comma, quote or newline.
std::string escape(const std::string& cell);
void write_row(std::ostream& out, const Row& row);

// Parses one record per line (quoted cells may not span lines).
Row parse_line(const std::string& line);

struct Table {
  Row header;
  std::vector<Row> rows;

  // Column index by name, or -1.
  int column(const std::string& name) const;
};

Table read_file(const std::string& path);
void write_file(const std::string& path, const Table& table);

// Fixed-precision number formatting used for every emitted numeric cell, so
// byte-identical inputs give byte-identical files.
std::string num(double value, int precision = 6);

}  // namespace hatmatch::csv
