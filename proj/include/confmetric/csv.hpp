#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace confmetric::csv {

struct Row {
  std::size_t line = 0;  // 1-based line number in the source
  std::vector<std::string> cells;
};

// Splits comma-separated text into trimmed cells. Blank lines and lines
// starting with '#' are skipped. Double-quoted cells may contain commas.
std::vector<Row> read(std::istream& in);
std::vector<Row> read(std::string_view text);

// Quotes a cell only when it needs it.
std::string escape(std::string_view cell);

std::string format_double(double value);

}  // namespace confmetric::csv
