#ifndef POLAR_SRC_CSV_HPP
#define POLAR_SRC_CSV_HPP

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

// Minimal RFC-4180 CSV support: quoted fields may contain commas, doubled
// quotes and embedded newlines. Input may use \n or \r\n line endings;
// output always uses \n.

namespace polar::csv {

using Row = std::vector<std::string>;

/// Parses an entire stream. Returns one Row per record; the trailing empty
/// record after a final newline is not included.
std::vector<Row> parse(std::istream& in);

/// Quotes the field only when needed for a lossless round trip.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const Row& row);

}  // namespace polar::csv

#endif  // POLAR_SRC_CSV_HPP
