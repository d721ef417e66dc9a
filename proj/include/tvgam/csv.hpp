#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tvgam::csv {

using Row = std::vector<std::string>;

// Parses RFC 4180 CSV: comma separator, optional double-quote quoting with
// "" escapes, LF or CRLF line endings. A trailing newline does not produce an
// empty row. Throws DataError on unterminated quotes or stray characters
// after a closing quote.
std::vector<Row> parse(std::istream& in);
std::vector<Row> parse(std::string_view text);

// Quotes a field only when it contains a separator, quote or newline.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const Row& row);

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace tvgam::csv
