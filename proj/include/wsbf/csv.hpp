#ifndef WSBF_CSV_HPP
#define WSBF_CSV_HPP

#include <string>
#include <vector>

namespace wsbf::csv {

/// Raw CSV table: header plus rows of unparsed cells.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Reads a comma-separated file. No quoting support; cells are trimmed of
/// surrounding whitespace. Throws SchemaError on an empty file and ParseError
/// on a row whose cell count differs from the header.
Table read_file(const std::string& path);

Table read_string(const std::string& text, const std::string& origin = "<string>");

/// Shortest round-trip decimal form of a double ("12" stays "12", not "12.0").
std::string format_double(double v);

/// Writes header + rows. Every run with identical inputs produces an
/// identical byte stream.
void write_file(const std::string& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows);

} // namespace wsbf::csv

#endif // WSBF_CSV_HPP
