#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qmst::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Reads a comma-separated file. Blank lines are skipped; every row must
/// have as many cells as the header, and no cell may be empty.
[[nodiscard]] Table read(const std::string& path);
[[nodiscard]] Table parse(std::istream& in, const std::string& source_name);

[[nodiscard]] double to_double(std::string_view cell, const std::string& where);
[[nodiscard]] long long to_integer(std::string_view cell, const std::string& where);

/// Shortest representation that round-trips exactly.
[[nodiscard]] std::string format_exact(double v);
/// Fixed number of significant digits (%.Ng).
[[nodiscard]] std::string format_sig(double v, int digits);

[[nodiscard]] std::string join(const std::vector<std::string>& cells, char sep = ',');

}  // namespace qmst::csv

namespace qmst {

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_text(const std::string& path, const std::string& content);
[[nodiscard]] std::string read_text(const std::string& path);

}  // namespace qmst
