#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace walker::csv {

/// Shortest decimal text that round-trips to the same double.
std::string format(double v);
double parse_double(std::string_view text, std::string_view context);
long long parse_int(std::string_view text, std::string_view context);

std::vector<std::string> split_line(std::string_view line);
void write_row(std::ostream& os, const std::vector<std::string>& fields);

/// Header-indexed table; every row has exactly the header's column count.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index, or -1.
  int find(std::string_view column) const;
  /// Column index; throws Error(FormatError) when absent.
  int require(std::string_view column) const;
};

Table read(const std::filesystem::path& path);
void write(const std::filesystem::path& path, const Table& table);

}  // namespace walker::csv
