#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sgmave {

// RFC-4180 table: header row required, quoted fields with embedded
// commas/quotes/newlines supported, '.' decimal separator.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // index of a header column, -1 when absent
  long column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

std::string csv_escape(const std::string& field);

}  // namespace sgmave
