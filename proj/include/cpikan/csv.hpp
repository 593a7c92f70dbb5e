#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace cpikan {

/// Minimal RFC-4180 writer: fields containing separators, quotes, or line
/// breaks are quoted; numbers are written with round-trip precision.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& file);

  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& fields);

 private:
  std::ofstream out_;
};

std::string format_number(double v);
std::string csv_escape(const std::string& field);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads a CSV file with a header row; quoted fields are supported.
CsvTable read_csv(const std::filesystem::path& file);

}  // namespace cpikan
