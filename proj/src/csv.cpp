#include "cpikan/csv.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cpikan {

CsvWriter::CsvWriter(const std::filesystem::path& file) : out_(file) {
  if (!out_) {
    throw std::runtime_error("csv: cannot open " + file.string());
  }
}

void CsvWriter::header(const std::vector<std::string>& names) { row(names); }

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ << ',';
    out_ << format_number(values[i]);
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << csv_escape(fields[i]);
  }
  out_ << '\n';
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

std::vector<std::string> split_record(std::istream& in, const std::string& first) {
  std::vector<std::string> fields;
  std::string line = first;
  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  while (true) {
    if (i == line.size()) {
      if (quoted) {
        // Quoted field spans a line break.
        std::string next;
        if (!std::getline(in, next)) {
          throw std::runtime_error("csv: unterminated quoted field");
        }
        field += '\n';
        line = next;
        i = 0;
        continue;
      }
      break;
    }
    const char c = line[i++];
    if (quoted) {
      if (c == '"') {
        if (i < line.size() && line[i] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("csv: cannot open " + file.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) return table;
  table.header = split_record(in, line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    table.rows.push_back(split_record(in, line));
    if (table.rows.back().size() != table.header.size()) {
      throw std::runtime_error("csv: ragged row in " + file.string());
    }
  }
  return table;
}

}  // namespace cpikan
