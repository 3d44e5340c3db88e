#include "minspace/table.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace minspace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Table::Table(std::string schema, std::vector<std::string> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {
  if (columns_.empty()) {
    throw validation_error("table needs at least one column");
  }
}

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns_.size()) {
    throw validation_error("row width does not match the table schema");
  }
  rows_.push_back(std::move(row));
}

void Table::write(std::ostream& os, OutputFormat fmt) const {
  if (fmt == OutputFormat::csv) {
    os << "#schema=" << schema_ << "/v1\n";
    for (size_t c = 0; c < columns_.size(); ++c) {
      os << (c ? "," : "") << columns_[c];
    }
    os << "\n";
    for (const auto& row : rows_) {
      for (size_t c = 0; c < row.size(); ++c) {
        os << (c ? "," : "") << format_double(row[c]);
      }
      os << "\n";
    }
    return;
  }
  // JSON mirrors the CSV rows: schema string plus an array of objects.
  // Non-finite values (a failed sweep point) are not valid JSON numbers and
  // become null.
  os << "{\n  \"schema\": \"" << schema_ << "/v1\",\n  \"rows\": [";
  for (size_t r = 0; r < rows_.size(); ++r) {
    os << (r ? ",\n    {" : "\n    {");
    for (size_t c = 0; c < columns_.size(); ++c) {
      const double x = rows_[r][c];
      os << (c ? ", " : "") << '"' << columns_[c] << "\": "
         << (std::isfinite(x) ? format_double(x) : "null");
    }
    os << "}";
  }
  os << "\n  ]\n}\n";
}

void Table::write_file(const std::string& path, OutputFormat fmt) const {
  std::ofstream out(path);
  if (!out) {
    throw validation_error("cannot open output file: " + path);
  }
  write(out, fmt);
}

}  // namespace minspace
