#pragma once

#include <string>
#include <vector>

#include "minspace/types.hpp"

namespace minspace {

enum class OutputFormat { csv, json };

// Fixed-schema numeric table for plot data. CSV starts with a
// `#schema=<name>/v1` comment and a named-column header; JSON mirrors the
// rows as arrays of objects. All floating-point output uses 17 significant
// digits so runs can be compared byte for byte.
class Table {
public:
  Table(std::string schema, std::vector<std::string> columns);

  void add_row(std::vector<double> row);  // size must match columns

  void write(std::ostream& os, OutputFormat fmt) const;
  void write_file(const std::string& path, OutputFormat fmt) const;

  const std::vector<std::vector<double>>& rows() const { return rows_; }

private:
  std::string schema_;
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

// 17-significant-digit formatting used across all outputs.
std::string format_double(double x);

}  // namespace minspace
