#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace choicealloc {

struct TableRow {
  std::string label;
  std::vector<double> values;
};

/// Labeled rows of numbers with a fixed column set.
class ExperimentTable {
 public:
  ExperimentTable(std::string name, std::vector<std::string> columns);

  /// Throws InvalidInput if values.size() != columns().size().
  void add_row(std::string label, std::vector<double> values);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<TableRow>& rows() const { return rows_; }

  const TableRow& row(std::string_view label) const;
  double value(std::string_view label, std::string_view column) const;
  std::size_t column_index(std::string_view column) const;

  /// RFC 4180; first column is "label"; numbers in shortest round-trip form.
  std::string to_csv() const;
  nlohmann::json to_json() const;

 private:
  std::string name_;
  std::vector<std::string> columns_;
  std::vector<TableRow> rows_;
};

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Quotes a CSV field when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view text);

}  // namespace choicealloc
