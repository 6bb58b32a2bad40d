#include "choicealloc/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "choicealloc/errors.hpp"

namespace choicealloc {

ExperimentTable::ExperimentTable(std::string name, std::vector<std::string> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {}

void ExperimentTable::add_row(std::string label, std::vector<double> values) {
  if (values.size() != columns_.size()) {
    throw InvalidInput("table '" + name_ + "': row '" + label + "' has " + std::to_string(values.size()) +
                       " values for " + std::to_string(columns_.size()) + " columns");
  }
  rows_.push_back({std::move(label), std::move(values)});
}

const TableRow& ExperimentTable::row(std::string_view label) const {
  const auto it = std::find_if(rows_.begin(), rows_.end(), [&](const TableRow& r) { return r.label == label; });
  if (it == rows_.end()) throw InvalidInput("table '" + name_ + "': no row '" + std::string(label) + "'");
  return *it;
}

std::size_t ExperimentTable::column_index(std::string_view column) const {
  const auto it = std::find(columns_.begin(), columns_.end(), column);
  if (it == columns_.end()) throw InvalidInput("table '" + name_ + "': no column '" + std::string(column) + "'");
  return static_cast<std::size_t>(it - columns_.begin());
}

double ExperimentTable::value(std::string_view label, std::string_view column) const {
  return row(label).values[column_index(column)];
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string ExperimentTable::to_csv() const {
  std::string out = "label";
  for (const auto& c : columns_) out += "," + csv_field(c);
  out += "\r\n";
  for (const auto& r : rows_) {
    out += csv_field(r.label);
    for (double v : r.values) out += "," + format_double(v);
    out += "\r\n";
  }
  return out;
}

nlohmann::json ExperimentTable::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rows_) rows.push_back({{"label", r.label}, {"values", r.values}});
  return {{"name", name_}, {"columns", columns_}, {"rows", std::move(rows)}};
}

}  // namespace choicealloc
