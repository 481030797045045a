#pragma once

#include <optional>
#include <string>
#include <vector>

namespace selfheal {

// Shortest round-trippable-enough rendering used across all CSV output:
// %.10g, so values compare stably between runs and platforms.
std::string format_double(double v);

// Minimal CSV builder. Fields containing separators, quotes or line breaks
// are quoted with doubled inner quotes; everything else is written verbatim.
// Rows must match the header arity.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> row);

  // Convenience for numeric/optional-heavy rows: absent -> empty field.
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  }

  std::size_t row_count() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }

  std::string to_string() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace selfheal
