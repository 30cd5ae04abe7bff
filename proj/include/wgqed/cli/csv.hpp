#pragma once

// Deterministic CSV tables: UTF-8, '.' decimal separator, 17 significant
// digits, fields quoted only when they contain a comma, quote, or line break.

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace wgqed::cli {

using Cell = std::variant<double, std::string>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  std::vector<double> column(const std::string& name) const;
};

std::string format_number(double value);
std::string quote_field(const std::string& field);
std::string to_csv(const CsvTable& table);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace wgqed::cli
