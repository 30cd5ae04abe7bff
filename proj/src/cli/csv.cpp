#include "wgqed/cli/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "wgqed/error.hpp"

namespace wgqed::cli {

void CsvTable::add_row(std::vector<Cell> row) {
  if (row.size() != header.size()) throw Error("csv: row width does not match the header");
  rows.push_back(std::move(row));
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error("csv: no column '" + name + "'");
  const auto idx = static_cast<std::size_t>(it - header.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    const auto* v = std::get_if<double>(&row[idx]);
    out.push_back(v ? *v : 0.0);
  }
  return out;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string quote_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  auto line = [&out](const auto& cells, auto render) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      out += render(cells[i]);
    }
    out += "\r\n";
  };
  line(table.header, [](const std::string& h) { return quote_field(h); });
  for (const auto& row : table.rows) {
    line(row, [](const Cell& c) {
      if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
      return quote_field(std::get<std::string>(c));
    });
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace wgqed::cli
