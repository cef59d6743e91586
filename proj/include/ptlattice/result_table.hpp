#pragma once

// Rectangular numeric table written as UTF-8 CSV. The first line is '#'
// followed by a single-line JSON metadata document.

#include <charconv>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ptlattice/errors.hpp"

namespace ptlattice {

inline constexpr const char* version_string = "0.1.0";

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  nlohmann::json metadata = nlohmann::json::object();

  void add_row(std::vector<double> row) {
    if (row.size() != columns.size())
      throw error("row has " + std::to_string(row.size()) + " values, table has " +
                  std::to_string(columns.size()) + " columns");
    rows.push_back(std::move(row));
  }

  [[nodiscard]] std::vector<double> column(const std::string& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c] != name)
        continue;
      std::vector<double> out;
      out.reserve(rows.size());
      for (const auto& r : rows)
        out.push_back(r[c]);
      return out;
    }
    throw error("no column named " + name);
  }
};

/// Shortest representation that round-trips exactly.
inline std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void write_csv(std::ostream& os, const ResultTable& table) {
  os << '#' << table.metadata.dump() << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    os << (c ? "," : "") << table.columns[c];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      os << (c ? "," : "") << format_number(row[c]);
    os << '\n';
  }
}

inline std::string to_csv(const ResultTable& table) {
  std::ostringstream os;
  write_csv(os, table);
  return os.str();
}

inline ResultTable read_csv(std::istream& is) {
  ResultTable table;
  std::string line;
  if (!std::getline(is, line) || line.empty() || line.front() != '#')
    throw error("csv: missing '#' metadata line");
  table.metadata = nlohmann::json::parse(line.substr(1));
  if (!std::getline(is, line))
    throw error("csv: missing header line");
  {
    std::istringstream hs(line);
    std::string name;
    while (std::getline(hs, name, ','))
      table.columns.push_back(name);
  }
  while (std::getline(is, line)) {
    if (line.empty())
      continue;
    std::vector<double> row;
    std::istringstream rs(line);
    std::string cell;
    while (std::getline(rs, cell, ',')) {
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc{}) {
        if (cell == "nan" || cell == "-nan")
          v = std::numeric_limits<double>::quiet_NaN();
        else
          throw error("csv: bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    table.add_row(std::move(row));
  }
  return table;
}

} // namespace ptlattice
