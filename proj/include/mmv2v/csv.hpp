#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mmv2v/errors.hpp"

namespace mmv2v {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// CSV with '#'-prefixed metadata lines ("# key: value") ahead of the header
// row. The "schema" metadata key versions the column layout.
class CsvWriter {
 public:
  void metadata(const std::string& key, const std::string& value) {
    metadata_.emplace_back(key, value);
  }
  void header(std::vector<std::string> columns) { columns_ = std::move(columns); }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size())
      throw IoError("csv row width does not match header");
    rows_.push_back(cells);
  }

  std::string str() const {
    std::ostringstream out;
    for (const auto& [k, v] : metadata_) out << "# " << k << ": " << v << "\n";
    out << join(columns_) << "\n";
    for (const auto& r : rows_) out << join(r) << "\n";
    return out.str();
  }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << str();
    if (!out) throw IoError("failed writing " + path);
  }

 private:
  static std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ",";
      line += cells[i];
    }
    return line;
  }

  std::vector<std::pair<std::string, std::string>> metadata_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

struct CsvTable {
  std::map<std::string, std::string> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string schema() const {
    const auto it = metadata.find("schema");
    return it == metadata.end() ? "" : it->second;
  }

  int column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    return -1;
  }

  double number(std::size_t row, int col) const {
    return std::stod(rows[row][col]);
  }
};

inline CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      if (!body.empty() && body[0] == ' ') body.erase(0, 1);
      const auto colon = body.find(':');
      if (colon != std::string::npos) {
        std::string key = body.substr(0, colon);
        std::string value = body.substr(colon + 1);
        if (!value.empty() && value[0] == ' ') value.erase(0, 1);
        table.metadata[key] = value;
      }
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    if (!have_header) {
      table.columns = cells;
      have_header = true;
    } else {
      table.rows.push_back(cells);
    }
  }
  return table;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace mmv2v
