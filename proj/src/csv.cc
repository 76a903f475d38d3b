// Copyright 2026 The AdaDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "adadp/csv.h"

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <utility>

#include "adadp/errors.h"

namespace adadp {
namespace {

std::vector<std::string> SplitLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::string FormatCell(const CsvCell& cell) {
  if (const double* d = std::get_if<double>(&cell)) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", *d);
    return buf;
  }
  if (const std::int64_t* i = std::get_if<std::int64_t>(&cell)) {
    return std::to_string(*i);
  }
  const std::string& s = std::get<std::string>(cell);
  if (s.find_first_of(",\"\n\r") != std::string::npos) {
    throw FormatError("CSV cell needs quoting: " + s);
  }
  return s;
}

CsvWriter::CsvWriter(const std::string& path, std::vector<std::string> header)
    : path_(path), columns_(header.size()), out_(path) {
  if (!out_) throw IoError("cannot open " + path + " for writing");
  std::vector<CsvCell> cells(header.begin(), header.end());
  Row(cells);
}

void CsvWriter::Row(const std::vector<CsvCell>& cells) {
  if (cells.size() != columns_) {
    throw FormatError("CSV row has " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(columns_));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << FormatCell(cells[i]);
  }
  out_ << '\n';
  out_.flush();
  if (!out_) throw IoError("write failed on " + path_);
}

std::size_t CsvTable::Column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw FormatError("CSV has no column '" + name + "'");
}

const std::string& CsvTable::Text(std::size_t row,
                                  const std::string& column) const {
  return rows.at(row).at(Column(column));
}

double CsvTable::Number(std::size_t row, const std::string& column) const {
  const std::string& s = Text(row, column);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') {
    throw FormatError("not a number in column " + column + ": '" + s + "'");
  }
  return v;
}

std::int64_t CsvTable::Integer(std::size_t row,
                               const std::string& column) const {
  const std::string& s = Text(row, column);
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0') {
    throw FormatError("not an integer in column " + column + ": '" + s + "'");
  }
  return v;
}

CsvTable ReadCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path + " is empty");
  table.header = SplitLine(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    table.rows.push_back(SplitLine(line));
    if (table.rows.back().size() != table.header.size()) {
      throw FormatError(path + ": ragged row " +
                        std::to_string(table.rows.size()));
    }
  }
  return table;
}

}  // namespace adadp
