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

// Plain comma-separated tables. Numbers are written with %.17g so that
// reading a file back yields the same doubles bit for bit. Cells never need
// quoting: strings containing commas, quotes or newlines are rejected.

#ifndef ADADP_CSV_H_
#define ADADP_CSV_H_

#include <cstdint>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace adadp {

using CsvCell = std::variant<double, std::int64_t, std::string>;

std::string FormatCell(const CsvCell& cell);

// Streams rows to disk, flushing after each one so an aborted run still
// leaves every completed row behind.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::vector<std::string> header);

  void Row(const std::vector<CsvCell>& cells);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::size_t columns_;
  std::ofstream out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws FormatError when the column is absent.
  std::size_t Column(const std::string& name) const;
  double Number(std::size_t row, const std::string& column) const;
  std::int64_t Integer(std::size_t row, const std::string& column) const;
  const std::string& Text(std::size_t row, const std::string& column) const;
};

CsvTable ReadCsv(const std::string& path);

}  // namespace adadp

#endif  // ADADP_CSV_H_
