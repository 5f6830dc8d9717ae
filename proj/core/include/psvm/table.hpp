//
// Copyright 2026 The psvm Authors
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
//

#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace psvm {

// A small column-named result table.  Rendering is byte-reproducible:
// doubles are printed as their shortest round-trip decimal form, so equal
// values always produce equal bytes.
using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  // Throws DataError if a row length disagrees with the header.
  void validate() const;
};

enum class EmitFormat { kCsv, kJson };

// Shortest decimal string that parses back to exactly `value`.
[[nodiscard]] std::string format_double(double value);

// CSV: header line plus one line per row, '\n' endings, RFC-style quoting
// only when a field needs it.  JSON: array of objects keyed by column, in
// column order, two-space indented.
[[nodiscard]] std::string render(const Table& table, EmitFormat format);

void emit(const Table& table, const std::filesystem::path& path,
          EmitFormat format);

}  // namespace psvm
