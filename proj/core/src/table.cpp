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

#include "psvm/table.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>

#include "psvm/errors.hpp"

namespace psvm {
namespace {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) {
    return field;
  }
  std::string quoted = "\"";
  for (const char ch : field) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  quoted += '"';
  return quoted;
}

std::string cell_to_csv(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  return csv_escape(std::get<std::string>(cell));
}

nlohmann::ordered_json cell_to_json(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  if (const auto* i = std::get_if<long long>(&cell)) return *i;
  return std::get<std::string>(cell);
}

}  // namespace

void Table::validate() const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != columns.size()) {
      throw DataError("table row " + std::to_string(i + 1) + " has " +
                      std::to_string(rows[i].size()) + " cells, expected " +
                      std::to_string(columns.size()));
    }
  }
}

std::string format_double(double value) {
  std::array<char, 32> buffer;
  const auto [end, ec] =
      std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  if (ec != std::errc()) {
    throw NumericalError("failed to format a double value");
  }
  return std::string(buffer.data(), end);
}

std::string render(const Table& table, EmitFormat format) {
  table.validate();
  if (format == EmitFormat::kCsv) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c > 0) out += ',';
      out += csv_escape(table.columns[c]);
    }
    out += '\n';
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c > 0) out += ',';
        out += cell_to_csv(row[c]);
      }
      out += '\n';
    }
    return out;
  }

  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json record;
    for (std::size_t c = 0; c < row.size(); ++c) {
      record[table.columns[c]] = cell_to_json(row[c]);
    }
    records.push_back(std::move(record));
  }
  return records.dump(2) + "\n";
}

void emit(const Table& table, const std::filesystem::path& path,
          EmitFormat format) {
  const std::string body = render(table, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot open output file: " + path.string());
  }
  out << body;
  if (!out) {
    throw DataError("failed to write table to " + path.string());
  }
}

}  // namespace psvm
