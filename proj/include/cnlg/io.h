// Copyright 2026 The cnlg Authors
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

#ifndef CNLG_IO_H_
#define CNLG_IO_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace cnlg {

using Json = nlohmann::ordered_json;

std::string ReadFile(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view data);

std::vector<Json> ReadJsonl(const std::filesystem::path& path);
std::string ToJsonl(std::span<const Json> rows);
void WriteJsonl(const std::filesystem::path& path, std::span<const Json> rows);

// A delimited table with a header row. Quoting follows RFC 4180: fields may
// be wrapped in double quotes, doubled quotes escape, and quoted fields may
// span lines.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index or -1.
  int ColumnIndex(std::string_view name) const;
};

Table ParseDelimited(std::string_view data, char delimiter);
// Delimiter chosen by extension: ".tsv" uses tab, everything else comma.
Table ReadTable(const std::filesystem::path& path);

std::string CsvEscape(std::string_view field);

// Lowercase hex SHA-256.
std::string Sha256Hex(std::string_view data);

}  // namespace cnlg

#endif  // CNLG_IO_H_
