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

#ifndef CNLG_TEXT_H_
#define CNLG_TEXT_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cnlg {

std::string ToLower(std::string_view s);
std::string_view Trim(std::string_view s);

// Words are maximal runs of non-whitespace; punctuation stays attached.
std::vector<std::string> SplitWords(std::string_view text);

// Collapses every whitespace run to one space and trims both ends.
std::string NormalizeWhitespace(std::string_view text);

std::string Join(std::span<const std::string> parts, std::string_view sep);

std::vector<std::string> Split(std::string_view s, char sep);

// True when some adjacent word pair occurs twice in `words`.
bool HasRepeatedBigram(std::span<const std::string> words);

}  // namespace cnlg

#endif  // CNLG_TEXT_H_
