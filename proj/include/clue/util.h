// Copyright 2026 The CLUE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CLUE_UTIL_H_
#define CLUE_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace clue {

// Lowercase hex SHA-256 of `data`.
std::string Sha256Hex(std::string_view data);

// Derives an independent 64-bit seed for a named stage from the root seed.
// Stable across platforms and releases.
uint64_t SplitSeed(uint64_t root_seed, std::string_view stage);

std::string ReadFile(const std::filesystem::path& path);

// Writes through a temporary sibling file and renames it into place, so
// readers never observe a partially written file.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view data);

// Splits on '\n', keeping line numbers implicit (index + 1). Blank lines are
// returned as empty strings so callers can report accurate line numbers.
std::vector<std::string> SplitLines(std::string_view text);

std::string Trim(std::string_view s);

// Number of UTF-8 code points; invalid bytes count as one each.
size_t Utf8Length(std::string_view s);

}  // namespace clue

#endif  // CLUE_UTIL_H_
