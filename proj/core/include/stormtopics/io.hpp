// Copyright 2026 The stormtopics Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace stormtopics {

// Whole-file read; throws InputError if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Writes to "<path>.partial" and renames into place, so a crash never leaves
// a truncated file under the final name.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::span<const std::byte> bytes);
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Shortest decimal form that parses back to the same double; "nan" for NaN.
std::string format_double(double value);

// RFC 4180 quoting when the field holds a comma, quote or line break.
std::string csv_field(std::string_view field);

}  // namespace stormtopics
