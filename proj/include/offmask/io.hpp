// Copyright 2026 The offmask Authors
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

#ifndef OFFMASK_IO_HPP_
#define OFFMASK_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace offmask::io {

/// Whole-file read; IoFailure names the path.
std::string read_file(const std::filesystem::path& path);

/// Writes through a sibling temp file and renames it into place, so a
/// failed write never leaves a partial `path` behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Lines without their terminators; a trailing '\r' is stripped.
std::vector<std::string> split_lines(std::string_view text);
std::vector<std::string> split_tabs(std::string_view line);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// 17 significant digits; parses back to the identical double.
std::string format_double(double value);

}  // namespace offmask::io

#endif  // OFFMASK_IO_HPP_
