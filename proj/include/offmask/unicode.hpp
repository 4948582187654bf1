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

#ifndef OFFMASK_UNICODE_HPP_
#define OFFMASK_UNICODE_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace offmask::unicode {

/// Decodes UTF-8. Malformed sequences decode to U+FFFD, one per bad byte.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view text);
void append(std::string& out, char32_t cp);

bool is_whitespace(char32_t cp) noexcept;
/// ASCII symbols and punctuation plus the common Unicode punctuation blocks
/// (Latin-1, General Punctuation, CJK, Arabic).
bool is_punctuation(char32_t cp) noexcept;
/// U+1F300..U+1FAFF, U+2600..U+27BF, and the joiners U+FE0F / U+200D.
bool is_emoji(char32_t cp) noexcept;
bool is_ascii_digit(char32_t cp) noexcept;
/// ASCII, Arabic-Indic (U+0660..) and Extended Arabic-Indic (U+06F0..) digits.
bool is_digit(char32_t cp) noexcept;
bool is_ascii_upper(char32_t cp) noexcept;
bool is_ascii_lower(char32_t cp) noexcept;
char32_t ascii_lower(char32_t cp) noexcept;

/// Splits on Unicode whitespace, dropping empty pieces.
std::vector<std::u32string> split_whitespace(std::u32string_view text);
std::u32string join(const std::vector<std::u32string>& words, char32_t sep = U' ');
/// Collapses whitespace runs to one ASCII space and trims both ends.
std::u32string collapse_whitespace(std::u32string_view text);

}  // namespace offmask::unicode

#endif  // OFFMASK_UNICODE_HPP_
