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

#ifndef OFFMASK_LABELS_HPP_
#define OFFMASK_LABELS_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace offmask {

/// Binary target. Values double as row indices into per-class arrays.
enum class Label : int { NOT = 0, OFF = 1 };

inline constexpr int kNumClasses = 2;

constexpr int index_of(Label y) noexcept { return static_cast<int>(y); }
constexpr Label other(Label y) noexcept { return y == Label::NOT ? Label::OFF : Label::NOT; }
std::string_view to_string(Label y) noexcept;

/// Maps heterogeneous source labels onto NOT/OFF.
class LabelMap {
 public:
  LabelMap() = default;

  /// NOT/OFF identity, HatEval HS values 0/1, TRAC-1 NAG/CAG/OAG.
  static LabelMap defaults();
  /// TSV `source_label<TAB>NOT|OFF`; blank lines and `#` comments skipped.
  static LabelMap load(const std::filesystem::path& path);

  void set(std::string source, Label target) { map_[std::move(source)] = target; }
  bool contains(std::string_view source) const;
  std::size_t size() const noexcept { return map_.size(); }

 private:
  friend Label homogenize_label(std::string_view raw, const LabelMap& map);
  std::map<std::string, Label, std::less<>> map_;
};

/// Throws UnknownLabel when `raw` has no entry.
Label homogenize_label(std::string_view raw, const LabelMap& map);

}  // namespace offmask

#endif  // OFFMASK_LABELS_HPP_
