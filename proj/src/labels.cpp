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

#include "offmask/labels.hpp"

#include "offmask/error.hpp"
#include "offmask/io.hpp"

namespace offmask {

std::string_view to_string(Label y) noexcept { return y == Label::OFF ? "OFF" : "NOT"; }

LabelMap LabelMap::defaults() {
  LabelMap m;
  m.set("NOT", Label::NOT);
  m.set("OFF", Label::OFF);
  // HatEval HS flag
  m.set("0", Label::NOT);
  m.set("1", Label::OFF);
  // TRAC-1 aggression levels
  m.set("NAG", Label::NOT);
  m.set("CAG", Label::OFF);
  m.set("OAG", Label::OFF);
  return m;
}

LabelMap LabelMap::load(const std::filesystem::path& path) {
  LabelMap m;
  const auto lines = io::split_lines(io::read_file(path));
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto& line = lines[n];
    if (line.empty() || line.front() == '#') continue;
    const auto fields = io::split_tabs(line);
    const std::string where = path.string() + ":" + std::to_string(n + 1);
    if (fields.size() != 2) {
      throw Error(ErrorCode::MalformedInput, where + ": expected source_label<TAB>NOT|OFF");
    }
    if (fields[1] == "NOT") {
      m.set(fields[0], Label::NOT);
    } else if (fields[1] == "OFF") {
      m.set(fields[0], Label::OFF);
    } else {
      throw Error(ErrorCode::MalformedInput, where + ": target must be NOT or OFF");
    }
  }
  return m;
}

bool LabelMap::contains(std::string_view source) const {
  return map_.find(source) != map_.end();
}

Label homogenize_label(std::string_view raw, const LabelMap& map) {
  const auto it = map.map_.find(raw);
  if (it == map.map_.end()) {
    throw Error(ErrorCode::UnknownLabel, "no mapping for source label '" + std::string(raw) + "'");
  }
  return it->second;
}

}  // namespace offmask
