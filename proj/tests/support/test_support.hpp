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

#ifndef OFFMASK_TESTS_TEST_SUPPORT_HPP_
#define OFFMASK_TESTS_TEST_SUPPORT_HPP_

#include <gtest/gtest.h>

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "offmask/error.hpp"
#include "offmask/tokenizer.hpp"

#ifndef OFFMASK_FIXTURE_DIR
#error "OFFMASK_FIXTURE_DIR must be defined by the build"
#endif

namespace offmask::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(OFFMASK_FIXTURE_DIR) / name;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("offmask-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::shared_ptr<const Vocabulary> vocab_of(std::vector<std::string> words) {
  std::vector<std::string> tokens{"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
  tokens.insert(tokens.end(), words.begin(), words.end());
  return std::make_shared<const Vocabulary>(std::move(tokens));
}

}  // namespace offmask::testing

/// Asserts that `stmt` throws offmask::Error carrying `code`.
#define EXPECT_OFFMASK_ERROR(stmt, expected_code)                                   \
  do {                                                                              \
    try {                                                                           \
      stmt;                                                                         \
      ADD_FAILURE() << "expected " << offmask::to_string(expected_code) << " from " \
                    << #stmt;                                                       \
    } catch (const offmask::Error& e) {                                             \
      EXPECT_EQ(e.code(), expected_code) << e.what();                               \
    }                                                                               \
  } while (0)

#endif  // OFFMASK_TESTS_TEST_SUPPORT_HPP_
