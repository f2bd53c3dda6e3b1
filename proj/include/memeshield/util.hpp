/*
 * Copyright 2026 The MemeShield Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace memeshield {

using Bytes = std::vector<std::uint8_t>;

/// Incremental SHA-256. Fields added through `field()` are length-prefixed so
/// ("ab","c") and ("a","bc") never collide.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(std::span<const std::uint8_t> data);
  Sha256& update(std::string_view data);
  Sha256& field(std::string_view data);
  Sha256& field(std::span<const std::uint8_t> data);
  std::string hex_digest();

 private:
  struct State;
  std::unique_ptr<State> state_;
};

std::string sha256_hex(std::string_view data);

std::string base64_encode(std::span<const std::uint8_t> data);

Bytes read_file_bytes(const std::filesystem::path& path);
std::string read_file_text(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it over `path`; readers never
/// observe a half-written file. Throws Error(StorageError).
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Shortest round-trip decimal form ("0.6", "1", "0.875").
std::string format_double(double value);

std::string utc_timestamp_now();

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);

}  // namespace memeshield
