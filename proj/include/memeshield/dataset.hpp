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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "memeshield/util.hpp"

namespace memeshield {

enum class SplitName { train, dev_seen, test_seen, dev_unseen, test_unseen };

std::string_view to_string(SplitName split);
/// Throws Error(InvalidInput) for names outside the five HMC splits.
SplitName parse_split_name(std::string_view name);
/// Record count of the official HMC release for this split.
std::size_t expected_count(SplitName split);

struct MemeRecord {
  std::string id;
  std::string image_path;  // relative to the dataset root
  std::string text;        // overlaid text; doubles as OCR text
  std::optional<int> label;

  bool operator==(const MemeRecord&) const = default;
};

struct Split {
  SplitName name = SplitName::dev_seen;
  std::vector<MemeRecord> records;
  /// Non-fatal load diagnostics (e.g. record count differs from the release).
  std::vector<std::string> warnings;

  const MemeRecord* find(std::string_view id) const;
};

struct ImageData {
  Bytes bytes;
  std::string mime;
};

/// Path of the JSONL file backing `split` under `root` (e.g. root/dev_seen.jsonl).
std::filesystem::path split_file(const std::filesystem::path& root, SplitName split);

/// Parses one HMC JSONL line. Integer ids become decimal strings.
/// Throws Error(ParseError) on malformed input; `line_no` is reported in the message.
MemeRecord parse_record_line(std::string_view line, std::size_t line_no);
std::string to_jsonl_line(const MemeRecord& record);

Split load_split(const std::filesystem::path& root, SplitName split);
Split load_split_file(const std::filesystem::path& file, SplitName split);
std::string to_jsonl(const Split& split);

/// Detects PNG/JPEG from magic bytes; the file extension is ignored.
std::optional<std::string> sniff_image_mime(std::span<const std::uint8_t> bytes);
ImageData resolve_image(const MemeRecord& record, const std::filesystem::path& root);

/// Records with label 1, in order. Throws Error(MissingLabel) if any record is unlabeled.
std::vector<MemeRecord> filter_hateful(const Split& split);

}  // namespace memeshield
