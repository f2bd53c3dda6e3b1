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

#include "memeshield/dataset.hpp"

#include <array>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "memeshield/errors.hpp"

namespace memeshield {

namespace {

constexpr std::array<std::string_view, 5> kSplitNames = {"train", "dev_seen", "test_seen",
                                                         "dev_unseen", "test_unseen"};
constexpr std::array<std::size_t, 5> kExpectedCounts = {8500, 500, 1000, 1000, 2000};

}  // namespace

std::string_view to_string(SplitName split) { return kSplitNames[static_cast<std::size_t>(split)]; }

SplitName parse_split_name(std::string_view name) {
  for (std::size_t i = 0; i < kSplitNames.size(); ++i) {
    if (kSplitNames[i] == name) return static_cast<SplitName>(i);
  }
  throw Error(Errc::InvalidInput, "unknown split '" + std::string(name) + "'");
}

std::size_t expected_count(SplitName split) { return kExpectedCounts[static_cast<std::size_t>(split)]; }

const MemeRecord* Split::find(std::string_view id) const {
  for (const auto& r : records) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

std::filesystem::path split_file(const std::filesystem::path& root, SplitName split) {
  return root / (std::string(to_string(split)) + ".jsonl");
}

MemeRecord parse_record_line(std::string_view line, std::size_t line_no) {
  auto fail = [line_no](const std::string& why) -> Error {
    return Error(Errc::ParseError, "line " + std::to_string(line_no) + ": " + why);
  };
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw fail(e.what());
  }
  if (!j.is_object()) throw fail("expected a JSON object");

  MemeRecord rec;
  const auto id = j.find("id");
  if (id == j.end()) throw fail("missing 'id'");
  if (id->is_string()) {
    rec.id = id->get<std::string>();
  } else if (id->is_number_unsigned() || id->is_number_integer()) {
    rec.id = std::to_string(id->get<long long>());
  } else {
    throw fail("'id' must be a string or integer");
  }
  if (rec.id.empty()) throw fail("empty 'id'");

  const auto img = j.find("img");
  if (img == j.end() || !img->is_string()) throw fail("missing or non-string 'img'");
  rec.image_path = img->get<std::string>();

  const auto text = j.find("text");
  if (text == j.end() || !text->is_string()) throw fail("missing or non-string 'text'");
  rec.text = text->get<std::string>();

  if (const auto label = j.find("label"); label != j.end() && !label->is_null()) {
    if (!label->is_number_integer()) throw fail("'label' must be 0 or 1");
    const auto v = label->get<long long>();
    if (v != 0 && v != 1) throw fail("'label' must be 0 or 1");
    rec.label = static_cast<int>(v);
  }
  return rec;
}

std::string to_jsonl_line(const MemeRecord& record) {
  // nlohmann orders keys alphabetically, which is also the HMC order: id, img, label, text.
  nlohmann::json j = {{"id", record.id}, {"img", record.image_path}, {"text", record.text}};
  if (record.label) j["label"] = *record.label;
  return j.dump();
}

Split load_split_file(const std::filesystem::path& file, SplitName split) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(Errc::DatasetNotFound, "no split file at " + file.string());

  Split out;
  out.name = split;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    MemeRecord rec = parse_record_line(line, line_no);
    if (!seen.insert(rec.id).second) {
      throw Error(Errc::DuplicateId, "id '" + rec.id + "' repeated at line " + std::to_string(line_no));
    }
    out.records.push_back(std::move(rec));
  }
  if (out.records.size() != expected_count(split)) {
    out.warnings.push_back(std::string(to_string(split)) + ": loaded " +
                           std::to_string(out.records.size()) + " records, official release has " +
                           std::to_string(expected_count(split)));
  }
  return out;
}

Split load_split(const std::filesystem::path& root, SplitName split) {
  return load_split_file(split_file(root, split), split);
}

std::string to_jsonl(const Split& split) {
  std::string out;
  for (const auto& r : split.records) {
    out += to_jsonl_line(r);
    out += '\n';
  }
  return out;
}

std::optional<std::string> sniff_image_mime(std::span<const std::uint8_t> bytes) {
  static constexpr std::array<std::uint8_t, 8> kPng = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  if (bytes.size() >= kPng.size() && std::equal(kPng.begin(), kPng.end(), bytes.begin())) {
    return "image/png";
  }
  if (bytes.size() >= 3 && bytes[0] == 0xff && bytes[1] == 0xd8 && bytes[2] == 0xff) {
    return "image/jpeg";
  }
  return std::nullopt;
}

ImageData resolve_image(const MemeRecord& record, const std::filesystem::path& root) {
  const auto path = root / record.image_path;
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(Errc::ImageNotFound, "meme " + record.id + ": " + path.string());
  }
  ImageData image;
  try {
    image.bytes = read_file_bytes(path);
  } catch (const Error&) {
    throw Error(Errc::ImageNotFound, "meme " + record.id + ": cannot read " + path.string());
  }
  auto mime = sniff_image_mime(image.bytes);
  if (!mime) throw Error(Errc::UnsupportedImage, "meme " + record.id + ": " + path.string());
  image.mime = std::move(*mime);
  return image;
}

std::vector<MemeRecord> filter_hateful(const Split& split) {
  std::vector<MemeRecord> out;
  for (const auto& r : split.records) {
    if (!r.label) throw Error(Errc::MissingLabel, "meme " + r.id + " has no label");
    if (*r.label == 1) out.push_back(r);
  }
  return out;
}

}  // namespace memeshield
