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

#include "memeshield/correction.hpp"

#include <json.hpp>

#include "memeshield/detector.hpp"
#include "memeshield/errors.hpp"
#include "memeshield/prompt.hpp"
#include "memeshield/util.hpp"

namespace memeshield {

using ojson = nlohmann::ordered_json;

namespace {

constexpr std::string_view kLeftQuote = "\xE2\x80\x9C";
constexpr std::string_view kRightQuote = "\xE2\x80\x9D";

std::string strip_markup(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c != '*' && c != '`') out += c;
  }
  return trim(out);
}

std::string strip_quotes(std::string s) {
  s = trim(s);
  auto strip_pair = [&s](std::string_view open, std::string_view close) {
    if (s.size() >= open.size() + close.size() && s.starts_with(open) && s.ends_with(close)) {
      s = trim(s.substr(open.size(), s.size() - open.size() - close.size()));
      return true;
    }
    return false;
  };
  while (strip_pair("\"", "\"") || strip_pair(kLeftQuote, kRightQuote) || strip_pair("'", "'")) {
  }
  return s;
}

// Remainder after "new text:" when the line is a contract line.
std::optional<std::string> contract_value(std::string_view line) {
  std::string cleaned = strip_markup(line);
  std::size_t i = 0;
  while (i < cleaned.size() && (cleaned[i] == '-' || cleaned[i] == '>' || cleaned[i] == '#' || cleaned[i] == ' ')) ++i;
  cleaned.erase(0, i);
  const std::string lower = to_lower(cleaned);
  if (!lower.starts_with("new text")) return std::nullopt;
  std::size_t j = 8;
  while (j < lower.size() && lower[j] == ' ') ++j;
  if (j >= lower.size() || lower[j] != ':') return std::nullopt;
  return strip_quotes(cleaned.substr(j + 1));
}

std::string longest_quoted(std::string_view text) {
  std::string best;
  auto scan = [&](std::string_view open, std::string_view close) {
    std::size_t pos = 0;
    while (true) {
      const auto a = text.find(open, pos);
      if (a == std::string_view::npos) return;
      const auto b = text.find(close, a + open.size());
      if (b == std::string_view::npos) return;
      std::string inner = trim(text.substr(a + open.size(), b - a - open.size()));
      if (inner.size() > best.size()) best = std::move(inner);
      pos = b + close.size();
    }
  };
  scan("\"", "\"");
  scan(kLeftQuote, kRightQuote);
  return best;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

}  // namespace

std::string_view to_string(CorrectionStatus status) {
  switch (status) {
    case CorrectionStatus::verified_nonhateful: return "verified_nonhateful";
    case CorrectionStatus::verification_failed: return "verification_failed";
    case CorrectionStatus::generation_failed: return "generation_failed";
  }
  return "generation_failed";
}

CorrectionStatus parse_correction_status(std::string_view name) {
  if (name == "verified_nonhateful") return CorrectionStatus::verified_nonhateful;
  if (name == "verification_failed") return CorrectionStatus::verification_failed;
  if (name == "generation_failed") return CorrectionStatus::generation_failed;
  throw Error(Errc::ParseError, "unknown correction status '" + std::string(name) + "'");
}

std::string extract_new_text(std::string_view response) {
  const auto lines = lines_of(response);
  for (std::size_t i = lines.size(); i-- > 0;) {
    auto value = contract_value(lines[i]);
    if (!value) continue;
    if (!value->empty()) return *value;
    // "New text:" on its own line, replacement on the next non-blank line.
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      std::string next = strip_quotes(strip_markup(lines[j]));
      if (!next.empty()) return next;
    }
  }
  if (auto quoted = longest_quoted(response); !quoted.empty()) return quoted;
  throw Error(Errc::ExtractionFailed, "reply has neither a 'New text:' line nor a quoted string");
}

GeneratedText generate_text(const MemeRecord& record, const ImageData& image, VlmGateway& gateway,
                            const InferenceConfig& config, int attempt_index) {
  if (record.label && *record.label == 0) {
    throw Error(Errc::InvalidInput, "meme " + record.id + " is labeled non-hateful");
  }
  const auto exchange = gateway.complete(build_correction_prompt(), image, config, attempt_index);
  return {extract_new_text(exchange.response_text), exchange.response_text, exchange.request_digest};
}

CorrectionCandidate correct_meme(const MemeRecord& record, const ImageData& image,
                                 VlmGateway& gateway, const CorrectionConfig& config) {
  if (config.budget < 1) throw Error(Errc::InvalidConfig, "correction budget must be >= 1");
  DetectionConfig verify = config.verification;
  verify.tier = PromptTier::complete;
  verify.use_ocr = true;

  if (record.label && *record.label == 0) {
    throw Error(Errc::InvalidInput, "meme " + record.id + " is labeled non-hateful");
  }
  const PromptText correction_prompt = build_correction_prompt();

  CorrectionCandidate c;
  c.meme_id = record.id;
  c.image_path = record.image_path;
  c.original_text = record.text;
  bool generated_any = false;

  for (int attempt = 0; attempt < config.budget; ++attempt) {
    CorrectionAttempt a;
    a.index = attempt + 1;
    try {
      const auto exchange = gateway.complete(correction_prompt, image, verify.inference, attempt);
      a.raw_response = exchange.response_text;
      a.request_digest = exchange.request_digest;
      std::string text = extract_new_text(exchange.response_text);
      if (to_lower(trim(text)) == to_lower(trim(record.text))) {
        throw Error(Errc::ExtractionFailed, "rewrite is identical to the original text");
      }
      a.generated_text = std::move(text);
      a.verification = detect(record.id, image, a.generated_text, gateway, verify);
    } catch (const Error& e) {
      a.error = e.what();
    }
    c.attempts = a.index;
    if (!a.generated_text.empty()) {
      generated_any = true;
      c.generated_text = a.generated_text;
      c.raw_response = a.raw_response;
      c.verification = a.verification;
    }
    const bool verified = a.verification && a.verification->predicted_label == 0;
    c.history.push_back(std::move(a));
    if (verified) {
      c.status = CorrectionStatus::verified_nonhateful;
      return c;
    }
  }
  if (generated_any) {
    c.status = CorrectionStatus::verification_failed;
  } else {
    c.status = CorrectionStatus::generation_failed;
    if (!c.history.empty()) c.raw_response = c.history.back().raw_response;
  }
  return c;
}

namespace {

ojson verification_json(const std::optional<DetectionResult>& v) {
  if (!v) return nullptr;
  return ojson::parse(detection_result_to_json(*v));
}

std::optional<DetectionResult> verification_from(const ojson& j) {
  if (j.is_null()) return std::nullopt;
  return detection_result_from_json(j.dump());
}

}  // namespace

std::string candidate_to_json(const CorrectionCandidate& c) {
  ojson j;
  j["meme_id"] = c.meme_id;
  j["image_path"] = c.image_path;
  j["original_text"] = c.original_text;
  j["generated_text"] = c.generated_text;
  j["status"] = to_string(c.status);
  j["attempts"] = c.attempts;
  j["raw_response"] = c.raw_response;
  j["verification"] = verification_json(c.verification);
  ojson history = ojson::array();
  for (const auto& a : c.history) {
    history.push_back({{"index", a.index},
                       {"generated_text", a.generated_text},
                       {"raw_response", a.raw_response},
                       {"request_digest", a.request_digest},
                       {"verification", verification_json(a.verification)},
                       {"error", a.error}});
  }
  j["history"] = std::move(history);
  return j.dump();
}

CorrectionCandidate candidate_from_json(std::string_view line) {
  try {
    const auto j = ojson::parse(line);
    CorrectionCandidate c;
    c.meme_id = j.at("meme_id").get<std::string>();
    c.image_path = j.value("image_path", "");
    c.original_text = j.at("original_text").get<std::string>();
    c.generated_text = j.at("generated_text").get<std::string>();
    c.status = parse_correction_status(j.at("status").get<std::string>());
    c.attempts = j.at("attempts").get<int>();
    c.raw_response = j.value("raw_response", "");
    if (j.contains("verification")) c.verification = verification_from(j.at("verification"));
    if (j.contains("history")) {
      for (const auto& h : j.at("history")) {
        CorrectionAttempt a;
        a.index = h.at("index").get<int>();
        a.generated_text = h.value("generated_text", "");
        a.raw_response = h.value("raw_response", "");
        a.request_digest = h.value("request_digest", "");
        if (h.contains("verification")) a.verification = verification_from(h.at("verification"));
        a.error = h.value("error", "");
        c.history.push_back(std::move(a));
      }
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("correction candidate: ") + e.what());
  }
}

}  // namespace memeshield
