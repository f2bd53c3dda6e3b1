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

#include "memeshield/verdict.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <regex>

#include "memeshield/errors.hpp"
#include "memeshield/util.hpp"

namespace memeshield {

namespace {

// Lowercases and folds typographic apostrophes to '\''.
std::string normalize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.compare(i, 3, "\xE2\x80\x99") == 0 || text.compare(i, 3, "\xE2\x80\x98") == 0) {
      out += '\'';
      i += 2;
      continue;
    }
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

bool is_classification_line(std::string_view line, bool& hateful) {
  static const std::regex kLine(
      R"(^[\s#>\-.\[\("']*(?:final\s+)?classification\s*[:\-]\s*["'\[\(]*\s*(not\s+|non[\s\-]*)?hateful\s*["'\]\).!]*\s*$)");
  std::string cleaned;
  for (char c : normalize(line)) {
    if (c != '*' && c != '_' && c != '`') cleaned += c;
  }
  std::smatch m;
  if (!std::regex_match(cleaned, m, kLine)) return false;
  hateful = !m[1].matched;
  return true;
}


std::vector<std::string> tokenize(std::string_view normalized) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : normalized) {
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'') {
      cur += c;
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

// Polarity of the last hateful marker, if any. A "hateful" token is negated
// when "not", "non" or "isn't" occurs within the three preceding tokens, and
// ignored when "whether" or "if" does (it is the question, not an answer).
std::optional<VerdictValue> last_marker(std::string_view normalized) {
  static constexpr std::array<std::string_view, 3> kNegators = {"not", "non", "isn't"};
  static constexpr std::array<std::string_view, 2> kQuestion = {"whether", "if"};
  const auto tokens = tokenize(normalized);
  for (std::size_t i = tokens.size(); i-- > 0;) {
    const auto& tok = tokens[i];
    if (tok == "nonhateful") return VerdictValue::NonHateful;
    if (tok != "hateful") continue;
    bool negated = false;
    bool question = false;
    for (std::size_t j = i >= 3 ? i - 3 : 0; j < i; ++j) {
      const auto& prev = tokens[j];
      negated |= std::find(kNegators.begin(), kNegators.end(), prev) != kNegators.end();
      question |= std::find(kQuestion.begin(), kQuestion.end(), prev) != kQuestion.end();
    }
    if (question) continue;
    return negated ? VerdictValue::NonHateful : VerdictValue::Hateful;
  }
  return std::nullopt;
}

std::optional<VerdictValue> conclusion_phrase(std::string_view normalized) {
  static const std::regex kPositive(
      R"(\bthis meme is hateful\b|\b(?:is|constitutes|contains|considered)\s+(?:a\s+form\s+of\s+)?hate\s+speech\b|\bpromotes\s+(?:hate|hatred)\b)");
  static const std::regex kNegative(
      R"(\bthis meme is not hateful\b|\bnot\s+(?:be\s+)?considered\s+(?:a\s+form\s+of\s+)?hate\s+speech\b|\b(?:is\s+not|isn't|not|does\s+not\s+constitute|doesn't\s+constitute|does\s+not\s+contain|doesn't\s+contain)\s+(?:a\s+form\s+of\s+)?hate\s+speech\b|\bno\s+hate\s+speech\b|\b(?:does\s+not|doesn't)\s+promote\s+(?:hate|hatred)\b)");
  const std::string text(normalized);
  auto last_end = [&text](const std::regex& re) -> std::ptrdiff_t {
    std::ptrdiff_t pos = -1;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
      pos = it->position(0) + it->length(0);
    }
    return pos;
  };
  const auto pos = last_end(kPositive);
  const auto neg = last_end(kNegative);
  if (pos < 0 && neg < 0) return std::nullopt;
  // Compared by match end: "not considered hate speech" contains the
  // positive "considered hate speech" and must resolve negative.
  return neg >= pos ? VerdictValue::NonHateful : VerdictValue::Hateful;
}

}  // namespace

std::string_view to_string(VerdictValue value) {
  switch (value) {
    case VerdictValue::Hateful: return "Hateful";
    case VerdictValue::NonHateful: return "NonHateful";
    case VerdictValue::Abstain: return "Abstain";
  }
  return "Abstain";
}

VerdictValue parse_verdict_value(std::string_view name) {
  if (name == "Hateful") return VerdictValue::Hateful;
  if (name == "NonHateful") return VerdictValue::NonHateful;
  if (name == "Abstain") return VerdictValue::Abstain;
  throw Error(Errc::ParseError, "unknown verdict '" + std::string(name) + "'");
}

std::string_view to_string(ParseRule rule) {
  switch (rule) {
    case ParseRule::R1: return "R1";
    case ParseRule::R2: return "R2";
    case ParseRule::R3: return "R3";
    case ParseRule::R4: return "R4";
  }
  return "R4";
}

ParseRule parse_rule_id(std::string_view name) {
  if (name == "R1") return ParseRule::R1;
  if (name == "R2") return ParseRule::R2;
  if (name == "R3") return ParseRule::R3;
  if (name == "R4") return ParseRule::R4;
  throw Error(Errc::ParseError, "unknown parser rule '" + std::string(name) + "'");
}

Verdict parse_verdict(std::string_view response_text) {
  const auto lines = split_lines(response_text);
  for (std::size_t i = lines.size(); i-- > 0;) {
    bool hateful = false;
    if (!is_classification_line(lines[i], hateful)) continue;
    std::string rest;
    for (std::size_t j = 0; j < lines.size(); ++j) {
      if (j == i) continue;
      rest.append(lines[j]);
      rest += '\n';
    }
    return {hateful ? VerdictValue::Hateful : VerdictValue::NonHateful, trim(rest), ParseRule::R1};
  }

  const std::string normalized = normalize(response_text);
  if (auto v = last_marker(normalized)) return {*v, trim(response_text), ParseRule::R2};
  if (auto v = conclusion_phrase(normalized)) return {*v, trim(response_text), ParseRule::R3};
  return {VerdictValue::Abstain, trim(response_text), ParseRule::R4};
}

TrialAggregate aggregate_trials(std::span<const VerdictValue> verdicts, int k, TieBreak tie) {
  if (k <= 0) throw Error(Errc::InvalidInput, "k must be positive");
  if (verdicts.size() != static_cast<std::size_t>(k)) {
    throw Error(Errc::TrialCountMismatch, "expected " + std::to_string(k) + " verdicts, got " +
                                              std::to_string(verdicts.size()));
  }
  int hateful = 0;
  int valid = 0;
  for (auto v : verdicts) {
    if (v == VerdictValue::Abstain) continue;
    ++valid;
    if (v == VerdictValue::Hateful) ++hateful;
  }
  TrialAggregate out;
  if (valid == 0) {
    out.score = 0.5;
    out.predicted_label = 0;
    out.low_confidence = true;
    return out;
  }
  out.score = static_cast<double>(hateful) / valid;
  const bool tied = 2 * hateful == valid;
  if (tied) {
    out.predicted_label = tie == TieBreak::hateful ? 1 : 0;
  } else {
    out.predicted_label = 2 * hateful > valid ? 1 : 0;
  }
  out.low_confidence = tied || valid < (k + 1) / 2;
  return out;
}

TrialAggregate aggregate_trials(std::span<const Verdict> verdicts, int k, TieBreak tie) {
  std::vector<VerdictValue> values;
  values.reserve(verdicts.size());
  for (const auto& v : verdicts) values.push_back(v.value);
  return aggregate_trials(values, k, tie);
}

}  // namespace memeshield
