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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memeshield/gateway.hpp"
#include "memeshield/prompt.hpp"

namespace memeshield {

enum class VerdictValue { Hateful, NonHateful, Abstain };

/// Parser rules, tried in order:
///   R1  last line of the form `Classification: Hateful|Not Hateful`
///   R2  the last hateful / not-hateful marker anywhere in the text
///   R3  explicit conclusion phrases ("... is not hate speech")
///   R4  fallback, yields Abstain
enum class ParseRule { R1, R2, R3, R4 };

std::string_view to_string(VerdictValue value);
VerdictValue parse_verdict_value(std::string_view name);
std::string_view to_string(ParseRule rule);
ParseRule parse_rule_id(std::string_view name);

struct Verdict {
  VerdictValue value = VerdictValue::Abstain;
  std::string rationale;  // response minus the R1 classification line
  ParseRule matched_rule = ParseRule::R4;

  bool operator==(const Verdict&) const = default;
};

/// Total and deterministic; never throws.
Verdict parse_verdict(std::string_view response_text);

enum class TieBreak { hateful, non_hateful };

struct TrialAggregate {
  int predicted_label = 0;
  double score = 0.5;  // hateful votes / non-abstaining votes
  bool low_confidence = true;

  bool operator==(const TrialAggregate&) const = default;
};

/// Majority vote over k trials. Abstains leave the denominator; all-abstain
/// gives score 0.5, label 0. A 0.5 score with at least one vote goes to
/// `tie`. Throws Error(TrialCountMismatch) if verdicts.size() != k.
TrialAggregate aggregate_trials(std::span<const VerdictValue> verdicts, int k,
                                TieBreak tie = TieBreak::hateful);
TrialAggregate aggregate_trials(std::span<const Verdict> verdicts, int k,
                                TieBreak tie = TieBreak::hateful);

struct Trial {
  ChatExchange exchange;
  Verdict verdict;
};

struct DetectionConfig {
  PromptTier tier = PromptTier::complete;
  int trials_k = 5;
  bool use_ocr = false;
  TieBreak tie = TieBreak::hateful;
  InferenceConfig inference;
};

struct DetectionResult {
  std::string meme_id;
  std::vector<Trial> trials;
  int predicted_label = 0;
  double score = 0.5;
  bool low_confidence = true;
  DetectionConfig config;
};

}  // namespace memeshield
