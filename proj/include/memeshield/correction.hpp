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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "memeshield/dataset.hpp"
#include "memeshield/gateway.hpp"
#include "memeshield/verdict.hpp"

namespace memeshield {

enum class CorrectionStatus { verified_nonhateful, verification_failed, generation_failed };

std::string_view to_string(CorrectionStatus status);
CorrectionStatus parse_correction_status(std::string_view name);

struct CorrectionAttempt {
  int index = 1;  // 1-based
  std::string generated_text;
  std::string raw_response;
  std::string request_digest;  // of the generation request
  std::optional<DetectionResult> verification;
  std::string error;  // empty when the attempt ran to completion
};

struct CorrectionCandidate {
  std::string meme_id;
  std::string image_path;  // unchanged from the record; only text is rewritten
  std::string original_text;
  std::string generated_text;
  std::string raw_response;
  std::optional<DetectionResult> verification;
  int attempts = 0;
  CorrectionStatus status = CorrectionStatus::generation_failed;
  std::vector<CorrectionAttempt> history;
};

struct GeneratedText {
  std::string text;
  std::string raw_response;
  std::string request_digest;
};

/// Pulls the replacement text out of a correction reply: the last
/// `New text:` line, else the longest quoted string.
/// Throws Error(ExtractionFailed) when neither exists.
std::string extract_new_text(std::string_view response);

/// One correction request for `record` (attempt_index salts the request
/// digest). Gateway errors propagate.
GeneratedText generate_text(const MemeRecord& record, const ImageData& image, VlmGateway& gateway,
                            const InferenceConfig& config, int attempt_index = 0);

struct CorrectionConfig {
  int budget = 3;
  /// Settings for verifying a rewrite. The tier is always complete and the
  /// rewrite is always injected as OCR text.
  DetectionConfig verification;
};

/// Generates up to `budget` rewrites, verifying each by running detection on
/// (image, rewrite); stops at the first rewrite predicted non-hateful.
/// Per-attempt failures are recorded, never thrown.
CorrectionCandidate correct_meme(const MemeRecord& record, const ImageData& image,
                                 VlmGateway& gateway, const CorrectionConfig& config);

/// corrections.jsonl line and its inverse.
std::string candidate_to_json(const CorrectionCandidate& candidate);
CorrectionCandidate candidate_from_json(std::string_view line);

}  // namespace memeshield
