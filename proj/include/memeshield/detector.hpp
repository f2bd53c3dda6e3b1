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

#include "memeshield/dataset.hpp"
#include "memeshield/gateway.hpp"
#include "memeshield/verdict.hpp"

namespace memeshield {

/// Runs `config.trials_k` sequential trials of the detection prompt on one
/// image and aggregates their verdicts. `ocr_text`, when set, is injected
/// into the prompt regardless of `config.use_ocr`.
DetectionResult detect(std::string meme_id, const ImageData& image,
                       std::optional<std::string_view> ocr_text, VlmGateway& gateway,
                       const DetectionConfig& config);

/// Detection on a dataset record; the record's text is injected when
/// `config.use_ocr` is set.
DetectionResult detect_meme(const MemeRecord& record, const ImageData& image, VlmGateway& gateway,
                            const DetectionConfig& config);

/// One JSONL line (no trailing newline) and its inverse. Per-trial logs carry
/// the parser rule id and the verbatim response.
std::string detection_result_to_json(const DetectionResult& result);
DetectionResult detection_result_from_json(std::string_view line);

}  // namespace memeshield
