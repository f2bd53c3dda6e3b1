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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace memeshield {

/// Instruction level of a detection prompt, from a bare question up to the
/// full definition-and-criteria prompt.
enum class PromptTier { naive, detailed, complete };

std::string_view to_string(PromptTier tier);
PromptTier parse_prompt_tier(std::string_view name);

/// Sections a detection prompt may carry. Each tier's set contains the
/// previous tier's set.
enum class PromptSection {
  visual_description,
  embedded_text,
  hatefulness_definition,
  classification_criteria,
  output_contract,
};

struct PromptText {
  std::string system;
  std::string user;             // full user turn, output contract included
  std::string output_contract;  // the required final-line format on its own
  bool ocr_injected = false;

  bool operator==(const PromptText&) const = default;
};

inline constexpr std::string_view kTemplateVersion = "v1";
inline constexpr std::string_view kOcrPlaceholder = "{{ocr_text}}";

/// Raw template asset by file stem (e.g. "detect_complete"). Throws
/// Error(NotFound) for unknown names.
std::string_view template_asset(std::string_view name);
std::vector<std::string> template_asset_names();

/// Replaces each `{{name}}` with its value in one left-to-right pass.
/// Substituted values are copied verbatim and never rescanned, so a value
/// containing `{{...}}` stays literal. Unknown placeholders are left as-is.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars);

/// Throws Error(EmptyOcr) when `ocr_text` is present but blank.
PromptText build_detection_prompt(PromptTier tier, std::optional<std::string_view> ocr_text);
PromptText build_correction_prompt();

std::vector<PromptSection> sections_present(const PromptText& prompt);

/// Content hash of a concrete prompt (version, system and user text).
std::string prompt_hash(const PromptText& prompt);
/// Hash of the detection template for (tier, ocr flag) with the OCR
/// placeholder left unrendered; stable across memes of a run.
std::string detection_template_hash(PromptTier tier, bool use_ocr);
std::string correction_template_hash();

}  // namespace memeshield
