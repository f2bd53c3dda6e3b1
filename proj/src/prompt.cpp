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

#include "memeshield/prompt.hpp"

#include <utility>

#include "memeshield/errors.hpp"
#include "memeshield/util.hpp"

namespace memeshield {

namespace {

struct Asset {
  std::string_view name;
  std::string_view text;
};

constexpr Asset kAssets[] = {
#include "prompt_assets.inc"
};

constexpr std::pair<PromptSection, std::string_view> kSectionHeadings[] = {
    {PromptSection::visual_description, "## Visual description"},
    {PromptSection::embedded_text, "## Embedded text"},
    {PromptSection::hatefulness_definition, "## Hatefulness definition"},
    {PromptSection::classification_criteria, "## Classification criteria"},
    {PromptSection::output_contract, "## Output format"},
};

std::string join_blocks(std::initializer_list<std::string_view> blocks) {
  std::string out;
  for (auto b : blocks) {
    if (b.empty()) continue;
    if (!out.empty()) out += "\n\n";
    out += b;
  }
  return out;
}

std::string_view tier_asset(PromptTier tier) {
  switch (tier) {
    case PromptTier::naive: return template_asset("detect_naive");
    case PromptTier::detailed: return template_asset("detect_detailed");
    case PromptTier::complete: return template_asset("detect_complete");
  }
  return {};
}

}  // namespace

std::string_view to_string(PromptTier tier) {
  switch (tier) {
    case PromptTier::naive: return "naive";
    case PromptTier::detailed: return "detailed";
    case PromptTier::complete: return "complete";
  }
  return "unknown";
}

PromptTier parse_prompt_tier(std::string_view name) {
  if (name == "naive") return PromptTier::naive;
  if (name == "detailed") return PromptTier::detailed;
  if (name == "complete") return PromptTier::complete;
  throw Error(Errc::InvalidInput, "unknown prompt tier '" + std::string(name) + "'");
}

std::string_view template_asset(std::string_view name) {
  for (const auto& a : kAssets) {
    if (a.name == name) return a.text;
  }
  throw Error(Errc::NotFound, "no prompt template named '" + std::string(name) + "'");
}

std::vector<std::string> template_asset_names() {
  std::vector<std::string> out;
  for (const auto& a : kAssets) out.emplace_back(a.name);
  return out;
}

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) break;
    const auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    out.append(tmpl.substr(pos, open - pos));
    const std::string key(tmpl.substr(open + 2, close - open - 2));
    if (auto it = vars.find(key); it != vars.end()) {
      out += it->second;
    } else {
      out.append(tmpl.substr(open, close + 2 - open));
    }
    pos = close + 2;
  }
  out.append(tmpl.substr(pos));
  return out;
}

PromptText build_detection_prompt(PromptTier tier, std::optional<std::string_view> ocr_text) {
  if (ocr_text && trim(*ocr_text).empty()) {
    throw Error(Errc::EmptyOcr, "OCR text is blank");
  }
  PromptText p;
  p.system = std::string(template_asset("system_detect"));
  p.output_contract = std::string(template_asset("detect_contract"));
  std::string ocr_block;
  if (ocr_text) {
    ocr_block = render_template(template_asset("ocr_block"), {{"ocr_text", std::string(*ocr_text)}});
    p.ocr_injected = true;
  }
  p.user = join_blocks({tier_asset(tier), ocr_block, p.output_contract});
  return p;
}

PromptText build_correction_prompt() {
  PromptText p;
  p.system = std::string(template_asset("system_correct"));
  p.output_contract = std::string(template_asset("correct_contract"));
  p.user = join_blocks({template_asset("correct"), p.output_contract});
  return p;
}

std::vector<PromptSection> sections_present(const PromptText& prompt) {
  std::vector<PromptSection> out;
  for (const auto& [section, heading] : kSectionHeadings) {
    if (prompt.user.find(heading) != std::string::npos) out.push_back(section);
  }
  return out;
}

std::string prompt_hash(const PromptText& prompt) {
  return Sha256{}.field(kTemplateVersion).field(prompt.system).field(prompt.user).hex_digest();
}

std::string detection_template_hash(PromptTier tier, bool use_ocr) {
  const auto p = build_detection_prompt(
      tier, use_ocr ? std::optional<std::string_view>(kOcrPlaceholder) : std::nullopt);
  return prompt_hash(p);
}

std::string correction_template_hash() { return prompt_hash(build_correction_prompt()); }

}  // namespace memeshield
