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

#include <doctest.h>

#include <algorithm>
#include <random>

#include "memeshield/errors.hpp"
#include "memeshield/prompt.hpp"

using namespace memeshield;

namespace {

bool contains(const std::string& haystack, std::string_view needle) {
  return haystack.find(needle) != std::string::npos;
}

bool is_subset(std::vector<PromptSection> a, std::vector<PromptSection> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST_CASE("complete tier carries the definition and the output contract") {
  const auto p = build_detection_prompt(PromptTier::complete, std::nullopt);
  CHECK(contains(p.user, "Classification:"));
  CHECK(contains(p.user, "## Hatefulness definition"));
  CHECK_FALSE(p.ocr_injected);
  const auto sections = sections_present(p);
  CHECK(sections.size() == 5);
  for (std::string_view term : {"ethnicity", "race", "nationality", "immigration status", "religion", "caste", "sex",
                                "gender identity", "sexual orientation", "disability", "disease"}) {
    CHECK_MESSAGE(contains(p.user, term), term);
  }
  CHECK(contains(p.output_contract, "Classification: Hateful"));
  CHECK(contains(p.output_contract, "Classification: Not Hateful"));
  CHECK(p.user.ends_with(p.output_contract));
}

TEST_CASE("naive tier is a single question") {
  const auto p = build_detection_prompt(PromptTier::naive, std::nullopt);
  CHECK(p.user.starts_with("Is this meme hateful?"));
  CHECK_FALSE(contains(p.user, "## Hatefulness definition"));
  CHECK(sections_present(p) == std::vector<PromptSection>{PromptSection::output_contract});
}

TEST_CASE("detailed tier asks to analyze parts separately") {
  const auto p = build_detection_prompt(PromptTier::detailed, std::nullopt);
  CHECK(contains(p.user, "Analyze the visual and textual parts separately"));
  CHECK_FALSE(contains(p.user, "## Hatefulness definition"));
  CHECK_FALSE(contains(p.user, "## Classification criteria"));
}

TEST_CASE("tier monotonicity") {
  const auto naive = sections_present(build_detection_prompt(PromptTier::naive, std::nullopt));
  const auto detailed = sections_present(build_detection_prompt(PromptTier::detailed, std::nullopt));
  const auto complete = sections_present(build_detection_prompt(PromptTier::complete, std::nullopt));
  CHECK(is_subset(naive, detailed));
  CHECK(is_subset(detailed, complete));
  CHECK(naive.size() < detailed.size());
  CHECK(detailed.size() < complete.size());
}

TEST_CASE("OCR text lands inside the delimited block") {
  const auto p = build_detection_prompt(PromptTier::complete, "they smell worse than my dog");
  CHECK(p.ocr_injected);
  CHECK(contains(p.user, "<<<MEME_TEXT\nthey smell worse than my dog\nMEME_TEXT>>>"));
  CHECK(p.user.ends_with(p.output_contract));
}

TEST_CASE("blank OCR text is rejected") {
  CHECK_THROWS_AS(build_detection_prompt(PromptTier::complete, "  \n\t"), Error);
  try {
    build_detection_prompt(PromptTier::naive, "");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyOcr);
  }
}

TEST_CASE("property: OCR text is never interpreted as template syntax") {
  std::mt19937 rng(99);
  const std::vector<std::string> pieces = {"{{", "}}", "{{ocr_text}}", "{{system}}", "$1", "\\n", "%s", "<<<",
                                           "MEME_TEXT>>>", "word", " ", "\n", "\xE2\x80\x99"};
  for (int i = 0; i < 300; ++i) {
    std::string text = "x";
    for (int k = static_cast<int>(rng() % 10); k > 0; --k) text += pieces[rng() % pieces.size()];
    const auto p = build_detection_prompt(PromptTier::complete, text);
    CHECK(contains(p.user, "<<<MEME_TEXT\n" + text + "\nMEME_TEXT>>>"));
  }
}

TEST_CASE("render_template substitutes in one pass") {
  CHECK(render_template("a {{x}} b", {{"x", "{{x}}"}}) == "a {{x}} b");
  CHECK(render_template("{{x}}{{y}}", {{"x", "1"}}) == "1{{y}}");
  CHECK(render_template("no placeholders", {}) == "no placeholders");
  CHECK(render_template("dangling {{x", {{"x", "1"}}) == "dangling {{x");
}

TEST_CASE("correction prompt") {
  const auto p = build_correction_prompt();
  CHECK(contains(p.user,
                 "This meme is hateful and should not be shared or promoted on social media. You are serious and "
                 "critical when evaluating and generating the content. Suppose that we want to have a non-hateful "
                 "meme using the same image. Your task is to generate the new text such that the new meme is not "
                 "hateful and promotes positive views of this image."));
  CHECK(p.user.ends_with(p.output_contract));
  CHECK(contains(p.output_contract, "New text:"));
  CHECK(build_correction_prompt() == p);
}

TEST_CASE("prompt hashes") {
  const auto a = build_detection_prompt(PromptTier::complete, std::nullopt);
  CHECK(prompt_hash(a) == prompt_hash(build_detection_prompt(PromptTier::complete, std::nullopt)));
  CHECK(prompt_hash(a).size() == 64);
  CHECK(detection_template_hash(PromptTier::complete, false) != detection_template_hash(PromptTier::complete, true));
  CHECK(detection_template_hash(PromptTier::naive, false) != detection_template_hash(PromptTier::complete, false));
  CHECK(correction_template_hash() != detection_template_hash(PromptTier::complete, false));
}

TEST_CASE("template assets are versioned and complete") {
  const auto names = template_asset_names();
  for (std::string_view n : {"system_detect", "detect_naive", "detect_detailed", "detect_complete", "ocr_block",
                             "detect_contract", "system_correct", "correct", "correct_contract"}) {
    CHECK_MESSAGE(std::find(names.begin(), names.end(), n) != names.end(), n);
  }
  CHECK(contains(std::string(template_asset("ocr_block")), kOcrPlaceholder));
  CHECK_THROWS_AS(template_asset("nope"), Error);
  CHECK(parse_prompt_tier("detailed") == PromptTier::detailed);
  CHECK_THROWS_AS(parse_prompt_tier("fancy"), Error);
}
