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

#include <random>

#include "memeshield/correction.hpp"
#include "memeshield/errors.hpp"
#include "test_support.hpp"

using namespace memeshield;
using namespace memeshield::testing;

namespace {

const MemeRecord kHateful{"42", "img/42.png", "they all smell like goats", 1};

bool is_correction(const PromptText& p) { return p == build_correction_prompt(); }

std::string extract_ocr(const PromptText& p) {
  const std::string open = "<<<MEME_TEXT\n";
  const auto a = p.user.find(open);
  const auto b = p.user.find("\nMEME_TEXT>>>");
  if (a == std::string::npos || b == std::string::npos) return "";
  return p.user.substr(a + open.size(), b - a - open.size());
}

CorrectionConfig config(int budget) {
  CorrectionConfig c;
  c.budget = budget;
  c.verification.tier = PromptTier::naive;  // overridden to complete by correct_meme
  return c;
}

}  // namespace

TEST_CASE("extraction rules") {
  CHECK(extract_new_text("Thinking...\nNew text: Everyone is welcome here") == "Everyone is welcome here");
  CHECK(extract_new_text("New text: first\nmore\nNew text: \"second\"") == "second");
  CHECK(extract_new_text("**New text:** Goats are great neighbors") == "Goats are great neighbors");
  CHECK(extract_new_text("new TEXT : lowercase works") == "lowercase works");
  CHECK(extract_new_text("New text:\n\n  \"Kindness is free\"  \n") == "Kindness is free");
  CHECK(extract_new_text("I suggest \"short\" or \"a much longer caption\".") == "a much longer caption");
  CHECK(extract_new_text("Try \xE2\x80\x9C" "curly quoted text" "\xE2\x80\x9D please") == "curly quoted text");
  CHECK_THROWS_WITH_AS(extract_new_text("I will not do that."), doctest::Contains("ExtractionFailed"), Error);
  CHECK_THROWS_AS(extract_new_text(""), Error);
}

TEST_CASE("generate_text refuses non-hateful memes") {
  ScriptedGateway gw([](const PromptText&, int) { return "New text: x"; });
  MemeRecord benign = kHateful;
  benign.label = 0;
  CHECK_THROWS_AS(generate_text(benign, png_image(), gw, InferenceConfig{}), Error);
  CHECK(gw.calls == 0);
  const auto g = generate_text(kHateful, png_image(), gw, InferenceConfig{});
  CHECK(g.text == "x");
  CHECK(g.request_digest.size() == 64);
}

TEST_CASE("first rewrite verifies non-hateful") {
  std::vector<std::string> verified_texts;
  ScriptedGateway gw([&](const PromptText& p, int) -> std::string {
    if (is_correction(p)) return "New text: Goats are wonderful neighbors";
    CHECK(p.user.find("## Hatefulness definition") != std::string::npos);
    verified_texts.push_back(extract_ocr(p));
    return "Classification: Not Hateful";
  });
  const auto c = correct_meme(kHateful, png_image(), gw, config(3));
  CHECK(c.status == CorrectionStatus::verified_nonhateful);
  CHECK(c.attempts == 1);
  CHECK(c.generated_text == "Goats are wonderful neighbors");
  CHECK(c.image_path == kHateful.image_path);
  REQUIRE(c.verification.has_value());
  CHECK(c.verification->predicted_label == 0);
  CHECK(c.verification->trials.size() == 5);
  CHECK(gw.calls == 1 + 5);
  CHECK(verified_texts == std::vector<std::string>(5, "Goats are wonderful neighbors"));
}

TEST_CASE("budget exhausted when every rewrite stays hateful") {
  ScriptedGateway gw([](const PromptText& p, int trial) -> std::string {
    if (is_correction(p)) return "New text: variant " + std::to_string(trial);
    return "Classification: Hateful";
  });
  const auto c = correct_meme(kHateful, png_image(), gw, config(2));
  CHECK(c.status == CorrectionStatus::verification_failed);
  CHECK(c.attempts == 2);
  REQUIRE(c.history.size() == 2);
  CHECK(c.history[0].generated_text == "variant 0");
  CHECK(c.history[1].generated_text == "variant 1");
  CHECK(c.history[0].request_digest != c.history[1].request_digest);
  CHECK(c.generated_text == "variant 1");
  CHECK(c.verification->predicted_label == 1);
}

TEST_CASE("second attempt succeeds after a failed extraction") {
  ScriptedGateway gw([](const PromptText& p, int trial) -> std::string {
    if (is_correction(p)) return trial == 0 ? "I cannot help with that." : "New text: We all share this city";
    return "Classification: Not Hateful";
  });
  const auto c = correct_meme(kHateful, png_image(), gw, config(3));
  CHECK(c.status == CorrectionStatus::verified_nonhateful);
  CHECK(c.attempts == 2);
  CHECK(c.history[0].error.find("ExtractionFailed") != std::string::npos);
  CHECK(c.history[0].raw_response == "I cannot help with that.");
  CHECK(c.history[1].error.empty());
}

TEST_CASE("generation failure and identical rewrites") {
  ScriptedGateway gw([](const PromptText& p, int) -> std::string {
    if (is_correction(p)) return "New text: They all smell like goats";
    return "Classification: Not Hateful";
  });
  const auto c = correct_meme(kHateful, png_image(), gw, config(2));
  CHECK(c.status == CorrectionStatus::generation_failed);
  CHECK(c.generated_text.empty());
  CHECK_FALSE(c.verification.has_value());
  CHECK(gw.calls == 2);
}

TEST_CASE("gateway errors are recorded per attempt") {
  ScriptedGateway gw([](const PromptText&, int) -> std::string {
    throw Error(Errc::BackendUnavailable, "down");
  });
  const auto c = correct_meme(kHateful, png_image(), gw, config(3));
  CHECK(c.status == CorrectionStatus::generation_failed);
  CHECK(c.attempts == 3);
  for (const auto& a : c.history) CHECK(a.error.find("BackendUnavailable") != std::string::npos);
}

TEST_CASE("invalid inputs") {
  ScriptedGateway gw([](const PromptText&, int) { return "New text: x"; });
  CHECK_THROWS_AS(correct_meme(kHateful, png_image(), gw, config(0)), Error);
  MemeRecord benign = kHateful;
  benign.label = 0;
  CHECK_THROWS_AS(correct_meme(benign, png_image(), gw, config(1)), Error);
}

TEST_CASE("property: loop contract over random scripted replies") {
  std::mt19937 rng(11);
  for (int round = 0; round < 150; ++round) {
    const int budget = 1 + static_cast<int>(rng() % 4);
    const unsigned seed = static_cast<unsigned>(rng());
    ScriptedGateway gw([seed](const PromptText& p, int trial) -> std::string {
      std::mt19937 local(seed + static_cast<unsigned>(trial) * 7919u + (p.user.size() % 97));
      if (p == build_correction_prompt()) {
        switch (local() % 3) {
          case 0: return "no idea";
          default: return "New text: rewrite " + std::to_string(trial);
        }
      }
      switch (local() % 3) {
        case 0: return "Classification: Hateful";
        case 1: return "Classification: Not Hateful";
        default: return "unclear";
      }
    });
    const auto c = correct_meme(kHateful, png_image(), gw, config(budget));
    CHECK(c.attempts >= 1);
    CHECK(c.attempts <= budget);
    CHECK(c.history.size() == static_cast<std::size_t>(c.attempts));
    for (std::size_t i = 0; i + 1 < c.history.size(); ++i) {
      const auto& v = c.history[i].verification;
      CHECK_FALSE((v && v->predicted_label == 0));
    }
    switch (c.status) {
      case CorrectionStatus::verified_nonhateful:
        CHECK(c.verification->predicted_label == 0);
        CHECK(c.generated_text == c.history.back().generated_text);
        break;
      case CorrectionStatus::verification_failed:
        CHECK(c.attempts == budget);
        CHECK_FALSE(c.generated_text.empty());
        break;
      case CorrectionStatus::generation_failed:
        CHECK(c.attempts == budget);
        CHECK(c.generated_text.empty());
        break;
    }
    const auto round_trip = candidate_from_json(candidate_to_json(c));
    CHECK(candidate_to_json(round_trip) == candidate_to_json(c));
  }
}
