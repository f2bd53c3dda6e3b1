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

#include <array>
#include <string_view>

#include "memeshield/verdict.hpp"

namespace memeshield::testing {

struct ParserCase {
  std::string_view text;
  VerdictValue value;
  ParseRule rule;
};

// Pinned parser outcomes. Shared by the unit tests and the acceptance suite.
inline constexpr std::array<ParserCase, 37> kParserCorpus = {{
    {"The image shows a crowd at a rally.\nClassification: Hateful", VerdictValue::Hateful, ParseRule::R1},
    {"Looking at the text, the meme is not hateful overall.", VerdictValue::NonHateful, ParseRule::R2},
    {"I cannot evaluate this content.", VerdictValue::Abstain, ParseRule::R4},
    {"It could be seen as not hateful.\nClassification: Hateful", VerdictValue::Hateful, ParseRule::R1},
    {"**Classification: Not Hateful**", VerdictValue::NonHateful, ParseRule::R1},
    {"classification: hateful.", VerdictValue::Hateful, ParseRule::R1},
    {"Final classification: Non-hateful", VerdictValue::NonHateful, ParseRule::R1},
    {"Classification: Hateful\n\nClassification: Not Hateful", VerdictValue::NonHateful, ParseRule::R1},
    {"> Classification: `Hateful`", VerdictValue::Hateful, ParseRule::R1},
    {"Classification: **Not Hateful**.", VerdictValue::NonHateful, ParseRule::R1},
    {"Classification - Hateful", VerdictValue::Hateful, ParseRule::R1},
    {"Classification: Hateful!", VerdictValue::Hateful, ParseRule::R1},
    {"- Classification: (Not Hateful)", VerdictValue::NonHateful, ParseRule::R1},
    {"Classification: Hateful\nA later sentence says it is not hateful.", VerdictValue::Hateful, ParseRule::R1},
    {"  CLASSIFICATION:   NOT HATEFUL  ", VerdictValue::NonHateful, ParseRule::R1},
    {"The meme is hateful because it compares people to animals.", VerdictValue::Hateful, ParseRule::R2},
    {"This is non-hateful content.", VerdictValue::NonHateful, ParseRule::R2},
    {"The caption isn't hateful.", VerdictValue::NonHateful, ParseRule::R2},
    {"At first glance it looks hateful, but in context it is not hateful.", VerdictValue::NonHateful,
     ParseRule::R2},
    {"It is not hateful at first, but the combination is clearly hateful.", VerdictValue::Hateful, ParseRule::R2},
    {"The meme is NOT HATEFUL.", VerdictValue::NonHateful, ParseRule::R2},
    {"It\xE2\x80\x99s not hateful in my view.", VerdictValue::NonHateful, ParseRule::R2},
    {"The meme is nonhateful.", VerdictValue::NonHateful, ParseRule::R2},
    {"Answer: the meme is hateful", VerdictValue::Hateful, ParseRule::R2},
    {"This meme is not hateful, and I would not call it hateful.", VerdictValue::NonHateful, ParseRule::R2},
    {"Classification: the meme is hateful toward migrants", VerdictValue::Hateful, ParseRule::R2},
    {"Whether this is hateful depends on context. It is a joke about cats.", VerdictValue::Abstain,
     ParseRule::R4},
    {"The meme does not constitute hate speech.", VerdictValue::NonHateful, ParseRule::R3},
    {"This meme contains hate speech directed at immigrants.", VerdictValue::Hateful, ParseRule::R3},
    {"It is not considered hate speech.", VerdictValue::NonHateful, ParseRule::R3},
    {"The text promotes hatred against a religious group.", VerdictValue::Hateful, ParseRule::R3},
    {"It is hate speech.", VerdictValue::Hateful, ParseRule::R3},
    {"There is no hate speech here.", VerdictValue::NonHateful, ParseRule::R3},
    {"The meme doesn't promote hate.", VerdictValue::NonHateful, ParseRule::R3},
    {"It is harmless and funny.", VerdictValue::Abstain, ParseRule::R4},
    {"", VerdictValue::Abstain, ParseRule::R4},
    {"Classification: Unknown", VerdictValue::Abstain, ParseRule::R4},
}};

}  // namespace memeshield::testing
