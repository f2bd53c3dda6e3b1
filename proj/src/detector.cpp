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

#include "memeshield/detector.hpp"

#include <json.hpp>

#include "memeshield/errors.hpp"
#include "memeshield/util.hpp"

namespace memeshield {

using ojson = nlohmann::ordered_json;

DetectionResult detect(std::string meme_id, const ImageData& image,
                       std::optional<std::string_view> ocr_text, VlmGateway& gateway,
                       const DetectionConfig& config) {
  if (config.trials_k < 1) throw Error(Errc::InvalidConfig, "trials_k must be >= 1");
  config.inference.validate();
  const PromptText prompt = build_detection_prompt(config.tier, ocr_text);

  DetectionResult result;
  result.meme_id = std::move(meme_id);
  result.config = config;
  result.config.use_ocr = ocr_text.has_value();
  result.trials.reserve(static_cast<std::size_t>(config.trials_k));
  for (int t = 0; t < config.trials_k; ++t) {
    Trial trial;
    trial.exchange = gateway.complete(prompt, image, config.inference, t);
    trial.verdict = parse_verdict(trial.exchange.response_text);
    result.trials.push_back(std::move(trial));
  }
  std::vector<VerdictValue> values;
  for (const auto& t : result.trials) values.push_back(t.verdict.value);
  const auto agg = aggregate_trials(values, config.trials_k, config.tie);
  result.predicted_label = agg.predicted_label;
  result.score = agg.score;
  result.low_confidence = agg.low_confidence;
  return result;
}

DetectionResult detect_meme(const MemeRecord& record, const ImageData& image, VlmGateway& gateway,
                            const DetectionConfig& config) {
  std::optional<std::string_view> ocr;
  if (config.use_ocr) ocr = record.text;
  return detect(record.id, image, ocr, gateway, config);
}

std::string detection_result_to_json(const DetectionResult& result) {
  const auto& c = result.config;
  ojson j;
  j["meme_id"] = result.meme_id;
  j["predicted_label"] = result.predicted_label;
  j["score"] = result.score;
  j["low_confidence"] = result.low_confidence;
  j["config"] = {
      {"tier", to_string(c.tier)},
      {"trials_k", c.trials_k},
      {"use_ocr", c.use_ocr},
      {"tie", c.tie == TieBreak::hateful ? "hateful" : "non_hateful"},
      {"model_id", c.inference.model_id},
      {"temperature", c.inference.temperature},
      {"top_p", c.inference.top_p},
      {"max_output_tokens", c.inference.max_output_tokens},
  };
  ojson trials = ojson::array();
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    const auto& t = result.trials[i];
    trials.push_back({
        {"trial", i},
        {"digest", t.exchange.request_digest},
        {"backend", to_string(t.exchange.backend)},
        {"latency", t.exchange.latency_seconds},
        {"verdict", to_string(t.verdict.value)},
        {"rule", to_string(t.verdict.matched_rule)},
        {"response", t.exchange.response_text},
    });
  }
  j["trials"] = std::move(trials);
  return j.dump();
}

DetectionResult detection_result_from_json(std::string_view line) {
  try {
    const auto j = ojson::parse(line);
    DetectionResult r;
    r.meme_id = j.at("meme_id").get<std::string>();
    r.predicted_label = j.at("predicted_label").get<int>();
    r.score = j.at("score").get<double>();
    r.low_confidence = j.at("low_confidence").get<bool>();
    const auto& c = j.at("config");
    r.config.tier = parse_prompt_tier(c.at("tier").get<std::string>());
    r.config.trials_k = c.at("trials_k").get<int>();
    r.config.use_ocr = c.at("use_ocr").get<bool>();
    r.config.tie = c.at("tie").get<std::string>() == "hateful" ? TieBreak::hateful : TieBreak::non_hateful;
    r.config.inference.model_id = c.at("model_id").get<std::string>();
    r.config.inference.temperature = c.at("temperature").get<double>();
    r.config.inference.top_p = c.at("top_p").get<double>();
    r.config.inference.max_output_tokens = c.at("max_output_tokens").get<int>();
    for (const auto& t : j.at("trials")) {
      Trial trial;
      trial.exchange.request_digest = t.at("digest").get<std::string>();
      trial.exchange.backend = parse_backend(t.at("backend").get<std::string>());
      trial.exchange.latency_seconds = t.at("latency").get<double>();
      trial.exchange.response_text = t.at("response").get<std::string>();
      trial.verdict = parse_verdict(trial.exchange.response_text);
      trial.verdict.value = parse_verdict_value(t.at("verdict").get<std::string>());
      trial.verdict.matched_rule = parse_rule_id(t.at("rule").get<std::string>());
      r.trials.push_back(std::move(trial));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("detection result: ") + e.what());
  }
}

}  // namespace memeshield
