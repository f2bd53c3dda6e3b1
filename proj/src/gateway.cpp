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

#include "memeshield/gateway.hpp"

#include <cmath>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "memeshield/errors.hpp"
#include "memeshield/util.hpp"

namespace memeshield {

using json = nlohmann::json;

void InferenceConfig::validate() const {
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw Error(Errc::InvalidConfig, "temperature must be >= 0");
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) throw Error(Errc::InvalidConfig, "top_p must be in (0, 1]");
  if (max_output_tokens <= 0) throw Error(Errc::InvalidConfig, "max_output_tokens must be positive");
  if (model_id.empty()) throw Error(Errc::InvalidConfig, "model_id is empty");
  if (!(timeout_seconds > 0.0)) throw Error(Errc::InvalidConfig, "timeout must be positive");
  if (retries < 0) throw Error(Errc::InvalidConfig, "retries must be >= 0");
}

std::string_view to_string(Backend backend) {
  return backend == Backend::http ? "http" : "replay";
}

Backend parse_backend(std::string_view name) {
  if (name == "http") return Backend::http;
  if (name == "replay") return Backend::replay;
  throw Error(Errc::InvalidInput, "unknown backend '" + std::string(name) + "'");
}

std::string request_digest(const PromptText& prompt, const ImageData& image,
                           const InferenceConfig& config, int trial_index) {
  Sha256 h;
  h.field("memeshield-request-v1")
      .field(prompt.system)
      .field(prompt.user)
      .field(image.bytes)
      .field(format_double(config.temperature))
      .field(format_double(config.top_p))
      .field(std::to_string(config.max_output_tokens))
      .field(config.model_id)
      .field(std::to_string(trial_index));
  return h.hex_digest();
}

std::string build_chat_request_body(const PromptText& prompt, const ImageData& image,
                                    const InferenceConfig& config) {
  const std::string data_url = "data:" + image.mime + ";base64," + base64_encode(image.bytes);
  json body = {
      {"model", config.model_id},
      {"temperature", config.temperature},
      {"top_p", config.top_p},
      {"max_tokens", config.max_output_tokens},
      {"messages",
       json::array({
           {{"role", "system"}, {"content", prompt.system}},
           {{"role", "user"},
            {"content", json::array({
                            {{"type", "text"}, {"text", prompt.user}},
                            {{"type", "image_url"}, {"image_url", {{"url", data_url}}}},
                        })}},
       })},
  };
  return body.dump();
}

std::string parse_chat_response_body(std::string_view body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ParseError, std::string("completion body: ") + e.what());
  }
  const auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array()) {
    throw Error(Errc::ParseError, "completion body has no 'choices' array");
  }
  if (choices->empty()) throw Error(Errc::EmptyResponse, "completion has no choices");
  const auto& message = (*choices)[0].value("message", json::object());
  const auto content = message.find("content");
  std::string text;
  if (content != message.end()) {
    if (content->is_string()) {
      text = content->get<std::string>();
    } else if (content->is_array()) {
      // Some servers return content parts even for assistant turns.
      for (const auto& part : *content) {
        if (part.value("type", "") == "text") text += part.value("text", "");
      }
    }
  }
  if (trim(text).empty()) throw Error(Errc::EmptyResponse, "completion text is empty");
  return text;
}

HttpGateway::HttpGateway(HttpGatewayOptions options) : options_(std::move(options)) {
  std::string endpoint = options_.endpoint;
  while (!endpoint.empty() && endpoint.back() == '/') endpoint.pop_back();
  const auto scheme = endpoint.find("://");
  if (endpoint.empty() || scheme == std::string::npos) {
    throw Error(Errc::InvalidConfig, "endpoint must look like http://host[:port][/prefix]");
  }
  const auto slash = endpoint.find('/', scheme + 3);
  host_ = endpoint.substr(0, slash);
  path_ = (slash == std::string::npos ? std::string() : endpoint.substr(slash)) + "/v1/chat/completions";
}

ChatExchange HttpGateway::complete(const PromptText& prompt, const ImageData& image,
                                   const InferenceConfig& config, int trial_index) {
  config.validate();
  if (image.bytes.empty()) throw Error(Errc::InvalidInput, "image is empty");

  const std::string body = build_chat_request_body(prompt, image, config);
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(config.timeout_seconds));
  std::string last_failure;
  const int attempts = config.retries + 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(options_.backoff_base * (1 << (attempt - 1)));

    httplib::Client client(host_);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    const auto start = std::chrono::steady_clock::now();
    auto res = client.Post(path_, headers, body, "application/json");
    const double latency =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw Error(Errc::RequestRejected, "HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    ChatExchange ex;
    ex.request_digest = request_digest(prompt, image, config, trial_index);
    ex.response_text = parse_chat_response_body(res->body);
    ex.latency_seconds = latency;
    ex.backend = Backend::http;
    return ex;
  }
  throw Error(Errc::BackendUnavailable,
              host_ + path_ + " failed after " + std::to_string(attempts) + " attempts (" +
                  last_failure + ")");
}

ReplayGateway::ReplayGateway(std::filesystem::path store) : store_(std::move(store)) {}

std::filesystem::path fixture_path(const std::filesystem::path& store, std::string_view digest) {
  return store / (std::string(digest) + ".txt");
}

ChatExchange ReplayGateway::complete(const PromptText& prompt, const ImageData& image,
                                     const InferenceConfig& config, int trial_index) {
  ChatExchange ex;
  ex.request_digest = request_digest(prompt, image, config, trial_index);
  const auto path = fixture_path(store_, ex.request_digest);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(Errc::FixtureMissing, "no fixture " + path.string());
  }
  ex.response_text = read_file_text(path);
  if (trim(ex.response_text).empty()) throw Error(Errc::EmptyResponse, "fixture " + path.string());
  // Replayed exchanges report zero latency so replay runs stay byte-identical.
  ex.latency_seconds = 0.0;
  ex.backend = Backend::replay;
  return ex;
}

void record_fixture(const ChatExchange& exchange, const std::filesystem::path& store) {
  if (exchange.backend != Backend::http) {
    throw Error(Errc::InvalidInput, "only http exchanges are recorded");
  }
  if (exchange.request_digest.empty()) throw Error(Errc::InvalidInput, "exchange has no digest");
  write_file_atomic(fixture_path(store, exchange.request_digest), exchange.response_text);
}

RecordingGateway::RecordingGateway(std::shared_ptr<VlmGateway> inner, std::filesystem::path store)
    : inner_(std::move(inner)), store_(std::move(store)) {}

ChatExchange RecordingGateway::complete(const PromptText& prompt, const ImageData& image,
                                        const InferenceConfig& config, int trial_index) {
  ChatExchange ex = inner_->complete(prompt, image, config, trial_index);
  record_fixture(ex, store_);
  return ex;
}

}  // namespace memeshield
