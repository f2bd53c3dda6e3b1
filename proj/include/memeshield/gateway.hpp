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

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "memeshield/dataset.hpp"
#include "memeshield/prompt.hpp"

namespace memeshield {

struct InferenceConfig {
  double temperature = 0.7;
  double top_p = 1.0;
  int max_output_tokens = 512;
  std::string model_id = "llava-llama-2-13b";
  double timeout_seconds = 120.0;
  int retries = 3;

  /// Throws Error(InvalidConfig) when a field is out of range.
  void validate() const;
};

enum class Backend { http, replay };

std::string_view to_string(Backend backend);
Backend parse_backend(std::string_view name);

struct ChatExchange {
  std::string request_digest;
  std::string response_text;  // verbatim, never trimmed
  double latency_seconds = 0.0;
  Backend backend = Backend::replay;
};

/// Content digest of one trial. Depends only on the prompt text, the image
/// bytes, the sampling fields of `config` and `trial_index`; timeout and
/// retry settings do not participate.
std::string request_digest(const PromptText& prompt, const ImageData& image,
                           const InferenceConfig& config, int trial_index);

/// Transport seam to a vision-language model. Implementations must be safe to
/// call from several worker threads at once.
class VlmGateway {
 public:
  virtual ~VlmGateway() = default;
  virtual ChatExchange complete(const PromptText& prompt, const ImageData& image,
                                const InferenceConfig& config, int trial_index) = 0;
};

/// Request body for POST {endpoint}/v1/chat/completions.
std::string build_chat_request_body(const PromptText& prompt, const ImageData& image,
                                    const InferenceConfig& config);
/// Text of the first choice. Throws Error(EmptyResponse) when there is none
/// or it is blank, Error(ParseError) when the body is not a completion.
std::string parse_chat_response_body(std::string_view body);

struct HttpGatewayOptions {
  std::string endpoint;  // e.g. http://localhost:8000 or https://host/prefix
  std::string api_key;   // sent as a bearer token when non-empty
  std::chrono::milliseconds backoff_base{500};
};

/// OpenAI-compatible chat-completions client. Transport failures and 5xx
/// replies are retried with exponential backoff; 4xx replies are not.
class HttpGateway final : public VlmGateway {
 public:
  explicit HttpGateway(HttpGatewayOptions options);

  ChatExchange complete(const PromptText& prompt, const ImageData& image,
                        const InferenceConfig& config, int trial_index) override;

 private:
  HttpGatewayOptions options_;
  std::string host_;  // scheme://host[:port]
  std::string path_;  // prefix + /v1/chat/completions
};

/// Answers from a fixture store: one `<digest>.txt` file per request.
class ReplayGateway final : public VlmGateway {
 public:
  explicit ReplayGateway(std::filesystem::path store);

  /// Throws Error(FixtureMissing) for digests absent from the store.
  ChatExchange complete(const PromptText& prompt, const ImageData& image,
                        const InferenceConfig& config, int trial_index) override;

  const std::filesystem::path& store() const { return store_; }

 private:
  std::filesystem::path store_;
};

std::filesystem::path fixture_path(const std::filesystem::path& store, std::string_view digest);

/// Persists an http exchange so a replay run returns the same bytes.
/// Throws Error(InvalidInput) for replayed exchanges, Error(StorageError) on I/O failure.
void record_fixture(const ChatExchange& exchange, const std::filesystem::path& store);

/// Wraps another gateway and records every successful exchange.
class RecordingGateway final : public VlmGateway {
 public:
  RecordingGateway(std::shared_ptr<VlmGateway> inner, std::filesystem::path store);

  ChatExchange complete(const PromptText& prompt, const ImageData& image,
                        const InferenceConfig& config, int trial_index) override;

 private:
  std::shared_ptr<VlmGateway> inner_;
  std::filesystem::path store_;
};

}  // namespace memeshield
