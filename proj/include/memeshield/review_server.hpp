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

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "memeshield/review.hpp"

namespace httplib {
class Server;
}

namespace memeshield {

/// Bearer tokens. File format:
///   {"admin_token": "...", "experts": {"expert-1": "token-1", ...}}
struct AuthConfig {
  std::string admin_token;
  std::map<std::string, std::string> expert_by_token;

  static AuthConfig load(const std::filesystem::path& file);
  static AuthConfig from_json(std::string_view text);
};

struct ReviewServerOptions {
  std::filesystem::path data_root;            // images resolve against this
  std::optional<std::filesystem::path> ui_dir;  // static bundle mounted at /
  AuthConfig auth;
};

/// HTTP front of a ReviewStore:
///   POST /batches                 admin   create a batch
///   GET  /batches/{id}            admin   items with status/outcome
///   GET  /batches/{id}/summary    any     success rate and agreement
///   GET  /experts/{id}/tasks      expert  own pending items, no peer verdicts
///   POST /verdicts                expert  submit a judgment
///   GET  /images/{meme_id}        any     image bytes (token may be ?token=)
class ReviewServer {
 public:
  ReviewServer(ReviewStore& store, ReviewServerOptions options);
  ~ReviewServer();

  /// Binds to `port` (0 picks a free one) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  void install_routes();

  ReviewStore& store_;
  ReviewServerOptions options_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace memeshield
