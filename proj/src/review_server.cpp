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

#include "memeshield/review_server.hpp"

#include <httplib.h>

#include "memeshield/dataset.hpp"
#include "memeshield/errors.hpp"
#include "memeshield/util.hpp"

namespace memeshield {

using ojson = nlohmann::ordered_json;

namespace {

struct Caller {
  bool admin = false;
  std::string expert_id;  // empty for the admin
};

void send_json(httplib::Response& res, int status, const ojson& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view kind, const std::string& message) {
  send_json(res, status, {{"error", kind}, {"message", message}});
}

int http_status(Errc code) {
  switch (code) {
    case Errc::Forbidden: return 403;
    case Errc::NotFound:
    case Errc::ImageNotFound: return 404;
    case Errc::AlreadyDecided:
    case Errc::BatchIncomplete: return 409;
    case Errc::UnsupportedImage: return 415;
    case Errc::StorageError: return 500;
    default: return 400;
  }
}

ReviewInput input_from_json(const ojson& j) {
  return {j.at("meme_id").get<std::string>(), j.value("image_path", ""),
          j.at("original_text").get<std::string>(), j.at("generated_text").get<std::string>()};
}

ojson summary_json(const BatchSummary& s) {
  ojson agreement = ojson::object();
  for (const auto& [expert, value] : s.per_expert_agreement) agreement[expert] = value;
  return {{"success_rate", s.success_rate},
          {"per_expert_agreement", std::move(agreement)},
          {"progress", {{"decided", s.decided}, {"total", s.total}}}};
}

}  // namespace

AuthConfig AuthConfig::from_json(std::string_view text) {
  try {
    const auto j = ojson::parse(text);
    AuthConfig cfg;
    cfg.admin_token = j.value("admin_token", "");
    if (j.contains("experts")) {
      for (const auto& [expert, token] : j.at("experts").items()) {
        const auto t = token.get<std::string>();
        if (t.empty()) throw Error(Errc::InvalidConfig, "expert '" + expert + "' has an empty token");
        if (!cfg.expert_by_token.emplace(t, expert).second) {
          throw Error(Errc::InvalidConfig, "two experts share a token");
        }
      }
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("auth config: ") + e.what());
  }
}

AuthConfig AuthConfig::load(const std::filesystem::path& file) { return from_json(read_file_text(file)); }

ReviewServer::ReviewServer(ReviewStore& store, ReviewServerOptions options)
    : store_(store), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

ReviewServer::~ReviewServer() { stop(); }

int ReviewServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool ReviewServer::listen_after_bind() { return server_->listen_after_bind(); }

void ReviewServer::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

void ReviewServer::wait_until_ready() const { server_->wait_until_ready(); }

void ReviewServer::install_routes() {
  auto& srv = *server_;
  const AuthConfig& auth = options_.auth;

  auto authenticate = [&auth](const httplib::Request& req) -> std::optional<Caller> {
    std::string token;
    const auto header = req.get_header_value("Authorization");
    if (header.starts_with("Bearer ")) {
      token = trim(std::string_view(header).substr(7));
    } else if (req.has_param("token")) {
      token = req.get_param_value("token");
    }
    if (token.empty()) return std::nullopt;
    if (!auth.admin_token.empty() && token == auth.admin_token) return Caller{true, {}};
    if (auto it = auth.expert_by_token.find(token); it != auth.expert_by_token.end()) {
      return Caller{false, it->second};
    }
    return std::nullopt;
  };

  // Wraps a handler with authentication and Error -> HTTP status mapping.
  auto guarded = [authenticate](auto handler) {
    return [authenticate, handler](const httplib::Request& req, httplib::Response& res) {
      const auto caller = authenticate(req);
      if (!caller) {
        send_error(res, 401, "Unauthorized", "missing or unknown bearer token");
        return;
      }
      try {
        handler(*caller, req, res);
      } catch (const Error& e) {
        send_error(res, http_status(e.code()), errc_name(e.code()), e.what());
      } catch (const nlohmann::json::exception& e) {
        send_error(res, 400, "BadRequest", e.what());
      }
    };
  };

  auto require_admin = [](const Caller& c) {
    if (!c.admin) throw Error(Errc::Forbidden, "coordinator token required");
  };

  srv.Post("/batches", guarded([this, require_admin](const Caller& c, const httplib::Request& req,
                                                     httplib::Response& res) {
    require_admin(c);
    const auto body = ojson::parse(req.body);
    std::vector<ReviewInput> inputs;
    for (const auto& item : body.value("candidates", ojson::array())) inputs.push_back(input_from_json(item));
    const auto panel = body.at("panel").get<std::vector<std::string>>();
    const int quorum = body.value("quorum", static_cast<int>(panel.size()));
    const auto id = store_.create_batch(inputs, panel, quorum);
    send_json(res, 201, {{"batch_id", id}, {"items", inputs.size()}});
  }));

  srv.Get(R"(/batches/([^/]+)/summary)",
          guarded([this](const Caller&, const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            try {
              send_json(res, 200, summary_json(store_.batch_summary(id)));
            } catch (const Error& e) {
              if (e.code() != Errc::BatchIncomplete) throw;
              const auto [decided, total] = store_.batch_progress(id);
              send_json(res, 409, {{"error", "BatchIncomplete"},
                                   {"message", e.what()},
                                   {"progress", {{"decided", decided}, {"total", total}}}});
            }
          }));

  srv.Get(R"(/batches/([^/]+))", guarded([this, require_admin](const Caller& c, const httplib::Request& req,
                                                              httplib::Response& res) {
    require_admin(c);
    const auto batch = store_.batch(req.matches[1].str());
    ojson items = ojson::array();
    std::size_t decided = 0;
    for (const auto& i : batch.items) {
      decided += i.status == ItemStatus::decided ? 1 : 0;
      items.push_back({{"item_id", i.item_id},
                       {"meme_id", i.meme_id},
                       {"original_text", i.original_text},
                       {"generated_text", i.generated_text},
                       {"status", to_string(i.status)},
                       {"outcome", i.outcome ? ojson(to_string(*i.outcome)) : ojson(nullptr)},
                       {"verdict_count", i.verdicts.size()}});
    }
    send_json(res, 200, {{"batch_id", batch.batch_id},
                         {"panel", batch.panel},
                         {"quorum", batch.quorum},
                         {"created_at", batch.created_at},
                         {"progress", {{"decided", decided}, {"total", batch.items.size()}}},
                         {"items", std::move(items)}});
  }));

  srv.Get(R"(/experts/([^/]+)/tasks)",
          guarded([this](const Caller& c, const httplib::Request& req, httplib::Response& res) {
            const std::string expert = req.matches[1];
            if (!c.admin && c.expert_id != expert) {
              throw Error(Errc::Forbidden, "token does not belong to expert '" + expert + "'");
            }
            ojson tasks = ojson::array();
            for (const auto& t : store_.tasks_for(expert)) {
              tasks.push_back({{"item_id", t.item_id},
                               {"batch_id", t.batch_id},
                               {"meme_id", t.meme_id},
                               {"image_url", t.image_url},
                               {"original_text", t.original_text},
                               {"generated_text", t.generated_text},
                               {"position", {{"index", t.index}, {"total", t.total}}}});
            }
            send_json(res, 200, {{"expert_id", expert}, {"tasks", std::move(tasks)}});
          }));

  srv.Post("/verdicts", guarded([this](const Caller& c, const httplib::Request& req, httplib::Response& res) {
    const auto body = ojson::parse(req.body);
    ExpertVerdict v;
    v.expert_id = body.value("expert_id", c.expert_id);
    if (c.admin || v.expert_id != c.expert_id) {
      throw Error(Errc::Forbidden, "verdicts must be submitted with the expert's own token");
    }
    v.item_id = body.at("item_id").get<std::string>();
    v.judgment = parse_judgment(body.at("judgment").get<std::string>());
    const auto out = store_.submit_verdict(v);
    send_json(res, 200, {{"stored", true},
                         {"replaced", out.replaced},
                         {"item_status", to_string(out.item_status)}});
  }));

  srv.Get(R"(/images/([^/]+))", guarded([this](const Caller&, const httplib::Request& req,
                                               httplib::Response& res) {
    const std::string meme_id = req.matches[1];
    const auto rel = store_.image_path_for(meme_id);
    if (!rel) throw Error(Errc::NotFound, "no review item shows meme '" + meme_id + "'");
    MemeRecord rec{meme_id, *rel, {}, std::nullopt};
    const auto image = resolve_image(rec, options_.data_root);
    res.status = 200;
    res.set_content(std::string(image.bytes.begin(), image.bytes.end()), image.mime);
  }));

  if (options_.ui_dir) srv.set_mount_point("/", options_.ui_dir->string());
}

}  // namespace memeshield
