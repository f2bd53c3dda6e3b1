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

// memeshield: command-line front end.
//
//   memeshield detect   --data <dir> --split test_seen --tier complete --trials 5 [--ocr]
//                       --backend http|replay [--endpoint <url>] [--fixtures <dir>] --out <dir>
//   memeshield correct  --data <dir> --split test_seen --n 50 --budget 3
//                       --select seeded_random --seed 7 --backend ... --out <dir>
//   memeshield eval     --results <jsonl> --data <dir> --split <name> --out report.json
//                       [--compare-reference]
//   memeshield review   serve|create|summary ...
//   memeshield fixtures record|verify|import ...
//
// Exit codes: 0 ok, 1 degraded, 2 fatal.

#include <algorithm>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "memeshield/detector.hpp"
#include "memeshield/errors.hpp"
#include "memeshield/metrics.hpp"
#include "memeshield/pipeline.hpp"
#include "memeshield/review.hpp"
#include "memeshield/review_server.hpp"
#include "memeshield/util.hpp"

namespace {

using namespace memeshield;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitDegraded = 1;
constexpr int kExitFatal = 2;

std::string env_or(const char* name, std::string fallback = {}) {
  const char* v = std::getenv(name);
  return v != nullptr ? std::string(v) : fallback;
}

// String-typed options bound by CLI11, converted to a RunConfig afterwards.
struct RunOptions {
  std::string data;
  std::string split = "test_seen";
  std::string tier = "complete";
  int trials = 5;
  bool ocr = false;
  std::string backend = "http";
  std::string endpoint = env_or("MEMESHIELD_ENDPOINT");
  std::string api_key = env_or("MEMESHIELD_API_KEY");
  std::string fixtures;
  bool record = false;
  std::string out;
  int parallelism = 1;
  std::uint64_t seed = 0;
  std::string tie = "hateful";
  std::string timestamp;
  InferenceConfig inference;

  void add_to(CLI::App& app, bool with_output = true) {
    app.add_option("--data", data, "Dataset root holding <split>.jsonl and images")->required();
    app.add_option("--split", split, "train, dev_seen, test_seen, dev_unseen or test_unseen");
    app.add_option("--tier", tier, "Prompt tier: naive, detailed or complete");
    app.add_option("--trials", trials, "Sampled trials per meme (majority vote)");
    app.add_flag("--ocr", ocr, "Inject the meme text into the prompt");
    app.add_option("--backend", backend, "http or replay");
    app.add_option("--endpoint", endpoint, "Chat-completions base URL (default $MEMESHIELD_ENDPOINT)");
    app.add_option("--api-key", api_key, "Bearer token (default $MEMESHIELD_API_KEY)");
    app.add_option("--fixtures", fixtures, "Fixture store: read by replay, written by --record");
    app.add_flag("--record", record, "Record every http exchange into --fixtures");
    if (with_output) app.add_option("--out", out, "Output directory")->required();
    app.add_option("--parallelism", parallelism, "Concurrent memes");
    app.add_option("--seed", seed, "Seed for sampled selections");
    app.add_option("--tie", tie, "Tie break for split votes: hateful or non_hateful");
    app.add_option("--timestamp", timestamp, "Report timestamp override");
    app.add_option("--model", inference.model_id, "Model id sent to the endpoint");
    app.add_option("--temperature", inference.temperature);
    app.add_option("--top-p", inference.top_p);
    app.add_option("--max-tokens", inference.max_output_tokens);
    app.add_option("--timeout", inference.timeout_seconds, "Per-request timeout in seconds");
    app.add_option("--retries", inference.retries, "Retries on transient failures");
  }

  RunConfig to_config() const {
    RunConfig c;
    c.data_root = data;
    c.split = parse_split_name(split);
    c.detection.tier = parse_prompt_tier(tier);
    c.detection.trials_k = trials;
    c.detection.use_ocr = ocr;
    if (tie != "hateful" && tie != "non_hateful") throw Error(Errc::InvalidInput, "--tie must be hateful or non_hateful");
    c.detection.tie = tie == "hateful" ? TieBreak::hateful : TieBreak::non_hateful;
    c.detection.inference = inference;
    c.backend = parse_backend(backend);
    c.endpoint = endpoint;
    c.api_key = api_key;
    c.fixtures = fixtures;
    c.record_fixtures = record;
    c.parallelism = parallelism;
    c.output_dir = out;
    c.seed = seed;
    if (!timestamp.empty()) c.timestamp = timestamp;
    return c;
  }
};

int cmd_detect(const RunOptions& opts) {
  const auto run = run_detection(opts.to_config());
  std::cout << "detected " << run.completed << " memes (" << run.resumed << " resumed, " << run.failures.size()
            << " failed)\n";
  if (run.report) {
    std::cout << "accuracy " << format_double(run.report->accuracy) << ", AUROC "
              << (run.report->auroc ? format_double(*run.report->auroc) : std::string("n/a")) << "\n";
  }
  if (run.degraded) {
    std::cerr << "run degraded: more than 10% of memes failed\n";
    return kExitDegraded;
  }
  return kExitOk;
}

int cmd_correct(const RunOptions& opts, std::size_t n, int budget, const std::string& select) {
  const auto config = opts.to_config();
  config.validate();
  auto gateway = make_gateway(config);
  const auto run = run_correction(config, parse_selection(select), n, budget, *gateway);
  std::size_t verified = 0, failed = 0;
  for (const auto& c : run.candidates) {
    verified += c.status == CorrectionStatus::verified_nonhateful ? 1 : 0;
    failed += c.status == CorrectionStatus::generation_failed ? 1 : 0;
  }
  std::cout << run.candidates.size() << " candidates written to "
            << (config.output_dir / kCorrectionsFile).string() << ": " << verified << " verified non-hateful, "
            << failed << " generation failures\n";
  return kExitOk;
}

int cmd_eval(const std::string& results, const std::string& data, const std::string& split_name,
             const std::string& out, const std::string& csv, bool compare, const std::string& timestamp) {
  const auto detections = load_detections(results);
  if (detections.empty()) throw Error(Errc::InvalidInput, results + " holds no detection results");
  const Split split = load_split(data, parse_split_name(split_name));
  for (const auto& w : split.warnings) std::cerr << "[memeshield] warning: " << w << "\n";
  // Same convention as detect: replayed results get the fixed epoch stamp.
  const bool replayed = std::all_of(detections.begin(), detections.end(), [](const DetectionResult& r) {
    return std::all_of(r.trials.begin(), r.trials.end(),
                       [](const Trial& t) { return t.exchange.backend == Backend::replay; });
  });
  std::string stamp = timestamp;
  if (stamp.empty()) stamp = replayed ? std::string(kReplayTimestamp) : utc_timestamp_now();
  const auto report = build_report(detections, split, run_meta_for(detections.front().config, stamp));
  write_file_atomic(out, report_to_json(report));
  if (!csv.empty()) write_file_atomic(csv, report_to_csv(report));
  std::cout << "n=" << report.n << " accuracy " << format_double(report.accuracy) << " AUROC "
            << (report.auroc ? format_double(*report.auroc) : std::string("n/a")) << "\n";
  if (compare) std::cout << compare_to_reference(report);
  return kExitOk;
}

ReviewServer* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

int cmd_review_serve(const std::string& host, int port, const std::string& state, const std::string& data,
                     const std::string& ui, const std::string& auth_file) {
  ReviewStore store(state);
  ReviewServerOptions options;
  options.data_root = data;
  if (!ui.empty()) options.ui_dir = fs::path(ui);
  options.auth = AuthConfig::load(auth_file.empty() ? fs::path(state) / "auth.json" : fs::path(auth_file));
  ReviewServer server(store, options);
  const int bound = server.bind(host, port);
  if (bound < 0) throw Error(Errc::StorageError, "cannot bind " + host + ":" + std::to_string(port));
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "review service listening on " << host << ":" << bound << std::endl;
  server.listen_after_bind();
  g_server = nullptr;
  store.write_snapshot();
  return kExitOk;
}

int cmd_review_create(const std::string& state, const std::string& corrections, std::vector<std::string> panel,
                      int quorum, bool include_failed) {
  std::vector<CorrectionCandidate> candidates;
  std::ifstream in(corrections);
  if (!in) throw Error(Errc::NotFound, "cannot open " + corrections);
  std::string line;
  std::size_t skipped = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto c = candidate_from_json(line);
    if (c.status == CorrectionStatus::generation_failed ||
        (c.status == CorrectionStatus::verification_failed && !include_failed)) {
      ++skipped;
      continue;
    }
    candidates.push_back(std::move(c));
  }
  if (quorum == 0) quorum = static_cast<int>(panel.size());
  ReviewStore store(state);
  const auto id = store.create_batch(candidates, panel, quorum);
  std::cout << id << ": " << candidates.size() << " items (" << skipped << " candidates skipped)\n";
  return kExitOk;
}

int cmd_review_summary(const std::string& state, const std::string& batch_id) {
  ReviewStore store(state);
  const auto s = store.batch_summary(batch_id);
  std::cout << batch_id << ": success rate " << format_double(s.success_rate) << " (" << s.decided << " items)\n";
  for (const auto& [expert, agreement] : s.per_expert_agreement) {
    std::cout << "  " << expert << " agrees with the majority on " << format_double(agreement) << "\n";
  }
  return kExitOk;
}

int cmd_fixtures_verify(const RunOptions& opts) {
  auto config = opts.to_config();
  if (config.fixtures.empty()) throw Error(Errc::InvalidConfig, "--fixtures is required");
  const auto missing = verify_fixtures(config);
  for (const auto& m : missing) {
    std::cout << "missing " << m.meme_id << " trial " << m.trial << " " << m.digest << "\n";
  }
  std::cout << missing.size() << " fixtures missing\n";
  return missing.empty() ? kExitOk : kExitDegraded;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"memeshield: zero-shot hateful meme detection and correction with a vision-language model"};
  app.require_subcommand(1);

  RunOptions detect_opts;
  auto* detect = app.add_subcommand("detect", "Detect hateful memes in a split and score the run");
  detect_opts.add_to(*detect);

  RunOptions correct_opts;
  std::size_t correct_n = 50;
  int correct_budget = 3;
  std::string correct_select = "first_n";
  auto* correct = app.add_subcommand("correct", "Rewrite the text of hateful memes");
  correct_opts.add_to(*correct);
  correct->add_option("--n", correct_n, "Number of hateful memes to correct");
  correct->add_option("--budget", correct_budget, "Attempts per meme");
  correct->add_option("--select", correct_select, "first_n or seeded_random");

  std::string eval_results, eval_data, eval_split = "test_seen", eval_out = "report.json", eval_csv, eval_ts;
  bool eval_compare = false;
  auto* eval = app.add_subcommand("eval", "Score a detections.jsonl against gold labels");
  eval->add_option("--results", eval_results, "detections.jsonl from a detect run")->required();
  eval->add_option("--data", eval_data, "Dataset root")->required();
  eval->add_option("--split", eval_split);
  eval->add_option("--out", eval_out, "Report JSON path");
  eval->add_option("--csv", eval_csv, "Optional CSV export path");
  eval->add_option("--timestamp", eval_ts);
  eval->add_flag("--compare-reference", eval_compare, "Print deviation from published zero-shot numbers");

  auto* review = app.add_subcommand("review", "Expert review of corrections");
  review->require_subcommand(1);
  std::string serve_host = "0.0.0.0", serve_state = "review_state", serve_data = ".", serve_ui, serve_auth;
  int serve_port = 8080;
  auto* serve = review->add_subcommand("serve", "Run the review HTTP service");
  serve->add_option("--port", serve_port);
  serve->add_option("--host", serve_host);
  serve->add_option("--state", serve_state, "State directory (event log, snapshot)");
  serve->add_option("--data", serve_data, "Dataset root for images");
  serve->add_option("--ui", serve_ui, "Static UI bundle to mount at /");
  serve->add_option("--auth", serve_auth, "Token file (default <state>/auth.json)");

  std::string create_state = "review_state", create_corrections;
  std::vector<std::string> create_panel;
  int create_quorum = 0;
  bool create_include_failed = false;
  auto* create = review->add_subcommand("create", "Create a review batch from corrections.jsonl");
  create->add_option("--state", create_state);
  create->add_option("--corrections", create_corrections)->required();
  create->add_option("--panel", create_panel, "Expert ids")->required()->delimiter(',');
  create->add_option("--quorum", create_quorum, "Odd quorum (default: whole panel)");
  create->add_flag("--include-unverified", create_include_failed, "Also review rewrites that failed verification");

  std::string summary_state = "review_state", summary_batch;
  auto* summary = review->add_subcommand("summary", "Print a finished batch's summary");
  summary->add_option("--state", summary_state);
  summary->add_option("--batch", summary_batch)->required();

  auto* fixtures = app.add_subcommand("fixtures", "Manage replay fixtures");
  fixtures->require_subcommand(1);
  RunOptions record_opts;
  record_opts.record = true;
  auto* record = fixtures->add_subcommand("record", "Run detection over http and record every exchange");
  record_opts.add_to(*record);
  RunOptions verify_opts;
  verify_opts.backend = "replay";
  auto* verify = fixtures->add_subcommand("verify", "List fixtures a replay detection run would miss");
  verify_opts.add_to(*verify, false);
  std::string import_script, import_data, import_split = "dev_seen", import_store;
  auto* import = fixtures->add_subcommand("import", "Write hand-authored responses into a fixture store");
  import->add_option("--script", import_script)->required();
  import->add_option("--data", import_data)->required();
  import->add_option("--split", import_split);
  import->add_option("--fixtures", import_store)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*detect) return cmd_detect(detect_opts);
    if (*correct) return cmd_correct(correct_opts, correct_n, correct_budget, correct_select);
    if (*eval) return cmd_eval(eval_results, eval_data, eval_split, eval_out, eval_csv, eval_compare, eval_ts);
    if (*serve) return cmd_review_serve(serve_host, serve_port, serve_state, serve_data, serve_ui, serve_auth);
    if (*create) {
      return cmd_review_create(create_state, create_corrections, create_panel, create_quorum, create_include_failed);
    }
    if (*summary) return cmd_review_summary(summary_state, summary_batch);
    if (*record) {
      record_opts.backend = "http";
      return cmd_detect(record_opts);
    }
    if (*verify) return cmd_fixtures_verify(verify_opts);
    if (*import) {
      const auto n = import_fixtures(import_script, import_data, parse_split_name(import_split), import_store);
      std::cout << "wrote " << n << " fixtures to " << import_store << "\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "memeshield: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitFatal;
}
