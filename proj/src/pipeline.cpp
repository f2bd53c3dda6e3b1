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

#include "memeshield/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <thread>

#include <json.hpp>

#include "memeshield/detector.hpp"
#include "memeshield/errors.hpp"
#include "memeshield/util.hpp"

namespace memeshield {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr double kDegradedFailureRate = 0.10;

ojson detection_config_json(const DetectionConfig& d) {
  return {{"tier", to_string(d.tier)},
          {"trials_k", d.trials_k},
          {"use_ocr", d.use_ocr},
          {"tie", d.tie == TieBreak::hateful ? "hateful" : "non_hateful"},
          {"model_id", d.inference.model_id},
          {"temperature", d.inference.temperature},
          {"top_p", d.inference.top_p},
          {"max_output_tokens", d.inference.max_output_tokens}};
}

ojson run_config_json(const RunConfig& c) {
  return {{"data_root", c.data_root.string()},
          {"split", to_string(c.split)},
          {"detection", detection_config_json(c.detection)},
          {"backend", to_string(c.backend)},
          {"endpoint", c.endpoint},
          {"fixtures", c.fixtures.string()},
          {"record_fixtures", c.record_fixtures},
          {"parallelism", c.parallelism},
          {"output_dir", c.output_dir.string()},
          {"seed", c.seed},
          {"timeout_seconds", c.detection.inference.timeout_seconds},
          {"retries", c.detection.inference.retries}};
}

bool same_run_settings(const DetectionConfig& a, const DetectionConfig& b) {
  return a.tier == b.tier && a.trials_k == b.trials_k && a.use_ocr == b.use_ocr && a.tie == b.tie &&
         a.inference.model_id == b.inference.model_id && a.inference.temperature == b.inference.temperature &&
         a.inference.top_p == b.inference.top_p &&
         a.inference.max_output_tokens == b.inference.max_output_tokens;
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace

void RunConfig::validate() const {
  if (detection.trials_k < 1) throw Error(Errc::InvalidConfig, "trials must be >= 1");
  if (parallelism < 1) throw Error(Errc::InvalidConfig, "parallelism must be >= 1");
  detection.inference.validate();
  if (backend == Backend::http && endpoint.empty()) {
    throw Error(Errc::InvalidConfig, "http backend needs an endpoint (--endpoint or MEMESHIELD_ENDPOINT)");
  }
  if (backend == Backend::replay && fixtures.empty()) {
    throw Error(Errc::InvalidConfig, "replay backend needs a fixture store (--fixtures)");
  }
  if (record_fixtures && (backend != Backend::http || fixtures.empty())) {
    throw Error(Errc::InvalidConfig, "recording needs the http backend and a fixture store");
  }
  if (output_dir.empty()) throw Error(Errc::InvalidConfig, "output directory is required");
}

std::string RunConfig::report_timestamp() const {
  if (timestamp) return *timestamp;
  if (backend == Backend::replay) return std::string(kReplayTimestamp);
  return utc_timestamp_now();
}

std::shared_ptr<VlmGateway> make_gateway(const RunConfig& config) {
  if (config.backend == Backend::replay) return std::make_shared<ReplayGateway>(config.fixtures);
  auto http = std::make_shared<HttpGateway>(HttpGatewayOptions{config.endpoint, config.api_key});
  if (config.record_fixtures) return std::make_shared<RecordingGateway>(http, config.fixtures);
  return http;
}

RunLog::RunLog(const fs::path& file) {
  std::error_code ec;
  if (file.has_parent_path()) fs::create_directories(file.parent_path(), ec);
  out_.open(file, std::ios::app);
}

void RunLog::info(const std::string& message) {
  std::lock_guard lock(mu_);
  out_ << utc_timestamp_now() << " INFO " << message << '\n';
  out_.flush();
}

void RunLog::warn(const std::string& message) {
  std::lock_guard lock(mu_);
  out_ << utc_timestamp_now() << " WARN " << message << '\n';
  out_.flush();
  std::cerr << "[memeshield] warning: " << message << '\n';
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const auto n_threads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

std::vector<DetectionResult> load_detections(const fs::path& file) {
  std::vector<DetectionResult> out;
  std::ifstream in(file, std::ios::binary);
  if (!in) return out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.push_back(detection_result_from_json(line));
    } catch (const Error&) {
      if (in.peek() != std::char_traits<char>::eof()) {
        throw Error(Errc::ParseError, file.string() + ": malformed line " + std::to_string(line_no));
      }
      // Torn final line from an interrupted run; that meme is redone.
    }
  }
  return out;
}

RunMeta run_meta_for(const DetectionConfig& detection, std::string timestamp) {
  return {detection.tier,
          detection.trials_k,
          detection.use_ocr,
          detection.inference.model_id,
          detection_template_hash(detection.tier, detection.use_ocr),
          std::move(timestamp)};
}

DetectionRun run_detection(const RunConfig& config) {
  config.validate();
  auto gateway = make_gateway(config);
  return run_detection(config, *gateway);
}

DetectionRun run_detection(const RunConfig& config, VlmGateway& gateway) {
  config.validate();
  fs::create_directories(config.output_dir);
  RunLog log(config.output_dir / "run.log");
  const Split split = load_split(config.data_root, config.split);
  for (const auto& w : split.warnings) log.warn(w);
  log.info("detect " + std::string(to_string(config.split)) + ": " + std::to_string(split.records.size()) +
           " memes, tier " + std::string(to_string(config.detection.tier)) + ", k=" +
           std::to_string(config.detection.trials_k) + (config.detection.use_ocr ? ", with OCR" : "") +
           ", prompt " + detection_template_hash(config.detection.tier, config.detection.use_ocr));

  DetectionRun run;
  run.total = split.records.size();

  // Resume: keep finished memes of this split, rewrite the file without any torn tail.
  const fs::path results_file = config.output_dir / kDetectionsFile;
  std::map<std::string, DetectionResult> done;
  for (auto& r : load_detections(results_file)) {
    if (!same_run_settings(r.config, config.detection)) {
      throw Error(Errc::InvalidConfig, results_file.string() + " holds results from different run settings");
    }
    if (split.find(r.meme_id) != nullptr) done.insert_or_assign(r.meme_id, std::move(r));
  }
  {
    std::string kept;
    for (const auto& [_, r] : done) kept += detection_result_to_json(r) + "\n";
    write_file_atomic(results_file, kept);
  }
  run.resumed = done.size();
  if (run.resumed > 0) log.info("resuming: " + std::to_string(run.resumed) + " memes already done");

  std::vector<const MemeRecord*> todo;
  for (const auto& r : split.records) {
    if (done.count(r.id) == 0) todo.push_back(&r);
  }

  std::mutex sink_mu;
  std::ofstream sink(results_file, std::ios::binary | std::ios::app);
  if (!sink) throw Error(Errc::StorageError, "cannot append to " + results_file.string());
  std::vector<std::optional<DetectionResult>> fresh(todo.size());
  std::vector<std::optional<MemeFailure>> failed(todo.size());

  parallel_for(todo.size(), config.parallelism, [&](std::size_t i) {
    const MemeRecord& rec = *todo[i];
    try {
      const ImageData image = resolve_image(rec, config.data_root);
      DetectionResult res = detect_meme(rec, image, gateway, config.detection);
      const std::string line = detection_result_to_json(res) + "\n";
      {
        std::lock_guard lock(sink_mu);
        sink << line;
        sink.flush();
      }
      fresh[i] = std::move(res);
    } catch (const std::exception& e) {
      failed[i] = MemeFailure{rec.id, e.what()};
      log.warn("meme " + rec.id + " failed: " + e.what());
    }
  });
  sink.close();

  for (auto& r : fresh) {
    if (r) {
      ++run.completed;
      done.insert_or_assign(r->meme_id, std::move(*r));
    }
  }
  for (auto& f : failed) {
    if (f) run.failures.push_back(std::move(*f));
  }
  std::sort(run.failures.begin(), run.failures.end(),
            [](const MemeFailure& a, const MemeFailure& b) { return a.meme_id < b.meme_id; });
  run.degraded = run.total > 0 &&
                 static_cast<double>(run.failures.size()) > kDegradedFailureRate * static_cast<double>(run.total);

  for (auto& [_, r] : done) run.results.push_back(std::move(r));  // std::map keeps id order

  {
    std::string lines;
    for (const auto& f : run.failures) lines += ojson{{"meme_id", f.meme_id}, {"error", f.error}}.dump() + "\n";
    write_file_atomic(config.output_dir / kFailuresFile, lines);
  }

  const bool labeled = std::all_of(run.results.begin(), run.results.end(), [&](const DetectionResult& r) {
    const auto* rec = split.find(r.meme_id);
    return rec != nullptr && rec->label.has_value();
  });
  if (labeled && !run.results.empty()) {
    run.report = build_report(run.results, split, run_meta_for(config.detection, config.report_timestamp()));
    write_file_atomic(config.output_dir / kReportJson, report_to_json(*run.report));
    write_file_atomic(config.output_dir / kReportCsv, report_to_csv(*run.report));
    if (!run.report->auroc) log.warn("AUROC undefined: scored memes cover a single class");
  } else {
    std::string csv = "id,pred,score\n";
    for (const auto& r : run.results) {
      csv += r.meme_id + "," + std::to_string(r.predicted_label) + "," + format_double(r.score) + "\n";
    }
    write_file_atomic(config.output_dir / kPredictionsCsv, csv);
    if (!run.results.empty()) log.info("split has unlabeled memes; wrote predictions only");
  }

  std::set<std::string> digests;
  for (const auto& r : run.results) {
    for (const auto& t : r.trials) digests.insert(t.exchange.request_digest);
  }
  ojson manifest = {
      {"command", "detect"},
      {"template_version", kTemplateVersion},
      {"prompt_hash", detection_template_hash(config.detection.tier, config.detection.use_ocr)},
      {"model_id", config.detection.inference.model_id},
      {"config", run_config_json(config)},
      {"counts",
       {{"total", run.total}, {"resumed", run.resumed}, {"completed", run.completed},
        {"failed", run.failures.size()}}},
      {"degraded", run.degraded},
      {"split_warnings", split.warnings},
      {"fixture_digests", digests},
  };
  write_file_atomic(config.output_dir / kManifestFile, manifest.dump(2) + "\n");

  log.info("done: " + std::to_string(run.completed) + " new, " + std::to_string(run.resumed) + " resumed, " +
           std::to_string(run.failures.size()) + " failed" + (run.degraded ? " (degraded)" : ""));
  return run;
}

Selection parse_selection(std::string_view name) {
  if (name == "first_n") return Selection::first_n;
  if (name == "seeded_random") return Selection::seeded_random;
  throw Error(Errc::InvalidInput, "selection must be first_n or seeded_random");
}

std::vector<MemeRecord> select_hateful(const Split& split, Selection selection, std::size_t n,
                                       std::uint64_t seed, std::vector<std::string>* warnings) {
  auto hateful = filter_hateful(split);
  if (n > hateful.size()) {
    if (warnings) {
      warnings->push_back("requested " + std::to_string(n) + " memes but the split has only " +
                          std::to_string(hateful.size()) + " hateful ones");
    }
    n = hateful.size();
  }
  if (n == 0) {
    if (warnings) warnings->push_back("no memes selected for correction");
    return {};
  }
  std::vector<std::size_t> order(hateful.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (selection == Selection::seeded_random) {
    // Fisher-Yates with our own bounded draw; std::shuffle and the standard
    // distributions are not portable across library implementations.
    std::mt19937_64 rng(seed);
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      std::swap(order[i], order[bounded(rng, i + 1)]);
    }
  }
  order.resize(n);
  std::sort(order.begin(), order.end());
  std::vector<MemeRecord> out;
  out.reserve(n);
  for (auto i : order) out.push_back(hateful[i]);
  return out;
}

CorrectionRun run_correction(const RunConfig& config, Selection selection, std::size_t n, int budget,
                             VlmGateway& gateway) {
  config.validate();
  if (budget < 1) throw Error(Errc::InvalidConfig, "budget must be >= 1");
  fs::create_directories(config.output_dir);
  RunLog log(config.output_dir / "run.log");
  const Split split = load_split(config.data_root, config.split);
  for (const auto& w : split.warnings) log.warn(w);

  CorrectionRun run;
  const auto selected = select_hateful(split, selection, n, config.seed, &run.warnings);
  for (const auto& w : run.warnings) log.warn(w);
  log.info("correct " + std::to_string(selected.size()) + " memes, budget " + std::to_string(budget));

  CorrectionConfig cc;
  cc.budget = budget;
  cc.verification = config.detection;

  run.candidates.resize(selected.size());
  parallel_for(selected.size(), config.parallelism, [&](std::size_t i) {
    const auto& rec = selected[i];
    try {
      const ImageData image = resolve_image(rec, config.data_root);
      run.candidates[i] = correct_meme(rec, image, gateway, cc);
    } catch (const std::exception& e) {
      auto& c = run.candidates[i];
      c.meme_id = rec.id;
      c.image_path = rec.image_path;
      c.original_text = rec.text;
      c.status = CorrectionStatus::generation_failed;
      c.attempts = 1;
      c.history.push_back({1, {}, {}, {}, std::nullopt, e.what()});
      log.warn("meme " + rec.id + " failed: " + e.what());
    }
  });

  std::string lines;
  std::set<std::string> digests;
  std::map<std::string, std::size_t> by_status;
  for (const auto& c : run.candidates) {
    lines += candidate_to_json(c) + "\n";
    ++by_status[std::string(to_string(c.status))];
    for (const auto& a : c.history) {
      if (!a.request_digest.empty()) digests.insert(a.request_digest);
      if (a.verification) {
        for (const auto& t : a.verification->trials) digests.insert(t.exchange.request_digest);
      }
    }
  }
  write_file_atomic(config.output_dir / kCorrectionsFile, lines);
  ojson manifest = {{"command", "correct"},
                    {"template_version", kTemplateVersion},
                    {"correction_prompt_hash", correction_template_hash()},
                    {"verification_prompt_hash", detection_template_hash(PromptTier::complete, true)},
                    {"model_id", config.detection.inference.model_id},
                    {"config", run_config_json(config)},
                    {"selection", selection == Selection::first_n ? "first_n" : "seeded_random"},
                    {"n", n},
                    {"budget", budget},
                    {"selected", [&] {
                       std::vector<std::string> ids;
                       for (const auto& r : selected) ids.push_back(r.id);
                       return ids;
                     }()},
                    {"status_counts", by_status},
                    {"warnings", run.warnings},
                    {"fixture_digests", digests}};
  write_file_atomic(config.output_dir / "correction_manifest.json", manifest.dump(2) + "\n");
  return run;
}

std::vector<MissingFixture> verify_fixtures(const RunConfig& config) {
  const Split split = load_split(config.data_root, config.split);
  std::vector<MissingFixture> missing;
  for (const auto& rec : split.records) {
    const ImageData image = resolve_image(rec, config.data_root);
    std::optional<std::string_view> ocr;
    if (config.detection.use_ocr) ocr = rec.text;
    const auto prompt = build_detection_prompt(config.detection.tier, ocr);
    for (int t = 0; t < config.detection.trials_k; ++t) {
      const auto digest = request_digest(prompt, image, config.detection.inference, t);
      if (!fs::is_regular_file(fixture_path(config.fixtures, digest))) missing.push_back({rec.id, t, digest});
    }
  }
  return missing;
}

std::size_t import_fixtures(const fs::path& script, const fs::path& data_root, SplitName split_name,
                            const fs::path& store) {
  ojson j;
  try {
    j = ojson::parse(read_file_text(script));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, script.string() + ": " + e.what());
  }
  InferenceConfig inference;
  if (j.contains("inference")) {
    const auto& inf = j.at("inference");
    inference.model_id = inf.value("model_id", inference.model_id);
    inference.temperature = inf.value("temperature", inference.temperature);
    inference.top_p = inf.value("top_p", inference.top_p);
    inference.max_output_tokens = inf.value("max_output_tokens", inference.max_output_tokens);
  }
  inference.validate();
  const Split split = load_split(data_root, split_name);
  std::size_t written = 0;
  std::map<std::string, std::string> seen;  // digest -> response, to catch conflicting entries
  for (const auto& e : j.at("entries")) {
    const auto id = e.at("meme_id").get<std::string>();
    const MemeRecord* rec = split.find(id);
    if (rec == nullptr) throw Error(Errc::NotFound, "fixture script names unknown meme '" + id + "'");
    const ImageData image = resolve_image(*rec, data_root);
    const auto kind = e.at("kind").get<std::string>();
    PromptText prompt;
    if (kind == "detect") {
      std::optional<std::string> ocr;
      const auto& o = e.value("ocr", ojson(false));
      if (o.is_string()) {
        ocr = o.get<std::string>();
      } else if (o.is_boolean() && o.get<bool>()) {
        ocr = rec->text;
      }
      prompt = build_detection_prompt(parse_prompt_tier(e.value("tier", "complete")),
                                      ocr ? std::optional<std::string_view>(*ocr) : std::nullopt);
    } else if (kind == "correct") {
      prompt = build_correction_prompt();
    } else {
      throw Error(Errc::ParseError, "fixture kind must be 'detect' or 'correct'");
    }
    const auto response = e.at("response").get<std::string>();
    const auto digest = request_digest(prompt, image, inference, e.at("trial").get<int>());
    if (auto [it, inserted] = seen.emplace(digest, response); !inserted && it->second != response) {
      throw Error(Errc::InvalidInput, "two script entries map to digest " + digest + " with different responses");
    }
    write_file_atomic(fixture_path(store, digest), response);
    ++written;
  }
  return written;
}

}  // namespace memeshield
