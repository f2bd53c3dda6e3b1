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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "memeshield/correction.hpp"
#include "memeshield/dataset.hpp"
#include "memeshield/gateway.hpp"
#include "memeshield/metrics.hpp"
#include "memeshield/verdict.hpp"

namespace memeshield {

/// Report timestamp of replay runs, fixed so their reports are byte-stable.
inline constexpr std::string_view kReplayTimestamp = "1970-01-01T00:00:00Z";

struct RunConfig {
  std::filesystem::path data_root;
  SplitName split = SplitName::test_seen;
  DetectionConfig detection;  // tier, trials_k, use_ocr, tie rule, inference
  Backend backend = Backend::replay;
  std::string endpoint;                  // http backend
  std::string api_key;                   // http backend
  std::filesystem::path fixtures;        // replay store, or record target for http
  bool record_fixtures = false;          // http only: persist every exchange
  int parallelism = 1;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  std::optional<std::string> timestamp;  // report timestamp override

  /// Throws Error(InvalidConfig).
  void validate() const;
  /// Report timestamp: the override, else a fixed epoch on replay (so replay
  /// reports are reproducible), else the current UTC time.
  std::string report_timestamp() const;
};

/// Gateway for `config.backend`, wrapped for recording when requested.
std::shared_ptr<VlmGateway> make_gateway(const RunConfig& config);

/// Line-oriented run log (`run.log` in the output directory); warnings are
/// echoed to stderr. Thread-safe.
class RunLog {
 public:
  explicit RunLog(const std::filesystem::path& file);
  void info(const std::string& message);
  void warn(const std::string& message);

 private:
  std::mutex mu_;
  std::ofstream out_;
};

/// Calls fn(i) for i in [0, count) on up to `workers` threads. Exceptions
/// thrown by fn are the caller's responsibility; fn must not throw.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

struct MemeFailure {
  std::string meme_id;
  std::string error;
};

struct DetectionRun {
  std::size_t total = 0;      // records in the split
  std::size_t resumed = 0;    // already in detections.jsonl
  std::size_t completed = 0;  // finished by this invocation
  std::vector<MemeFailure> failures;
  bool degraded = false;      // more than 10% of memes failed
  std::vector<DetectionResult> results;  // all results, sorted by meme id
  std::optional<EvalReport> report;      // present when every scored record is labeled
};

/// Output files written by run_detection into config.output_dir.
inline constexpr std::string_view kDetectionsFile = "detections.jsonl";
inline constexpr std::string_view kReportJson = "report.json";
inline constexpr std::string_view kReportCsv = "report.csv";
inline constexpr std::string_view kPredictionsCsv = "predictions.csv";
inline constexpr std::string_view kManifestFile = "manifest.json";
inline constexpr std::string_view kFailuresFile = "failures.jsonl";
inline constexpr std::string_view kCorrectionsFile = "corrections.jsonl";

/// Detects every meme of the split with a bounded worker pool, appending
/// one line per meme to detections.jsonl as it finishes. Memes already
/// present there are skipped, so an interrupted run can be restarted.
DetectionRun run_detection(const RunConfig& config, VlmGateway& gateway);
DetectionRun run_detection(const RunConfig& config);

/// Loads a detections.jsonl, ignoring a torn final line.
std::vector<DetectionResult> load_detections(const std::filesystem::path& file);

RunMeta run_meta_for(const DetectionConfig& detection, std::string timestamp);

enum class Selection { first_n, seeded_random };
Selection parse_selection(std::string_view name);

/// Picks n hateful records (clipped to what exists). seeded_random draws
/// with a fixed-algorithm shuffle so a seed selects the same memes on every
/// platform. The result keeps dataset order.
std::vector<MemeRecord> select_hateful(const Split& split, Selection selection, std::size_t n,
                                       std::uint64_t seed, std::vector<std::string>* warnings = nullptr);

struct CorrectionRun {
  std::vector<CorrectionCandidate> candidates;
  std::vector<std::string> warnings;
};

/// Corrects the selected hateful memes and writes corrections.jsonl.
CorrectionRun run_correction(const RunConfig& config, Selection selection, std::size_t n, int budget,
                             VlmGateway& gateway);

struct MissingFixture {
  std::string meme_id;
  int trial = 0;
  std::string digest;
};

/// Digests a replay run of `config` would need that are absent from
/// config.fixtures.
std::vector<MissingFixture> verify_fixtures(const RunConfig& config);

/// Builds a fixture store from hand-authored responses. Script format:
///   {"inference": {...optional InferenceConfig overrides...},
///    "entries": [{"meme_id": "...", "kind": "detect", "tier": "complete",
///                 "ocr": false | true | "explicit text", "trial": 0,
///                 "response": "..."},
///                {"meme_id": "...", "kind": "correct", "trial": 0, "response": "..."}]}
/// Returns the number of fixtures written.
std::size_t import_fixtures(const std::filesystem::path& script, const std::filesystem::path& data_root,
                            SplitName split, const std::filesystem::path& store);

}  // namespace memeshield
