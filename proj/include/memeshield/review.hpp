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
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "memeshield/correction.hpp"

namespace memeshield {

enum class Judgment { success, failure };
enum class ItemStatus { pending, decided };

std::string_view to_string(Judgment j);
Judgment parse_judgment(std::string_view name);
std::string_view to_string(ItemStatus s);

/// What a reviewer needs to judge one rewrite.
struct ReviewInput {
  std::string meme_id;
  std::string image_path;
  std::string original_text;
  std::string generated_text;
};

ReviewInput review_input_from(const CorrectionCandidate& candidate);

struct StoredVerdict {
  Judgment judgment = Judgment::failure;
  std::string submitted_at;

  bool operator==(const StoredVerdict&) const = default;
};

struct ReviewItem {
  std::string item_id;
  std::string meme_id;
  std::string image_path;
  std::string original_text;
  std::string generated_text;
  ItemStatus status = ItemStatus::pending;
  std::optional<Judgment> outcome;  // set iff decided
  std::map<std::string, StoredVerdict> verdicts;  // by expert; never shown to other experts

  bool operator==(const ReviewItem&) const = default;
};

struct ReviewBatch {
  std::string batch_id;
  std::vector<std::string> panel;
  int quorum = 1;
  std::string created_at;
  std::vector<ReviewItem> items;

  bool operator==(const ReviewBatch&) const = default;
};

struct ExpertVerdict {
  std::string expert_id;
  std::string item_id;
  Judgment judgment = Judgment::failure;
  std::string submitted_at;  // filled with the current time when empty
};

struct SubmitOutcome {
  bool replaced = false;  // an earlier verdict by the same expert was overwritten
  ItemStatus item_status = ItemStatus::pending;
  std::optional<Judgment> outcome;
};

struct BatchSummary {
  double success_rate = 0.0;
  std::map<std::string, double> per_expert_agreement;
  std::size_t decided = 0;
  std::size_t total = 0;
};

/// A pending item as shown to one expert: no other expert's verdicts.
struct TaskView {
  std::string item_id;
  std::string batch_id;
  std::string meme_id;
  std::string image_url;
  std::string original_text;
  std::string generated_text;
  std::size_t index = 1;  // 1-based position among the expert's pending tasks
  std::size_t total = 0;
};

/// Review state backed by an append-only JSONL event log (`events.jsonl`)
/// plus a periodic `snapshot.json`. Opening a directory replays the log on
/// top of the latest snapshot, so state survives crashes. All public
/// methods are linearized by one mutex.
class ReviewStore {
 public:
  explicit ReviewStore(std::filesystem::path state_dir, std::size_t snapshot_every = 64);

  /// Throws Error(InvalidPanel) for an empty or repeated panel,
  /// Error(InvalidQuorum) for an even, non-positive or oversized quorum.
  std::string create_batch(std::span<const ReviewInput> inputs, const std::vector<std::string>& panel,
                           int quorum);
  std::string create_batch(std::span<const CorrectionCandidate> candidates,
                           const std::vector<std::string>& panel, int quorum);

  /// Throws Error(NotFound) for unknown items, Error(Forbidden) for experts
  /// outside the item's panel, Error(AlreadyDecided) once quorum was reached.
  SubmitOutcome submit_verdict(const ExpertVerdict& verdict);

  /// Throws Error(NotFound) or Error(BatchIncomplete).
  BatchSummary batch_summary(std::string_view batch_id) const;
  /// Progress without requiring completion.
  std::pair<std::size_t, std::size_t> batch_progress(std::string_view batch_id) const;

  ReviewBatch batch(std::string_view batch_id) const;
  std::vector<std::string> batch_ids() const;
  std::vector<TaskView> tasks_for(std::string_view expert_id) const;
  std::optional<std::string> image_path_for(std::string_view meme_id) const;

  /// Canonical JSON of the full state; equal states serialize identically.
  nlohmann::ordered_json state_json() const;
  std::uint64_t event_count() const;
  void write_snapshot();

  const std::filesystem::path& state_dir() const { return dir_; }

 private:
  void load();
  void apply(const nlohmann::ordered_json& event);
  void append(nlohmann::ordered_json event);
  nlohmann::ordered_json state_json_locked() const;
  void restore(const nlohmann::ordered_json& state);
  ReviewItem* find_item(std::string_view item_id, ReviewBatch** batch);
  const ReviewBatch* find_batch(std::string_view batch_id) const;

  std::filesystem::path dir_;
  std::size_t snapshot_every_;
  mutable std::mutex mu_;
  std::vector<ReviewBatch> batches_;
  std::uint64_t seq_ = 0;
  std::uint64_t next_batch_ = 1;
};

}  // namespace memeshield
