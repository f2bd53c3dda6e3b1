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

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

#include "memeshield/errors.hpp"
#include "memeshield/review.hpp"
#include "memeshield/util.hpp"

namespace memeshield {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kEventLog = "events.jsonl";
constexpr std::string_view kSnapshot = "snapshot.json";

std::string pad(std::uint64_t v, int width) {
  std::string s = std::to_string(v);
  if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  return s;
}

}  // namespace

std::string_view to_string(Judgment j) { return j == Judgment::success ? "success" : "failure"; }

Judgment parse_judgment(std::string_view name) {
  if (name == "success") return Judgment::success;
  if (name == "failure") return Judgment::failure;
  throw Error(Errc::InvalidInput, "judgment must be 'success' or 'failure'");
}

std::string_view to_string(ItemStatus s) { return s == ItemStatus::pending ? "pending" : "decided"; }

ReviewInput review_input_from(const CorrectionCandidate& c) {
  return {c.meme_id, c.image_path, c.original_text, c.generated_text};
}

ReviewStore::ReviewStore(fs::path state_dir, std::size_t snapshot_every)
    : dir_(std::move(state_dir)), snapshot_every_(std::max<std::size_t>(1, snapshot_every)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (!fs::is_directory(dir_)) throw Error(Errc::StorageError, "cannot create " + dir_.string());
  load();
}

void ReviewStore::load() {
  std::lock_guard lock(mu_);
  const auto snap = dir_ / kSnapshot;
  if (fs::exists(snap)) {
    try {
      restore(ojson::parse(read_file_text(snap)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::StorageError, "corrupt snapshot " + snap.string() + ": " + e.what());
    }
  }
  const auto log = dir_ / kEventLog;
  std::ifstream in(log, std::ios::binary);
  if (!in) return;
  std::string line;
  std::uint64_t good_bytes = 0;
  bool torn = false;
  while (std::getline(in, line)) {
    const bool complete = !in.eof();
    ojson event;
    try {
      event = ojson::parse(line);
    } catch (const nlohmann::json::exception&) {
      // Only the final line may be torn by a crash mid-append.
      if (in.peek() != std::char_traits<char>::eof()) {
        throw Error(Errc::StorageError, "corrupt event log " + log.string());
      }
      torn = true;
      break;
    }
    if (!complete) {
      torn = true;
      break;
    }
    good_bytes += line.size() + 1;
    if (event.at("seq").get<std::uint64_t>() <= seq_) continue;  // already in the snapshot
    apply(event);
  }
  in.close();
  if (torn) fs::resize_file(log, good_bytes);
}

void ReviewStore::restore(const ojson& state) {
  seq_ = state.at("seq").get<std::uint64_t>();
  next_batch_ = state.at("next_batch").get<std::uint64_t>();
  batches_.clear();
  for (const auto& b : state.at("batches")) {
    ReviewBatch batch;
    batch.batch_id = b.at("batch_id").get<std::string>();
    batch.panel = b.at("panel").get<std::vector<std::string>>();
    batch.quorum = b.at("quorum").get<int>();
    batch.created_at = b.at("created_at").get<std::string>();
    for (const auto& i : b.at("items")) {
      ReviewItem item;
      item.item_id = i.at("item_id").get<std::string>();
      item.meme_id = i.at("meme_id").get<std::string>();
      item.image_path = i.at("image_path").get<std::string>();
      item.original_text = i.at("original_text").get<std::string>();
      item.generated_text = i.at("generated_text").get<std::string>();
      item.status = i.at("status").get<std::string>() == "decided" ? ItemStatus::decided : ItemStatus::pending;
      if (!i.at("outcome").is_null()) item.outcome = parse_judgment(i.at("outcome").get<std::string>());
      for (const auto& [expert, v] : i.at("verdicts").items()) {
        item.verdicts[expert] = {parse_judgment(v.at("judgment").get<std::string>()),
                                 v.at("submitted_at").get<std::string>()};
      }
      batch.items.push_back(std::move(item));
    }
    batches_.push_back(std::move(batch));
  }
}

ojson ReviewStore::state_json_locked() const {
  ojson batches = ojson::array();
  for (const auto& b : batches_) {
    ojson items = ojson::array();
    for (const auto& i : b.items) {
      ojson verdicts = ojson::object();
      for (const auto& [expert, v] : i.verdicts) {
        verdicts[expert] = {{"judgment", to_string(v.judgment)}, {"submitted_at", v.submitted_at}};
      }
      items.push_back({{"item_id", i.item_id},
                       {"meme_id", i.meme_id},
                       {"image_path", i.image_path},
                       {"original_text", i.original_text},
                       {"generated_text", i.generated_text},
                       {"status", to_string(i.status)},
                       {"outcome", i.outcome ? ojson(to_string(*i.outcome)) : ojson(nullptr)},
                       {"verdicts", std::move(verdicts)}});
    }
    batches.push_back({{"batch_id", b.batch_id},
                       {"panel", b.panel},
                       {"quorum", b.quorum},
                       {"created_at", b.created_at},
                       {"items", std::move(items)}});
  }
  return {{"seq", seq_}, {"next_batch", next_batch_}, {"batches", std::move(batches)}};
}

ojson ReviewStore::state_json() const {
  std::lock_guard lock(mu_);
  return state_json_locked();
}

std::uint64_t ReviewStore::event_count() const {
  std::lock_guard lock(mu_);
  return seq_;
}

void ReviewStore::write_snapshot() {
  std::lock_guard lock(mu_);
  write_file_atomic(dir_ / kSnapshot, state_json_locked().dump() + "\n");
}

// State transition for one already-validated event. Used both live and on replay.
void ReviewStore::apply(const ojson& event) {
  const auto type = event.at("type").get<std::string>();
  if (type == "batch_created") {
    ReviewBatch b;
    b.batch_id = event.at("batch_id").get<std::string>();
    b.panel = event.at("panel").get<std::vector<std::string>>();
    b.quorum = event.at("quorum").get<int>();
    b.created_at = event.at("created_at").get<std::string>();
    for (const auto& i : event.at("items")) {
      ReviewItem item;
      item.item_id = i.at("item_id").get<std::string>();
      item.meme_id = i.at("meme_id").get<std::string>();
      item.image_path = i.at("image_path").get<std::string>();
      item.original_text = i.at("original_text").get<std::string>();
      item.generated_text = i.at("generated_text").get<std::string>();
      b.items.push_back(std::move(item));
    }
    batches_.push_back(std::move(b));
    next_batch_ = std::max(next_batch_, event.at("batch_number").get<std::uint64_t>() + 1);
  } else if (type == "verdict_submitted") {
    ReviewBatch* batch = nullptr;
    ReviewItem* item = find_item(event.at("item_id").get<std::string>(), &batch);
    if (item == nullptr) throw Error(Errc::StorageError, "event references unknown item");
    item->verdicts[event.at("expert_id").get<std::string>()] = {
        parse_judgment(event.at("judgment").get<std::string>()),
        event.at("submitted_at").get<std::string>()};
    if (static_cast<int>(item->verdicts.size()) >= batch->quorum) {
      int successes = 0;
      for (const auto& [_, v] : item->verdicts) successes += v.judgment == Judgment::success ? 1 : 0;
      item->status = ItemStatus::decided;
      item->outcome = 2 * successes > static_cast<int>(item->verdicts.size()) ? Judgment::success
                                                                              : Judgment::failure;
    }
  } else {
    throw Error(Errc::StorageError, "unknown event type '" + type + "'");
  }
  seq_ = event.at("seq").get<std::uint64_t>();
}

void ReviewStore::append(ojson event) {
  event["seq"] = seq_ + 1;
  {
    std::ofstream out(dir_ / kEventLog, std::ios::binary | std::ios::app);
    if (!out) throw Error(Errc::StorageError, "cannot append to event log");
    out << event.dump() << '\n';
    out.flush();
    if (!out) throw Error(Errc::StorageError, "event log write failed");
  }
  apply(event);
  if (seq_ % snapshot_every_ == 0) {
    write_file_atomic(dir_ / kSnapshot, state_json_locked().dump() + "\n");
  }
}

ReviewItem* ReviewStore::find_item(std::string_view item_id, ReviewBatch** batch) {
  for (auto& b : batches_) {
    for (auto& i : b.items) {
      if (i.item_id == item_id) {
        if (batch != nullptr) *batch = &b;
        return &i;
      }
    }
  }
  return nullptr;
}

const ReviewBatch* ReviewStore::find_batch(std::string_view batch_id) const {
  for (const auto& b : batches_) {
    if (b.batch_id == batch_id) return &b;
  }
  return nullptr;
}

std::string ReviewStore::create_batch(std::span<const ReviewInput> inputs,
                                      const std::vector<std::string>& panel, int quorum) {
  if (panel.empty()) throw Error(Errc::InvalidPanel, "panel is empty");
  std::set<std::string> unique(panel.begin(), panel.end());
  if (unique.size() != panel.size()) throw Error(Errc::InvalidPanel, "panel lists an expert twice");
  if (unique.count("") != 0) throw Error(Errc::InvalidPanel, "empty expert id");
  if (quorum < 1 || quorum % 2 == 0) {
    throw Error(Errc::InvalidQuorum, "quorum must be a positive odd number, got " + std::to_string(quorum));
  }
  if (static_cast<std::size_t>(quorum) > panel.size()) {
    throw Error(Errc::InvalidQuorum, "quorum exceeds panel size");
  }
  if (inputs.empty()) std::clog << "[memeshield] warning: creating an empty review batch\n";

  std::lock_guard lock(mu_);
  const std::uint64_t number = next_batch_;
  const std::string batch_id = "batch-" + pad(number, 4);
  ojson items = ojson::array();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    items.push_back({{"item_id", batch_id + "-" + pad(i + 1, 3)},
                     {"meme_id", inputs[i].meme_id},
                     {"image_path", inputs[i].image_path},
                     {"original_text", inputs[i].original_text},
                     {"generated_text", inputs[i].generated_text}});
  }
  append({{"type", "batch_created"},
          {"batch_id", batch_id},
          {"batch_number", number},
          {"panel", panel},
          {"quorum", quorum},
          {"created_at", utc_timestamp_now()},
          {"items", std::move(items)}});
  return batch_id;
}

std::string ReviewStore::create_batch(std::span<const CorrectionCandidate> candidates,
                                      const std::vector<std::string>& panel, int quorum) {
  std::vector<ReviewInput> inputs;
  inputs.reserve(candidates.size());
  for (const auto& c : candidates) inputs.push_back(review_input_from(c));
  return create_batch(inputs, panel, quorum);
}

SubmitOutcome ReviewStore::submit_verdict(const ExpertVerdict& verdict) {
  std::lock_guard lock(mu_);
  ReviewBatch* batch = nullptr;
  ReviewItem* item = find_item(verdict.item_id, &batch);
  if (item == nullptr) throw Error(Errc::NotFound, "no review item '" + verdict.item_id + "'");
  if (std::find(batch->panel.begin(), batch->panel.end(), verdict.expert_id) == batch->panel.end()) {
    throw Error(Errc::Forbidden, "expert '" + verdict.expert_id + "' is not on the panel of " + batch->batch_id);
  }
  if (item->status == ItemStatus::decided) {
    throw Error(Errc::AlreadyDecided, "item '" + verdict.item_id + "' is already decided");
  }
  SubmitOutcome result;
  ojson event = {{"type", "verdict_submitted"},
                 {"expert_id", verdict.expert_id},
                 {"item_id", verdict.item_id},
                 {"judgment", to_string(verdict.judgment)},
                 {"submitted_at", verdict.submitted_at.empty() ? utc_timestamp_now() : verdict.submitted_at}};
  if (auto prev = item->verdicts.find(verdict.expert_id); prev != item->verdicts.end()) {
    result.replaced = true;
    event["replaces"] = to_string(prev->second.judgment);  // audit trail of the overwrite
  }
  append(std::move(event));
  result.item_status = item->status;
  result.outcome = item->outcome;
  return result;
}

std::pair<std::size_t, std::size_t> ReviewStore::batch_progress(std::string_view batch_id) const {
  std::lock_guard lock(mu_);
  const ReviewBatch* b = find_batch(batch_id);
  if (b == nullptr) throw Error(Errc::NotFound, "no batch '" + std::string(batch_id) + "'");
  std::size_t decided = 0;
  for (const auto& i : b->items) decided += i.status == ItemStatus::decided ? 1 : 0;
  return {decided, b->items.size()};
}

BatchSummary ReviewStore::batch_summary(std::string_view batch_id) const {
  std::lock_guard lock(mu_);
  const ReviewBatch* b = find_batch(batch_id);
  if (b == nullptr) throw Error(Errc::NotFound, "no batch '" + std::string(batch_id) + "'");
  BatchSummary s;
  s.total = b->items.size();
  std::size_t successes = 0;
  std::map<std::string, std::pair<std::size_t, std::size_t>> agree;  // expert -> (matches, judged)
  for (const auto& i : b->items) {
    if (i.status != ItemStatus::decided) continue;
    ++s.decided;
    successes += *i.outcome == Judgment::success ? 1 : 0;
    for (const auto& [expert, v] : i.verdicts) {
      auto& [matches, judged] = agree[expert];
      ++judged;
      matches += v.judgment == *i.outcome ? 1 : 0;
    }
  }
  if (s.decided != s.total) {
    throw Error(Errc::BatchIncomplete, std::to_string(s.total - s.decided) + " of " +
                                           std::to_string(s.total) + " items still pending");
  }
  s.success_rate = s.total == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(s.total);
  for (const auto& [expert, counts] : agree) {
    s.per_expert_agreement[expert] = static_cast<double>(counts.first) / static_cast<double>(counts.second);
  }
  return s;
}

ReviewBatch ReviewStore::batch(std::string_view batch_id) const {
  std::lock_guard lock(mu_);
  const ReviewBatch* b = find_batch(batch_id);
  if (b == nullptr) throw Error(Errc::NotFound, "no batch '" + std::string(batch_id) + "'");
  return *b;
}

std::vector<std::string> ReviewStore::batch_ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& b : batches_) out.push_back(b.batch_id);
  return out;
}

std::vector<TaskView> ReviewStore::tasks_for(std::string_view expert_id) const {
  std::lock_guard lock(mu_);
  std::vector<TaskView> out;
  for (const auto& b : batches_) {
    if (std::find(b.panel.begin(), b.panel.end(), expert_id) == b.panel.end()) continue;
    for (const auto& i : b.items) {
      if (i.status != ItemStatus::pending) continue;
      if (i.verdicts.count(std::string(expert_id)) != 0) continue;
      out.push_back({i.item_id, b.batch_id, i.meme_id, "/images/" + i.meme_id, i.original_text,
                     i.generated_text, 0, 0});
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].index = k + 1;
    out[k].total = out.size();
  }
  return out;
}

std::optional<std::string> ReviewStore::image_path_for(std::string_view meme_id) const {
  std::lock_guard lock(mu_);
  for (const auto& b : batches_) {
    for (const auto& i : b.items) {
      if (i.meme_id == meme_id) return i.image_path;
    }
  }
  return std::nullopt;
}

}  // namespace memeshield
