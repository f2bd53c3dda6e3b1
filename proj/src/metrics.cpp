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

#include "memeshield/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "memeshield/errors.hpp"
#include "memeshield/util.hpp"

namespace memeshield {

using ojson = nlohmann::ordered_json;

namespace {

void check_binary(std::span<const int> labels) {
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(Errc::InvalidInput, "labels must be 0 or 1");
  }
}

constexpr ReferenceRow kReference[] = {
    {SplitName::test_seen, false, 63.00, 65.77},
    {SplitName::test_seen, true, 62.50, 67.07},
    {SplitName::test_unseen, false, 62.15, 63.92},
    {SplitName::test_unseen, true, 64.20, 64.12},
};

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string signed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.2f", v);
  return buf;
}

}  // namespace

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.empty() || predictions.size() != labels.size()) {
    throw Error(Errc::InvalidInput, "accuracy needs equal, non-zero lengths");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double auroc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error(Errc::InvalidInput, "auroc length mismatch");
  check_binary(labels);
  for (double s : scores) {
    if (std::isnan(s)) throw Error(Errc::InvalidInput, "auroc score is NaN");
  }
  const auto positives = static_cast<std::int64_t>(std::count(labels.begin(), labels.end(), 1));
  const auto negatives = static_cast<std::int64_t>(labels.size()) - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(Errc::UndefinedAuroc, "auroc needs both positive and negative labels");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the rank sum of the positives, with tied groups sharing their
  // midrank. Doubling keeps everything integral.
  std::int64_t twice_rank_sum = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::int64_t group_pos = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      group_pos += labels[order[j]];
      ++j;
    }
    twice_rank_sum += static_cast<std::int64_t>(i + j + 1) * group_pos;
    i = j;
  }
  const std::int64_t twice_u = twice_rank_sum - positives * (positives + 1);
  return static_cast<double>(twice_u) / static_cast<double>(2 * positives * negatives);
}

EvalReport build_report(std::span<const DetectionResult> results, const Split& split,
                        const RunMeta& meta) {
  std::unordered_map<std::string_view, const MemeRecord*> by_id;
  for (const auto& r : split.records) by_id.emplace(r.id, &r);

  EvalReport report;
  report.split = split.name;
  report.run_meta = meta;
  report.per_meme.reserve(results.size());
  for (const auto& res : results) {
    const auto it = by_id.find(res.meme_id);
    if (it == by_id.end()) {
      throw Error(Errc::JoinError, "result for '" + res.meme_id + "' has no record in " +
                                       std::string(to_string(split.name)));
    }
    if (!it->second->label) throw Error(Errc::MissingLabel, "meme " + res.meme_id + " has no label");
    report.per_meme.push_back({res.meme_id, *it->second->label, res.predicted_label, res.score});
  }
  std::sort(report.per_meme.begin(), report.per_meme.end(),
            [](const MemeScore& a, const MemeScore& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < report.per_meme.size(); ++i) {
    if (report.per_meme[i].id == report.per_meme[i - 1].id) {
      throw Error(Errc::JoinError, "duplicate result for '" + report.per_meme[i].id + "'");
    }
  }
  return recompute(std::move(report));
}

EvalReport recompute(EvalReport report) {
  std::vector<int> preds, labels;
  std::vector<double> scores;
  for (const auto& m : report.per_meme) {
    preds.push_back(m.predicted_label);
    labels.push_back(m.label);
    scores.push_back(m.score);
  }
  report.n = report.per_meme.size();
  report.accuracy = report.n == 0 ? 0.0 : accuracy(preds, labels);
  report.auroc.reset();
  const auto pos = std::count(labels.begin(), labels.end(), 1);
  if (pos > 0 && pos < static_cast<std::ptrdiff_t>(labels.size())) report.auroc = auroc(scores, labels);
  return report;
}

std::string report_to_json(const EvalReport& report) {
  ojson j;
  j["split"] = to_string(report.split);
  j["n"] = report.n;
  j["accuracy"] = report.accuracy;
  j["auroc"] = report.auroc ? ojson(*report.auroc) : ojson(nullptr);
  j["run_meta"] = {
      {"tier", to_string(report.run_meta.tier)},
      {"trials_k", report.run_meta.trials_k},
      {"use_ocr", report.run_meta.use_ocr},
      {"model_id", report.run_meta.model_id},
      {"prompt_hash", report.run_meta.prompt_hash},
      {"timestamp", report.run_meta.timestamp},
  };
  ojson rows = ojson::array();
  for (const auto& m : report.per_meme) {
    rows.push_back({{"id", m.id}, {"label", m.label}, {"pred", m.predicted_label}, {"score", m.score}});
  }
  j["per_meme"] = std::move(rows);
  return j.dump(2) + "\n";
}

EvalReport report_from_json(std::string_view text) {
  try {
    const auto j = ojson::parse(text);
    EvalReport r;
    r.split = parse_split_name(j.at("split").get<std::string>());
    r.n = j.at("n").get<std::size_t>();
    r.accuracy = j.at("accuracy").get<double>();
    if (!j.at("auroc").is_null()) r.auroc = j.at("auroc").get<double>();
    const auto& m = j.at("run_meta");
    r.run_meta.tier = parse_prompt_tier(m.at("tier").get<std::string>());
    r.run_meta.trials_k = m.at("trials_k").get<int>();
    r.run_meta.use_ocr = m.at("use_ocr").get<bool>();
    r.run_meta.model_id = m.at("model_id").get<std::string>();
    r.run_meta.prompt_hash = m.at("prompt_hash").get<std::string>();
    r.run_meta.timestamp = m.at("timestamp").get<std::string>();
    for (const auto& row : j.at("per_meme")) {
      r.per_meme.push_back({row.at("id").get<std::string>(), row.at("label").get<int>(),
                            row.at("pred").get<int>(), row.at("score").get<double>()});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("report: ") + e.what());
  }
}

std::string report_to_csv(const EvalReport& report) {
  std::string out = "id,label,pred,score\n";
  for (const auto& m : report.per_meme) {
    out += m.id + "," + std::to_string(m.label) + "," + std::to_string(m.predicted_label) + "," +
           format_double(m.score) + "\n";
  }
  return out;
}

std::span<const ReferenceRow> reference_rows() { return kReference; }

std::string compare_to_reference(const EvalReport& report) {
  std::ostringstream out;
  const auto acc = 100.0 * report.accuracy;
  out << "run: " << to_string(report.split) << (report.run_meta.use_ocr ? " with OCR" : " without OCR")
      << ", tier " << to_string(report.run_meta.tier) << ", k=" << report.run_meta.trials_k
      << ", n=" << report.n << "\n";
  out << "  measured   acc " << fixed2(acc) << "  AUROC "
      << (report.auroc ? fixed2(100.0 * *report.auroc) : std::string("n/a")) << "\n";
  const ReferenceRow* match = nullptr;
  for (const auto& row : kReference) {
    if (row.split == report.split && row.use_ocr == report.run_meta.use_ocr) match = &row;
  }
  if (match == nullptr) {
    out << "  no reference values for this split (references exist for test_seen and test_unseen)\n";
  } else {
    out << "  reference  acc " << fixed2(match->accuracy) << "  AUROC " << fixed2(match->auroc) << "\n";
    out << "  deviation  acc " << signed2(acc - match->accuracy) << "  AUROC "
        << (report.auroc ? signed2(100.0 * *report.auroc - match->auroc) : std::string("n/a"))
        << "  (percentage points)\n";
  }
  out << "  note: adding OCR text is expected to gain roughly 1.3-2 AUROC points on the test splits\n";
  out << "  reference table (zero-shot, k=5):\n";
  for (const auto& row : kReference) {
    out << "    " << to_string(row.split) << (row.use_ocr ? " +OCR " : "      ") << " acc "
        << fixed2(row.accuracy) << "  AUROC " << fixed2(row.auroc) << "\n";
  }
  return out.str();
}

}  // namespace memeshield
