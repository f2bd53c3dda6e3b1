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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "memeshield/dataset.hpp"
#include "memeshield/prompt.hpp"
#include "memeshield/verdict.hpp"

namespace memeshield {

/// Fraction of positions where prediction == label.
/// Throws Error(InvalidInput) on empty or mismatched inputs.
double accuracy(std::span<const int> predictions, std::span<const int> labels);

/// Area under the ROC curve as the Mann-Whitney statistic: the fraction of
/// (positive, negative) pairs ranked correctly, ties counting one half.
/// O(n log n) via midranks. Throws Error(UndefinedAuroc) unless both classes
/// occur, Error(InvalidInput) on length mismatch or non-binary labels.
double auroc(std::span<const double> scores, std::span<const int> labels);

struct RunMeta {
  PromptTier tier = PromptTier::complete;
  int trials_k = 5;
  bool use_ocr = false;
  std::string model_id;
  std::string prompt_hash;
  std::string timestamp;

  bool operator==(const RunMeta&) const = default;
};

struct MemeScore {
  std::string id;
  int label = 0;
  int predicted_label = 0;
  double score = 0.0;

  bool operator==(const MemeScore&) const = default;
};

struct EvalReport {
  SplitName split = SplitName::test_seen;
  std::size_t n = 0;
  double accuracy = 0.0;
  std::optional<double> auroc;  // absent when the scored set has one class
  RunMeta run_meta;
  std::vector<MemeScore> per_meme;  // sorted by id

  bool operator==(const EvalReport&) const = default;
};

/// Joins results to the split's gold labels (sorted by meme id) and scores
/// them. Throws Error(JoinError) for ids absent from the split,
/// Error(MissingLabel) for unlabeled records.
EvalReport build_report(std::span<const DetectionResult> results, const Split& split,
                        const RunMeta& meta);

/// Recomputes accuracy and AUROC from the per-meme rows.
EvalReport recompute(EvalReport report);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(std::string_view text);
/// CSV with header `id,label,pred,score`.
std::string report_to_csv(const EvalReport& report);

/// Published zero-shot reference numbers (percent) for one configuration.
struct ReferenceRow {
  SplitName split;
  bool use_ocr;
  double accuracy;
  double auroc;
};

std::span<const ReferenceRow> reference_rows();

/// Human-readable deviation of `report` from the matching reference row.
/// Informational only; never fails on large deviations.
std::string compare_to_reference(const EvalReport& report);

}  // namespace memeshield
