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

#include <stdexcept>
#include <string>
#include <string_view>

namespace memeshield {

enum class Errc {
  DatasetNotFound,
  ParseError,
  DuplicateId,
  ImageNotFound,
  UnsupportedImage,
  MissingLabel,
  EmptyOcr,
  InvalidConfig,
  BackendUnavailable,
  RequestRejected,
  EmptyResponse,
  StorageError,
  FixtureMissing,
  TrialCountMismatch,
  InvalidInput,
  UndefinedAuroc,
  JoinError,
  ExtractionFailed,
  InvalidQuorum,
  InvalidPanel,
  Forbidden,
  NotFound,
  AlreadyDecided,
  BatchIncomplete,
};

std::string_view errc_name(Errc code);

/// Every failure the library reports carries one of the Errc kinds above so
/// callers (CLI exit codes, HTTP status mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace memeshield
