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

#include "memeshield/errors.hpp"

namespace memeshield {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::DatasetNotFound: return "DatasetNotFound";
    case Errc::ParseError: return "ParseError";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::ImageNotFound: return "ImageNotFound";
    case Errc::UnsupportedImage: return "UnsupportedImage";
    case Errc::MissingLabel: return "MissingLabel";
    case Errc::EmptyOcr: return "EmptyOcr";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::BackendUnavailable: return "BackendUnavailable";
    case Errc::RequestRejected: return "RequestRejected";
    case Errc::EmptyResponse: return "EmptyResponse";
    case Errc::StorageError: return "StorageError";
    case Errc::FixtureMissing: return "FixtureMissing";
    case Errc::TrialCountMismatch: return "TrialCountMismatch";
    case Errc::InvalidInput: return "InvalidInput";
    case Errc::UndefinedAuroc: return "UndefinedAuroc";
    case Errc::JoinError: return "JoinError";
    case Errc::ExtractionFailed: return "ExtractionFailed";
    case Errc::InvalidQuorum: return "InvalidQuorum";
    case Errc::InvalidPanel: return "InvalidPanel";
    case Errc::Forbidden: return "Forbidden";
    case Errc::NotFound: return "NotFound";
    case Errc::AlreadyDecided: return "AlreadyDecided";
    case Errc::BatchIncomplete: return "BatchIncomplete";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

}  // namespace memeshield
