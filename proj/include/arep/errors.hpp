// Copyright 2026 the arep authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace arep {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NonStationaryError : Error {
  using Error::Error;
};
struct HistoryTooShortError : Error {
  using Error::Error;
};
struct OrderMismatchError : Error {
  using Error::Error;
};
struct MissingMomentError : Error {
  using Error::Error;
};
struct PathTooShortError : Error {
  using Error::Error;
};
struct AlphaAtOrBelowOneError : Error {
  using Error::Error;
};
struct HypothesisViolatedError : Error {
  using Error::Error;
};
struct PartitionConditionFailedError : Error {
  using Error::Error;
};
struct InsufficientGammaGridError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace arep
