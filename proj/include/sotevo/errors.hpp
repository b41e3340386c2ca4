// Copyright 2026 The sotevo Authors
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

namespace sotevo {

/// Invalid model, world, task or run configuration. Maps to CLI exit 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed serialized document (stack or config file).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Exact pseudo-inverse requested (lambda = 0) on a rank-deficient matrix.
struct SingularityError : std::runtime_error {
  explicit SingularityError(const std::string& what) : std::runtime_error(what) {}
};

/// Mismatched dimensions while composing task outputs.
struct CompositionError : std::runtime_error {
  explicit CompositionError(const std::string& what) : std::runtime_error(what) {}
};

/// Two stacks over different task dictionaries cannot be compared.
struct ComparisonError : std::runtime_error {
  explicit ComparisonError(const std::string& what) : std::runtime_error(what) {}
};

/// Scenario cannot produce a valid episode (e.g. no collision-free start).
/// Maps to CLI exit 3.
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// Internal contract broken (e.g. selection on an unevaluated population).
struct ProtocolError : std::logic_error {
  explicit ProtocolError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace sotevo
