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

#include <string>

#include "sotevo/evolution.hpp"

namespace sotevo {

/// Everything one learning or replay run needs, loaded from a single JSON
/// document with sections robot, world, tasks, cost, gp, episode, output.
struct RunConfig {
  Scenario scenario;
  GpConfig gp;
  std::string out_dir = "out";
};

/// Parses and validates a configuration document. Throws ConfigError with
/// a field path (e.g. "cost.terms[1].weight") on any invalid content and
/// ParseError on malformed JSON.
RunConfig parse_run_config(const std::string& text);

/// Reads the file and parses it. Also returns the raw bytes when `raw` is
/// non-null (for hashing into the run manifest).
RunConfig load_run_config(const std::string& path, std::string* raw = nullptr);

/// FNV-1a 64-bit hash, hex-encoded; stable fingerprint for manifests.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace sotevo
