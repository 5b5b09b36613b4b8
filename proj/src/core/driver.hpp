// Copyright 2026-present the clusd project
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
#include <vector>

#include "config.hpp"
#include "eval.hpp"
#include "fusion.hpp"
#include "selector.hpp"

namespace clusd {

// High-level workflow commands shared by the C API and the CLI. Each command
// resolves its configuration as defaults < config file < overrides, writes a
// run manifest before any other output, and throws clusd::Error on failure.

/// Prepends CLUSD_DATA_DIR to relative paths when the variable is set.
std::string resolve_path(const std::string& path);

void cmd_synth(const std::string& config_path, const std::string& out_dir,
               const std::vector<std::string>& overrides);

/// data_dir must hold corpus.bin (from cmd_synth or external ingestion).
/// Builds the inverted index, the cluster model with its neighbor graph and
/// (by default) the on-disk embedding store into out_dir.
void cmd_build(const std::string& data_dir, const std::string& out_dir,
               const std::vector<std::string>& overrides);

void cmd_train(const std::string& built_dir,
               const std::vector<std::string>& overrides);

void cmd_search(const std::string& built_dir, const std::string& query_file,
                const std::string& pipeline, const std::string& out_path,
                const std::vector<std::string>& overrides);

void cmd_bench(const std::string& built_dir, const std::string& out_dir,
               const std::vector<std::string>& overrides);

// Config helpers shared with tests.
SelectorConfig selector_from_config(const KeyValueConfig& cfg);
FusionConfig fusion_from_config(const KeyValueConfig& cfg);

}  // namespace clusd
