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

#include <map>
#include <string>

namespace clusd {

/// FNV-1a 64-bit digest of a file's bytes, hex-encoded.
std::string file_digest(const std::string& path);

/// Reproducibility record for one command. Keys are written sorted, one
/// key=value per line, so equal manifests are byte-equal. Written before any
/// output artifact of the command.
class RunManifest {
 public:
  RunManifest(const std::string& command);

  void set(const std::string& key, const std::string& value);
  void set_input_digest(const std::string& name, const std::string& path);

  void write(const std::string& path) const;

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace clusd
