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

#include "manifest.hpp"

#include <fstream>
#include <sstream>

#include "types.hpp"

namespace clusd {

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open for digest: " + path);
  uint64_t hash = 0xcbf29ce484222325ull;
  char buf[65536];
  while (in) {
    in.read(buf, sizeof(buf));
    std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ull;
    }
  }
  std::ostringstream ss;
  ss << std::hex << hash;
  return ss.str();
}

RunManifest::RunManifest(const std::string& command) {
  entries_["command"] = command;
  entries_["artifact_version"] = "1";
}

void RunManifest::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

void RunManifest::set_input_digest(const std::string& name,
                                   const std::string& path) {
  entries_["input." + name] = file_digest(path);
}

void RunManifest::write(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open for write: " + path);
  for (const auto& [k, v] : entries_) out << k << "=" << v << "\n";
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path);
}

}  // namespace clusd
