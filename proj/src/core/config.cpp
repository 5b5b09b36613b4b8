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

#include "config.hpp"

#include <fstream>
#include <sstream>

#include "types.hpp"

namespace clusd {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config: " + path);
  KeyValueConfig cfg;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    cfg.parse_line(line, path + ":" + std::to_string(lineno));
  }
  return cfg;
}

void KeyValueConfig::parse_line(const std::string& raw,
                                const std::string& where) {
  std::string line = raw;
  size_t hash = line.find('#');
  if (hash != std::string::npos) line = line.substr(0, hash);
  line = trim(line);
  if (line.empty()) return;
  size_t eq = line.find('=');
  if (eq == std::string::npos)
    throw Error(ErrorKind::Parse, where + ": expected key=value, got '" + line + "'");
  std::string key = trim(line.substr(0, eq));
  std::string value = trim(line.substr(eq + 1));
  if (key.empty())
    throw Error(ErrorKind::Parse, where + ": empty key");
  kv_[key] = value;
}

void KeyValueConfig::apply_overrides(const std::vector<std::string>& overrides) {
  for (const auto& ov : overrides) parse_line(ov, "override '" + ov + "'");
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  kv_[key] = value;
}

bool KeyValueConfig::has(const std::string& key) const {
  return kv_.count(key) > 0;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

int64_t KeyValueConfig::get_int(const std::string& key, int64_t fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    size_t pos = 0;
    int64_t v = std::stoll(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Config,
                "config key '" + key + "': not an integer: '" + it->second + "'");
  }
}

uint64_t KeyValueConfig::get_uint(const std::string& key, uint64_t fallback) const {
  int64_t v = get_int(key, static_cast<int64_t>(fallback));
  if (v < 0)
    throw Error(ErrorKind::Config, "config key '" + key + "': must be >= 0");
  return static_cast<uint64_t>(v);
}

double KeyValueConfig::get_real(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Config,
                "config key '" + key + "': not a number: '" + it->second + "'");
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw Error(ErrorKind::Config,
              "config key '" + key + "': not a boolean: '" + v + "'");
}

std::vector<uint32_t> KeyValueConfig::get_uint_list(
    const std::string& key, std::vector<uint32_t> fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::vector<uint32_t> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(static_cast<uint32_t>(std::stoul(item)));
    } catch (const std::exception&) {
      throw Error(ErrorKind::Config,
                  "config key '" + key + "': bad list element '" + item + "'");
    }
  }
  return out;
}

}  // namespace clusd
