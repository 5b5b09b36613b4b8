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

#include "clusd/clusd.h"

#include <string>
#include <vector>

#include "core/driver.hpp"
#include "core/types.hpp"

struct clusd_engine {
  std::string last_error;
};

namespace {

std::vector<std::string> collect(const char* const* overrides, size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    if (!overrides[i])
      throw clusd::Error(clusd::ErrorKind::Config, "null override string");
    out.emplace_back(overrides[i]);
  }
  return out;
}

clusd_status to_status(clusd::ErrorKind kind) {
  switch (kind) {
    case clusd::ErrorKind::Io: return CLUSD_ERR_IO;
    case clusd::ErrorKind::Parse: return CLUSD_ERR_PARSE;
    case clusd::ErrorKind::Config: return CLUSD_ERR_CONFIG;
    case clusd::ErrorKind::State: return CLUSD_ERR_STATE;
    case clusd::ErrorKind::Internal: return CLUSD_ERR_INTERNAL;
  }
  return CLUSD_ERR_INTERNAL;
}

template <typename Fn>
clusd_status guarded(clusd_engine* engine, Fn&& fn) {
  if (!engine) return CLUSD_ERR_STATE;
  try {
    fn();
    engine->last_error.clear();
    return CLUSD_OK;
  } catch (const clusd::Error& e) {
    engine->last_error = e.what();
    return to_status(e.kind());
  } catch (const std::exception& e) {
    engine->last_error = e.what();
    return CLUSD_ERR_INTERNAL;
  } catch (...) {
    engine->last_error = "unknown error";
    return CLUSD_ERR_INTERNAL;
  }
}

std::string str_or(const char* s, const char* fallback = "") {
  return s ? std::string(s) : std::string(fallback);
}

}  // namespace

extern "C" {

const char* clusd_version(void) { return "1.0.0"; }

clusd_engine* clusd_engine_create(void) { return new clusd_engine(); }

void clusd_engine_destroy(clusd_engine* engine) { delete engine; }

const char* clusd_last_error(const clusd_engine* engine) {
  return engine ? engine->last_error.c_str() : "null engine";
}

clusd_status clusd_synth(clusd_engine* engine, const char* config_path,
                         const char* out_dir, const char* const* overrides,
                         size_t num_overrides) {
  return guarded(engine, [&] {
    if (!out_dir)
      throw clusd::Error(clusd::ErrorKind::Config, "synth: out_dir required");
    clusd::cmd_synth(str_or(config_path), out_dir,
                     collect(overrides, num_overrides));
  });
}

clusd_status clusd_build(clusd_engine* engine, const char* data_dir,
                         const char* out_dir, const char* const* overrides,
                         size_t num_overrides) {
  return guarded(engine, [&] {
    if (!data_dir || !out_dir)
      throw clusd::Error(clusd::ErrorKind::Config,
                         "build: data_dir and out_dir required");
    clusd::cmd_build(data_dir, out_dir, collect(overrides, num_overrides));
  });
}

clusd_status clusd_train(clusd_engine* engine, const char* built_dir,
                         const char* const* overrides, size_t num_overrides) {
  return guarded(engine, [&] {
    if (!built_dir)
      throw clusd::Error(clusd::ErrorKind::Config, "train: built_dir required");
    clusd::cmd_train(built_dir, collect(overrides, num_overrides));
  });
}

clusd_status clusd_search(clusd_engine* engine, const char* built_dir,
                          const char* query_file, const char* pipeline,
                          const char* out_path, const char* const* overrides,
                          size_t num_overrides) {
  return guarded(engine, [&] {
    if (!built_dir || !query_file || !pipeline || !out_path)
      throw clusd::Error(clusd::ErrorKind::Config,
                         "search: built_dir, query_file, pipeline and "
                         "out_path required");
    clusd::cmd_search(built_dir, query_file, pipeline, out_path,
                      collect(overrides, num_overrides));
  });
}

clusd_status clusd_bench(clusd_engine* engine, const char* built_dir,
                         const char* out_dir, const char* const* overrides,
                         size_t num_overrides) {
  return guarded(engine, [&] {
    if (!built_dir || !out_dir)
      throw clusd::Error(clusd::ErrorKind::Config,
                         "bench: built_dir and out_dir required");
    clusd::cmd_bench(built_dir, out_dir, collect(overrides, num_overrides));
  });
}

}  // extern "C"
