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

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "types.hpp"

namespace clusd {

// Little-endian binary file helpers. All persisted formats go through these.

class BinWriter {
 public:
  explicit BinWriter(const std::string& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error(ErrorKind::Io, "cannot open for write: " + path);
  }

  void magic(const char tag[4]) { out_.write(tag, 4); check(); }

  template <typename T>
  void pod(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
    check();
  }

  template <typename T>
  void array(const T* data, size_t n) {
    static_assert(std::is_trivially_copyable_v<T>);
    out_.write(reinterpret_cast<const char*>(data), n * sizeof(T));
    check();
  }

  uint64_t tell() { return static_cast<uint64_t>(out_.tellp()); }
  void seek(uint64_t pos) { out_.seekp(pos); check(); }

  void close() {
    out_.close();
    if (out_.fail()) throw Error(ErrorKind::Io, "write failed: " + path_);
  }

 private:
  void check() {
    if (!out_) throw Error(ErrorKind::Io, "write failed: " + path_);
  }
  std::string path_;
  std::ofstream out_;
};

class BinReader {
 public:
  explicit BinReader(const std::string& path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw Error(ErrorKind::Io, "cannot open: " + path);
  }

  void expect_magic(const char tag[4]) {
    char buf[4];
    in_.read(buf, 4);
    if (!in_ || std::memcmp(buf, tag, 4) != 0)
      throw Error(ErrorKind::Parse, path_ + ": bad magic, expected '" +
                                        std::string(tag, 4) + "'");
  }

  template <typename T>
  T pod() {
    static_assert(std::is_trivially_copyable_v<T>);
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw Error(ErrorKind::Parse, path_ + ": truncated file");
    return v;
  }

  template <typename T>
  void array(T* data, size_t n) {
    static_assert(std::is_trivially_copyable_v<T>);
    in_.read(reinterpret_cast<char*>(data), n * sizeof(T));
    if (!in_) throw Error(ErrorKind::Parse, path_ + ": truncated file");
  }

  bool at_eof() {
    in_.peek();
    return in_.eof();
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
};

}  // namespace clusd
