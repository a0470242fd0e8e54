// Copyright 2026 The melaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
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
#include <map>
#include <string>

#include "melaug/core/error.hpp"
#include "melaug/nn/layers.hpp"

namespace melaug::nn {

// Named dense-array container: little-endian binary blobs with a shape
// header per entry. Round-trips are bit-exact.

namespace blob_detail {
template <typename S>
constexpr std::uint8_t dtype_code();
template <>
constexpr std::uint8_t dtype_code<float>() { return 4; }
template <>
constexpr std::uint8_t dtype_code<double>() { return 8; }

inline void write_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(v >> (8 * i));
  out.write(b, 8);
}
inline std::uint64_t read_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}
}  // namespace blob_detail

class BlobWriter {
 public:
  explicit BlobWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) fail(ErrorCode::io, "cannot open blob file for writing: " + path);
    out_.write("MELBLOB1", 8);
    // entry count patched on finish
    blob_detail::write_u64(out_, 0);
  }

  template <typename S>
  void add(const std::string& name, const MatX<S>& m) {
    blob_detail::write_u64(out_, name.size());
    out_.write(name.data(), static_cast<std::streamsize>(name.size()));
    out_.put(static_cast<char>(blob_detail::dtype_code<S>()));
    blob_detail::write_u64(out_, static_cast<std::uint64_t>(m.rows()));
    blob_detail::write_u64(out_, static_cast<std::uint64_t>(m.cols()));
    out_.write(reinterpret_cast<const char*>(m.data()),
               static_cast<std::streamsize>(sizeof(S) * m.size()));
    ++count_;
  }

  void finish() {
    out_.seekp(8);
    blob_detail::write_u64(out_, count_);
    out_.flush();
    if (!out_) fail(ErrorCode::io, "blob write failed");
    out_.close();
  }

 private:
  std::ofstream out_;
  std::uint64_t count_ = 0;
};

class BlobReader {
 public:
  explicit BlobReader(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::missing_file, "cannot open blob file: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string(magic, 8) != "MELBLOB1")
      fail(ErrorCode::bad_checkpoint, "bad blob magic: " + path);
    const std::uint64_t count = blob_detail::read_u64(in);
    for (std::uint64_t i = 0; i < count; ++i) {
      const std::uint64_t name_len = blob_detail::read_u64(in);
      std::string name(name_len, '\0');
      in.read(name.data(), static_cast<std::streamsize>(name_len));
      Entry e;
      e.dtype = static_cast<std::uint8_t>(in.get());
      e.rows = blob_detail::read_u64(in);
      e.cols = blob_detail::read_u64(in);
      e.data.resize(e.rows * e.cols * e.dtype);
      in.read(e.data.data(), static_cast<std::streamsize>(e.data.size()));
      if (!in) fail(ErrorCode::bad_checkpoint, "truncated blob file: " + path);
      entries_.emplace(std::move(name), std::move(e));
    }
  }

  bool has(const std::string& name) const { return entries_.count(name) > 0; }

  template <typename S>
  MatX<S> get(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end())
      fail(ErrorCode::bad_checkpoint, "blob entry missing: " + name);
    const Entry& e = it->second;
    if (e.dtype != blob_detail::dtype_code<S>())
      fail(ErrorCode::bad_checkpoint, "blob dtype mismatch for " + name);
    MatX<S> m(static_cast<Eigen::Index>(e.rows), static_cast<Eigen::Index>(e.cols));
    std::memcpy(m.data(), e.data.data(), e.data.size());
    return m;
  }

  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    std::uint8_t dtype = 0;
    std::uint64_t rows = 0, cols = 0;
    std::string data;
  };
  std::map<std::string, Entry> entries_;
};

// Loads every named parameter of a store from a blob (shapes must match).
template <typename S>
void load_params(const BlobReader& blob, ParamStore<S>& store, const std::string& prefix = "") {
  for (const auto& [name, v] : store.entries()) {
    MatX<S> m = blob.get<S>(prefix + name);
    require(m.rows() == v.rows() && m.cols() == v.cols(), ErrorCode::bad_checkpoint,
            "parameter shape mismatch: " + name);
    v.node()->value = std::move(m);
  }
}

template <typename S>
void save_params(BlobWriter& blob, const ParamStore<S>& store, const std::string& prefix = "") {
  for (const auto& [name, v] : store.entries()) blob.add<S>(prefix + name, v.value());
}

}  // namespace melaug::nn
