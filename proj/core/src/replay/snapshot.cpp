// Copyright 2026 The replay-opt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "replay_opt/replay/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include "replay_opt/common/errors.hpp"

namespace replay_opt::replay {

namespace {

class Writer {
 public:
  template <typename T>
  void put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    bytes.insert(bytes.end(), raw, raw + sizeof(T));
  }
  void put_f64(double v) { put(v); }
  void put_vec(const std::vector<double>& v) {
    for (double x : v) put(x);
  }

  std::vector<unsigned char> bytes;
};

class Reader {
 public:
  Reader(const std::vector<unsigned char>& bytes, const std::string& path) : bytes_(bytes), path_(path) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw IoError(path_, "truncated snapshot");
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }
  std::vector<double> get_vec(std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = get<double>();
    return v;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  const std::vector<unsigned char>& bytes_;
  const std::string& path_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_snapshot(const ReplayBuffer& buffer, const std::string& path) {
  Writer w;
  for (char c : kSnapshotMagic) w.put(c);
  w.put<std::uint32_t>(kSnapshotVersion);
  w.put<std::uint64_t>(buffer.capacity());
  w.put<std::uint64_t>(buffer.size());
  w.put<std::uint32_t>(static_cast<std::uint32_t>(buffer.obs_dim()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(buffer.action_dim()));
  for (std::size_t slot : buffer.slots_in_order()) {
    const Transition& t = buffer.at(slot);
    w.put_vec(t.state);
    w.put_vec(t.action);
    w.put_f64(t.reward);
    w.put_vec(t.next_state);
    w.put<std::uint8_t>(t.done ? 1 : 0);
    w.put<std::uint64_t>(t.insert_timestep);
    w.put_f64(t.td_error);
    w.put_f64(t.priority_score);
    w.put_f64(t.per_priority);
    w.put<std::uint8_t>(buffer.in_subset(slot) ? 1 : 0);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out.write(reinterpret_cast<const char*>(w.bytes.data()), static_cast<std::streamsize>(w.bytes.size()));
  if (!out) throw IoError(path, "write failed");
}

BufferSnapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(bytes, path);
  for (char c : kSnapshotMagic) {
    if (r.get<char>() != c) throw IoError(path, "bad magic, not a buffer snapshot");
  }
  if (const auto version = r.get<std::uint32_t>(); version != kSnapshotVersion) {
    throw IoError(path, "unsupported snapshot version " + std::to_string(version));
  }
  BufferSnapshot snap;
  snap.capacity = r.get<std::uint64_t>();
  const auto size = r.get<std::uint64_t>();
  snap.obs_dim = r.get<std::uint32_t>();
  snap.action_dim = r.get<std::uint32_t>();
  if (size > snap.capacity) throw IoError(path, "size exceeds capacity");
  snap.transitions.reserve(size);
  snap.in_subset.reserve(size);
  for (std::uint64_t k = 0; k < size; ++k) {
    Transition t;
    t.state = r.get_vec(snap.obs_dim);
    t.action = r.get_vec(snap.action_dim);
    t.reward = r.get<double>();
    t.next_state = r.get_vec(snap.obs_dim);
    t.done = r.get<std::uint8_t>() != 0;
    t.insert_timestep = r.get<std::uint64_t>();
    t.td_error = r.get<double>();
    t.priority_score = r.get<double>();
    t.per_priority = r.get<double>();
    snap.in_subset.push_back(r.get<std::uint8_t>());
    snap.transitions.push_back(std::move(t));
  }
  if (!r.at_end()) throw IoError(path, "trailing bytes after last record");
  return snap;
}

}  // namespace replay_opt::replay
