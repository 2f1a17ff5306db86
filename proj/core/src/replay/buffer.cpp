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

#include "replay_opt/replay/buffer.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "replay_opt/common/errors.hpp"

namespace replay_opt::replay {

namespace {
constexpr std::size_t kNotInSubset = std::numeric_limits<std::size_t>::max();
constexpr double kNoMax = -std::numeric_limits<double>::infinity();
}  // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t obs_dim, std::size_t action_dim,
                           bool strict_subset)
    : obs_dim_(obs_dim),
      action_dim_(action_dim),
      strict_(strict_subset),
      slots_(capacity),
      serials_(capacity, 0),
      abs_td_max_(capacity, kNoMax),
      per_priority_max_(capacity, kNoMax),
      in_subset_(capacity, 0),
      mask_drawn_(capacity, 0),
      subset_pos_(capacity, kNotInSubset) {
  if (capacity == 0) throw ConfigError("ReplayBuffer: capacity must be positive");
  if (obs_dim == 0 || action_dim == 0) throw ConfigError("ReplayBuffer: dimensions must be positive");
  subset_.reserve(capacity);
}

std::size_t ReplayBuffer::store(Transition t) {
  if (t.state.size() != obs_dim_ || t.next_state.size() != obs_dim_ || t.action.size() != action_dim_) {
    throw ContractViolation("ReplayBuffer::store: transition dimensions do not match the buffer");
  }
  const std::size_t slot = cursor_;
  if (size_ == capacity()) {
    // Evict the oldest transition.
    remove_from_subset(slot);
    mask_drawn_[slot] = 0;
    abs_td_max_.set(slot, kNoMax);
    per_priority_max_.set(slot, kNoMax);
  }
  const bool was_empty = size_ == 0 || (size_ == capacity() && capacity() == 1);
  t.td_error = was_empty ? 1.0 : max_abs_td();
  t.per_priority = was_empty ? 1.0 : max_per_priority();

  slots_[slot] = std::move(t);
  serials_[slot] = next_serial_++;
  abs_td_max_.set(slot, std::abs(slots_[slot].td_error));
  per_priority_max_.set(slot, slots_[slot].per_priority);
  if (!strict_ || !mask_initialized_) add_to_subset(slot);

  cursor_ = (cursor_ + 1) % capacity();
  if (size_ < capacity()) ++size_;
  return slot;
}

bool ReplayBuffer::is_live(const SlotRef& ref) const {
  return ref.index < size_ && serials_[ref.index] == ref.serial;
}

std::vector<std::size_t> ReplayBuffer::slots_in_order() const {
  std::vector<std::size_t> out;
  out.reserve(size_);
  const std::size_t start = size_ < capacity() ? 0 : cursor_;
  for (std::size_t k = 0; k < size_; ++k) out.push_back((start + k) % capacity());
  return out;
}

void ReplayBuffer::set_td_error(std::size_t slot, double td_error, double per_priority) {
  Transition& t = slots_[slot];
  t.td_error = td_error;
  t.per_priority = per_priority;
  abs_td_max_.set(slot, std::abs(td_error));
  per_priority_max_.set(slot, per_priority);
}

double ReplayBuffer::max_abs_td() const {
  const double m = abs_td_max_.root();
  return m == kNoMax ? 1.0 : m;
}

double ReplayBuffer::max_per_priority() const {
  const double m = per_priority_max_.root();
  return m == kNoMax ? 1.0 : m;
}

std::vector<SlotRef> ReplayBuffer::sample_uniform(std::size_t batch_size, Rng& rng) const {
  if (size_ == 0) throw EmptyBufferError();
  std::vector<SlotRef> out;
  out.reserve(batch_size);
  for (std::size_t k = 0; k < batch_size; ++k) out.push_back(ref(rng.index(size_)));
  return out;
}

std::vector<SlotRef> ReplayBuffer::sample_from_subset(std::size_t batch_size, Rng& rng) {
  if (size_ == 0) throw EmptyBufferError();
  if (subset_.empty()) {
    ++fallbacks_;
    return sample_uniform(batch_size, rng);
  }
  std::vector<SlotRef> out;
  out.reserve(batch_size);
  for (std::size_t k = 0; k < batch_size; ++k) out.push_back(ref(subset_[rng.index(subset_.size())]));
  return out;
}

void ReplayBuffer::apply_mask(std::span<const std::uint8_t> bits) {
  if (bits.size() != size_) {
    throw ContractViolation("ReplayBuffer::apply_mask: expected " + std::to_string(size_) + " bits");
  }
  subset_.clear();
  for (std::size_t slot = 0; slot < size_; ++slot) {
    in_subset_[slot] = bits[slot] != 0 ? 1 : 0;
    mask_drawn_[slot] = 1;
    subset_pos_[slot] = kNotInSubset;
    if (in_subset_[slot]) {
      subset_pos_[slot] = subset_.size();
      subset_.push_back(slot);
    }
  }
  mask_initialized_ = true;
}

void ReplayBuffer::add_to_subset(std::size_t slot) {
  if (in_subset_[slot]) return;
  in_subset_[slot] = 1;
  subset_pos_[slot] = subset_.size();
  subset_.push_back(slot);
}

void ReplayBuffer::remove_from_subset(std::size_t slot) {
  if (!in_subset_[slot]) return;
  const std::size_t pos = subset_pos_[slot];
  const std::size_t last = subset_.back();
  subset_[pos] = last;
  subset_pos_[last] = pos;
  subset_.pop_back();
  subset_pos_[slot] = kNotInSubset;
  in_subset_[slot] = 0;
}

}  // namespace replay_opt::replay
