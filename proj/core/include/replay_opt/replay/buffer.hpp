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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "replay_opt/common/rng.hpp"
#include "replay_opt/replay/segment_tree.hpp"
#include "replay_opt/replay/transition.hpp"

namespace replay_opt::replay {

/// Fixed-capacity ring of transitions with the per-slot replay mask used by
/// the learned sampler.
///
/// Mask semantics: `in_subset(i)` marks slot i as a member of the active
/// subset. `has_mask_bit(i)` is true when that membership was drawn at the
/// most recent refresh (as opposed to a transition that joined after it);
/// only such slots carry a realized mask bit for the replay-policy update.
/// Until the first refresh every stored transition joins the subset. After
/// it, new transitions join immediately unless the buffer is `strict`.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t obs_dim, std::size_t action_dim,
               bool strict_subset = false);

  std::size_t capacity() const noexcept { return slots_.size(); }
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  std::size_t obs_dim() const noexcept { return obs_dim_; }
  std::size_t action_dim() const noexcept { return action_dim_; }

  /// Inserts at the write cursor, evicting the oldest transition when full.
  /// Overwrites td_error with the current max |td| (1.0 when empty) and
  /// per_priority with the current max per_priority (1.0 when empty);
  /// priority_score is kept as given. Returns the slot index.
  std::size_t store(Transition t);

  const Transition& at(std::size_t slot) const { return slots_[slot]; }
  Transition& at(std::size_t slot) { return slots_[slot]; }

  /// Store serial of the transition currently in `slot`.
  std::uint64_t serial(std::size_t slot) const { return serials_[slot]; }
  SlotRef ref(std::size_t slot) const { return {slot, serials_[slot]}; }
  bool is_live(const SlotRef& ref) const;

  /// Live slot indices from oldest to newest.
  std::vector<std::size_t> slots_in_order() const;
  /// Live slot indices in [0, size()) (the ring fills from slot 0).
  std::size_t live_slot_count() const { return size_; }

  /// Overwrites td_error and per_priority of one slot, keeping the max
  /// trackers consistent.
  void set_td_error(std::size_t slot, double td_error, double per_priority);

  /// Largest |td_error| / per_priority over live slots (1.0 when empty).
  double max_abs_td() const;
  double max_per_priority() const;

  /// Indices i.i.d. uniform over live slots, with replacement.
  std::vector<SlotRef> sample_uniform(std::size_t batch_size, Rng& rng) const;

  /// Uniform with replacement over the active subset. An empty subset falls
  /// back to sample_uniform and bumps fallback_count().
  std::vector<SlotRef> sample_from_subset(std::size_t batch_size, Rng& rng);

  // Subset mask.
  bool in_subset(std::size_t slot) const { return in_subset_[slot] != 0; }
  bool has_mask_bit(std::size_t slot) const { return mask_drawn_[slot] != 0; }
  std::span<const std::size_t> subset_indices() const { return subset_; }
  std::size_t subset_size() const { return subset_.size(); }
  bool strict_subset() const { return strict_; }
  /// True once apply_mask() has been called.
  bool mask_initialized() const { return mask_initialized_; }

  /// Replaces the mask for all live slots: bits[i] for slot i, i < size().
  /// Every live slot becomes a slot with a realized mask bit.
  void apply_mask(std::span<const std::uint8_t> bits);

  std::uint64_t fallback_count() const { return fallbacks_; }
  std::uint64_t stale_update_count() const { return stale_updates_; }
  void note_stale_update() { ++stale_updates_; }
  std::uint64_t total_stores() const { return next_serial_; }

 private:
  void add_to_subset(std::size_t slot);
  void remove_from_subset(std::size_t slot);

  std::size_t obs_dim_;
  std::size_t action_dim_;
  bool strict_;
  std::vector<Transition> slots_;
  std::vector<std::uint64_t> serials_;
  std::size_t cursor_ = 0;
  std::size_t size_ = 0;
  std::uint64_t next_serial_ = 0;

  MaxTree abs_td_max_;
  MaxTree per_priority_max_;

  std::vector<std::uint8_t> in_subset_;
  std::vector<std::uint8_t> mask_drawn_;
  std::vector<std::size_t> subset_;
  std::vector<std::size_t> subset_pos_;
  bool mask_initialized_ = false;

  std::uint64_t fallbacks_ = 0;
  std::uint64_t stale_updates_ = 0;
};

}  // namespace replay_opt::replay
