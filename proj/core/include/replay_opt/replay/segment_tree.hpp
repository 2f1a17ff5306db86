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

#include <algorithm>
#include <bit>
#include <cstddef>
#include <limits>
#include <vector>

namespace replay_opt::replay {

/// Complete binary tree over `capacity` leaves stored in a flat array:
/// node 1 is the root, node i has children 2i and 2i+1, leaves live at
/// [leaf_base, 2 * leaf_base). Padding leaves hold the identity element.
/// Parents are recomputed from both children on every write, so internal
/// nodes are always exactly combine(left, right).
template <typename Combine>
class SegmentTree {
 public:
  SegmentTree(std::size_t capacity, double identity)
      : capacity_(capacity),
        leaf_base_(std::bit_ceil(std::max<std::size_t>(capacity, 1))),
        identity_(identity),
        nodes_(2 * leaf_base_, identity) {}

  std::size_t capacity() const noexcept { return capacity_; }

  void set(std::size_t leaf, double value) {
    std::size_t node = leaf + leaf_base_;
    nodes_[node] = value;
    for (node /= 2; node >= 1; node /= 2) {
      nodes_[node] = Combine{}(nodes_[2 * node], nodes_[2 * node + 1]);
    }
  }

  double get(std::size_t leaf) const { return nodes_[leaf + leaf_base_]; }

  /// Reduction over all leaves.
  double root() const { return nodes_[1]; }

  void clear() { std::fill(nodes_.begin(), nodes_.end(), identity_); }

  /// Raw node access for audits; index 1 is the root.
  double node(std::size_t i) const { return nodes_[i]; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t leaf_base() const { return leaf_base_; }

 protected:
  std::size_t capacity_;
  std::size_t leaf_base_;
  double identity_;
  std::vector<double> nodes_;
};

struct SumOp {
  double operator()(double a, double b) const { return a + b; }
};
struct MinOp {
  double operator()(double a, double b) const { return std::min(a, b); }
};
struct MaxOp {
  double operator()(double a, double b) const { return std::max(a, b); }
};

using MinTree = SegmentTree<MinOp>;
using MaxTree = SegmentTree<MaxOp>;

/// Sum tree over non-negative leaf masses with inverse-CDF search.
class SumTree : public SegmentTree<SumOp> {
 public:
  explicit SumTree(std::size_t capacity) : SegmentTree<SumOp>(capacity, 0.0) {}

  double total() const { return root(); }

  /// Leaf i such that prefix_before(i) <= mass < prefix_before(i) + get(i),
  /// descending from the root. Never returns a zero-mass leaf while the
  /// total is positive; `mass` at or beyond the total maps to the last
  /// positive leaf.
  std::size_t find(double mass) const {
    std::size_t node = 1;
    while (node < leaf_base_) {
      const std::size_t left = 2 * node;
      const double left_mass = nodes_[left];
      if ((mass < left_mass && left_mass > 0.0) || !(nodes_[left + 1] > 0.0)) {
        node = left;
      } else {
        mass -= left_mass;
        node = left + 1;
      }
    }
    return node - leaf_base_;
  }

  /// Sum of leaves [0, leaf), accumulated along the root-to-leaf path.
  double prefix_before(std::size_t leaf) const {
    double acc = 0.0;
    std::size_t node = leaf + leaf_base_;
    for (; node > 1; node /= 2) {
      if (node & 1U) acc += nodes_[node - 1];
    }
    return acc;
  }
};

}  // namespace replay_opt::replay
