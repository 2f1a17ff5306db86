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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "replay_opt/common/errors.hpp"
#include "replay_opt/common/rng.hpp"
#include "replay_opt/replay/buffer.hpp"
#include "replay_opt/replay/sampler.hpp"
#include "replay_opt/replay/segment_tree.hpp"
#include "replay_opt/replay/snapshot.hpp"
#include "support/temp_dir.hpp"
#include "support/transitions.hpp"

namespace replay_opt::replay {
namespace {

using testing::transition;

ReplayBuffer filled(std::size_t capacity, std::size_t count) {
  ReplayBuffer b(capacity, 1, 1);
  for (std::size_t i = 0; i < count; ++i) b.store(transition(static_cast<double>(i), i + 1));
  return b;
}

std::vector<std::size_t> indices(const std::vector<SlotRef>& refs) {
  std::vector<std::size_t> out;
  for (const auto& r : refs) out.push_back(r.index);
  return out;
}

// ---- ring buffer ---------------------------------------------------------

TEST(Buffer, FirstStoreGoesToSlotZero) {
  ReplayBuffer b(4, 1, 1);
  EXPECT_EQ(b.store(transition()), 0u);
  EXPECT_EQ(b.size(), 1u);
}

TEST(Buffer, FifthStoreOverwritesOldest) {
  ReplayBuffer b = filled(4, 4);
  EXPECT_EQ(b.store(transition(99.0)), 0u);
  EXPECT_EQ(b.size(), 4u);
  EXPECT_EQ(b.at(0).reward, 99.0);
  EXPECT_EQ(b.slots_in_order(), (std::vector<std::size_t>{1, 2, 3, 0}));
}

TEST(Buffer, NewTransitionGetsMaxPriority) {
  ReplayBuffer b = filled(8, 3);
  b.set_td_error(1, -4.0, 2.5);
  const std::size_t slot = b.store(transition());
  EXPECT_EQ(b.at(slot).per_priority, 2.5);
  EXPECT_EQ(b.at(slot).td_error, 4.0);
}

TEST(Buffer, EmptyBufferDefaultsToUnitPriority) {
  ReplayBuffer b(2, 1, 1);
  b.store(transition());
  EXPECT_EQ(b.at(0).per_priority, 1.0);
  EXPECT_EQ(b.at(0).td_error, 1.0);
}

TEST(Buffer, MaxIgnoresEvictedSlot) {
  ReplayBuffer b = filled(2, 2);
  b.set_td_error(0, 9.0, 9.0);
  b.set_td_error(1, 0.5, 0.5);
  b.store(transition());  // evicts slot 0
  EXPECT_EQ(b.at(0).per_priority, 0.5);
  EXPECT_EQ(b.max_per_priority(), 0.5);
}

TEST(Buffer, RejectsWrongShapes) {
  ReplayBuffer b(2, 3, 1);
  EXPECT_THROW(b.store(transition()), ContractViolation);
  EXPECT_THROW(ReplayBuffer(0, 1, 1), ConfigError);
}

TEST(Buffer, SerialsDetectOverwrite) {
  ReplayBuffer b = filled(2, 2);
  const SlotRef r = b.ref(0);
  EXPECT_TRUE(b.is_live(r));
  b.store(transition());
  EXPECT_FALSE(b.is_live(r));
  EXPECT_EQ(b.total_stores(), 3u);
}

TEST(Uniform, SingleElementBuffer) {
  ReplayBuffer b = filled(4, 1);
  Rng rng(0);
  const auto refs = b.sample_uniform(64, rng);
  ASSERT_EQ(refs.size(), 64u);
  for (const auto& r : refs) EXPECT_EQ(r.index, 0u);
}

TEST(Uniform, EmptyBufferThrows) {
  ReplayBuffer b(4, 1, 1);
  Rng rng(0);
  EXPECT_THROW(b.sample_uniform(1, rng), EmptyBufferError);
}

TEST(Uniform, FixedSeedIsReproducible) {
  ReplayBuffer b = filled(100, 100);
  Rng r1(3);
  Rng r2(3);
  EXPECT_EQ(b.sample_uniform(50, r1), b.sample_uniform(50, r2));
}

TEST(Uniform, FrequenciesWithinBinomialBounds) {
  // 10^6 draws over 1000 slots: each count is Binomial(10^6, 1e-3).
  ReplayBuffer b = filled(1000, 1000);
  Rng rng(17);
  std::vector<int> counts(1000, 0);
  for (int k = 0; k < 1000; ++k) {
    for (const auto& r : b.sample_uniform(1000, rng)) ++counts[r.index];
  }
  const double sigma = std::sqrt(1e6 * 1e-3 * (1 - 1e-3));
  for (int c : counts) EXPECT_LT(std::abs(c - 1000.0), 5 * sigma);
}

// ---- subset sampling -----------------------------------------------------

TEST(Subset, WholeBufferBeforeFirstRefresh) {
  ReplayBuffer b = filled(16, 10);
  EXPECT_EQ(b.subset_size(), 10u);
  EXPECT_FALSE(b.mask_initialized());
  for (std::size_t i = 0; i < 10; ++i) EXPECT_FALSE(b.has_mask_bit(i));
}

TEST(Subset, FullSubsetMatchesUniform) {
  ReplayBuffer b = filled(16, 10);
  std::vector<std::uint8_t> all(10, 1);
  b.apply_mask(all);
  Rng r1(8);
  Rng r2(8);
  const auto a = b.sample_from_subset(200, r1);
  const auto u = b.sample_uniform(200, r2);
  // Same support, same draw count; the subset keeps slot order 0..n-1.
  EXPECT_EQ(indices(a), indices(u));
}

TEST(Subset, PointMass) {
  ReplayBuffer b = filled(16, 10);
  std::vector<std::uint8_t> bits(10, 0);
  bits[7] = 1;
  b.apply_mask(bits);
  Rng rng(1);
  for (const auto& r : b.sample_from_subset(64, rng)) EXPECT_EQ(r.index, 7u);
  EXPECT_EQ(b.fallback_count(), 0u);
}

TEST(Subset, EmptySubsetFallsBack) {
  ReplayBuffer b = filled(16, 10);
  b.apply_mask(std::vector<std::uint8_t>(10, 0));
  Rng rng(1);
  const auto refs = b.sample_from_subset(64, rng);
  EXPECT_EQ(refs.size(), 64u);
  EXPECT_EQ(b.fallback_count(), 1u);
}

TEST(Subset, NewTransitionsJoinUnlessStrict) {
  ReplayBuffer loose = filled(16, 4);
  loose.apply_mask(std::vector<std::uint8_t>(4, 0));
  const std::size_t s = loose.store(transition());
  EXPECT_TRUE(loose.in_subset(s));
  EXPECT_FALSE(loose.has_mask_bit(s));

  ReplayBuffer strict(16, 1, 1, /*strict_subset=*/true);
  for (int i = 0; i < 4; ++i) strict.store(transition());
  EXPECT_EQ(strict.subset_size(), 4u);
  strict.apply_mask(std::vector<std::uint8_t>(4, 0));
  const std::size_t t = strict.store(transition());
  EXPECT_FALSE(strict.in_subset(t));
  EXPECT_EQ(strict.subset_size(), 0u);
}

TEST(Subset, EvictionLeavesSubset) {
  ReplayBuffer b = filled(4, 4);
  b.apply_mask(std::vector<std::uint8_t>{1, 0, 0, 0});
  EXPECT_EQ(b.subset_size(), 1u);
  b.store(transition());  // overwrites slot 0 (in subset) and rejoins as new
  EXPECT_TRUE(b.in_subset(0));
  EXPECT_FALSE(b.has_mask_bit(0));
  EXPECT_EQ(b.subset_size(), 1u);
}

TEST(Subset, MaskLengthMustMatch) {
  ReplayBuffer b = filled(8, 4);
  EXPECT_THROW(b.apply_mask(std::vector<std::uint8_t>(3, 1)), ContractViolation);
}

// ---- segment trees -------------------------------------------------------

TEST(SumTree, MatchesBruteForcePrefixSums) {
  Rng rng(2);
  SumTree tree(37);
  std::vector<double> leaves(37, 0.0);
  for (int op = 0; op < 2000; ++op) {
    const std::size_t i = rng.index(37);
    leaves[i] = rng.bernoulli(0.1) ? 0.0 : rng.uniform(0.0, 5.0);
    tree.set(i, leaves[i]);
  }
  double prefix = 0.0;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    EXPECT_NEAR(tree.prefix_before(i), prefix, 1e-9);
    prefix += leaves[i];
  }
  EXPECT_NEAR(tree.total(), prefix, 1e-9);
  // Every internal node is the sum of its subtree.
  for (std::size_t node = tree.leaf_base() - 1; node >= 1; --node) {
    EXPECT_EQ(tree.node(node), tree.node(2 * node) + tree.node(2 * node + 1));
  }
}

TEST(SumTree, FindInvertsPrefixAndSkipsZeroLeaves) {
  SumTree tree(5);
  const std::vector<double> leaves{1.0, 0.0, 2.0, 0.0, 1.0};
  for (std::size_t i = 0; i < leaves.size(); ++i) tree.set(i, leaves[i]);
  EXPECT_EQ(tree.find(0.0), 0u);
  EXPECT_EQ(tree.find(0.999), 0u);
  EXPECT_EQ(tree.find(1.0), 2u);
  EXPECT_EQ(tree.find(2.999), 2u);
  EXPECT_EQ(tree.find(3.0), 4u);
  EXPECT_EQ(tree.find(4.0), 4u);
  EXPECT_EQ(tree.find(100.0), 4u);
}

TEST(SumTree, SingleUpdateChangesRootByDelta) {
  SumTree tree(8);
  for (std::size_t i = 0; i < 8; ++i) tree.set(i, 0.5);
  const double before = tree.total();
  tree.set(3, 0.01);
  EXPECT_EQ(tree.get(3), 0.01);
  EXPECT_NEAR(tree.total() - before, 0.01 - 0.5, 1e-15);
}

TEST(MinMaxTree, TrackExtremes) {
  MinTree mn(6, INFINITY);
  MaxTree mx(6, -INFINITY);
  const std::vector<double> v{3, 1, 4, 1, 5, 9};
  for (std::size_t i = 0; i < v.size(); ++i) {
    mn.set(i, v[i]);
    mx.set(i, v[i]);
  }
  EXPECT_EQ(mn.root(), 1.0);
  EXPECT_EQ(mx.root(), 9.0);
  mx.set(5, 0.0);
  EXPECT_EQ(mx.root(), 5.0);
}

// ---- proportional prioritization -----------------------------------------

struct PropFixture {
  PropFixture(std::vector<double> priorities, PerConfig config)
      : buffer(priorities.size(), 1, 1), sampler(priorities.size(), config) {
    for (std::size_t i = 0; i < priorities.size(); ++i) {
      const std::size_t slot = buffer.store(transition());
      sampler.on_store(buffer, slot);
    }
    std::vector<std::size_t> slots;
    for (std::size_t i = 0; i < priorities.size(); ++i) {
      buffer.set_td_error(i, priorities[i], priorities[i]);
      slots.push_back(i);
    }
    sampler.on_priorities_updated(buffer, slots);
  }
  ReplayBuffer buffer;
  ProportionalSampler sampler;
};

PerConfig alpha_one() {
  PerConfig c;
  c.alpha = 1.0;
  return c;
}

TEST(Proportional, PointMass) {
  PropFixture f({1, 0, 0, 0}, alpha_one());
  Rng rng(0);
  for (const auto& r : f.sampler.sample(f.buffer, 64, rng).slots) EXPECT_EQ(r.index, 0u);
  EXPECT_EQ(f.sampler.probability(0), 1.0);
}

TEST(Proportional, CategoricalFrequencies) {
  PropFixture f({1, 3}, alpha_one());
  Rng rng(4);
  std::vector<int> counts(2, 0);
  for (int k = 0; k < 100000 / 50; ++k) {
    for (const auto& r : f.sampler.sample(f.buffer, 50, rng).slots) ++counts[r.index];
  }
  EXPECT_NEAR(counts[0] / 1e5, 0.25, 0.25 * 0.02);
  EXPECT_NEAR(counts[1] / 1e5, 0.75, 0.75 * 0.02);
}

TEST(Proportional, SymmetricWeightsAreOne) {
  PropFixture f({2, 2}, alpha_one());
  f.sampler.set_beta(1.0);
  Rng rng(0);
  const auto batch = f.sampler.sample(f.buffer, 8, rng);
  for (double w : batch.is_weights) EXPECT_EQ(w, 1.0);
}

TEST(Proportional, WeightsAreMaxNormalized) {
  PropFixture f({1, 4}, alpha_one());
  f.sampler.set_beta(1.0);
  Rng rng(0);
  const auto batch = f.sampler.sample(f.buffer, 64, rng);
  for (std::size_t k = 0; k < batch.slots.size(); ++k) {
    EXPECT_EQ(batch.is_weights[k], batch.slots[k].index == 0 ? 1.0 : 0.25);
  }
}

TEST(Proportional, AlphaExponent) {
  PerConfig c;
  c.alpha = 0.5;
  PropFixture f({1, 4}, c);
  EXPECT_DOUBLE_EQ(f.sampler.probability(0), 1.0 / 3.0);
}

TEST(Proportional, AllZeroIsDegenerate) {
  PropFixture f({0, 0}, alpha_one());
  Rng rng(0);
  EXPECT_THROW(f.sampler.sample(f.buffer, 4, rng), DegeneratePriorityError);
}

TEST(Proportional, UpdatePrioritiesUsesEpsilon) {
  PropFixture f({1, 1, 1, 1}, alpha_one());
  const double before = f.sampler.tree().total();
  const std::vector<SlotRef> refs{f.buffer.ref(3)};
  const std::vector<double> td{0.0};
  EXPECT_EQ(update_priorities(f.buffer, f.sampler, refs, td, alpha_one()), 0u);
  EXPECT_EQ(f.sampler.tree().get(3), 0.01);
  EXPECT_NEAR(f.sampler.tree().total() - before, 0.01 - 1.0, 1e-15);
}

TEST(Proportional, TreeConsistentAfterUpdatingAllLeaves) {
  PropFixture f({1, 1, 1, 1, 1, 1, 1}, PerConfig{});
  Rng rng(9);
  std::vector<SlotRef> refs;
  std::vector<double> td;
  for (std::size_t i = 0; i < 7; ++i) {
    refs.push_back(f.buffer.ref(i));
    td.push_back(rng.normal());
  }
  update_priorities(f.buffer, f.sampler, refs, td, PerConfig{});
  const SumTree& tree = f.sampler.tree();
  for (std::size_t node = 1; node < tree.leaf_base(); ++node) {
    EXPECT_NEAR(tree.node(node), tree.node(2 * node) + tree.node(2 * node + 1), 1e-9);
  }
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_NEAR(tree.get(i), std::pow(std::abs(td[i]) + 0.01, 0.6), 1e-15);
    EXPECT_EQ(f.buffer.at(i).td_error, td[i]);
  }
}

TEST(UpdatePriorities, EmptyListIsNoOp) {
  PropFixture f({1, 2}, alpha_one());
  const double total = f.sampler.tree().total();
  EXPECT_EQ(update_priorities(f.buffer, f.sampler, {}, {}, alpha_one()), 0u);
  EXPECT_EQ(f.sampler.tree().total(), total);
  EXPECT_EQ(f.buffer.at(0).per_priority, 1.0);
}

TEST(UpdatePriorities, StaleRefsAreSkipped) {
  ReplayBuffer b = filled(2, 2);
  UniformSampler s;
  const std::vector<SlotRef> refs{b.ref(0), b.ref(1)};
  b.store(transition());  // slot 0 overwritten
  const std::vector<double> td{5.0, 6.0};
  EXPECT_EQ(update_priorities(b, s, refs, td, PerConfig{}), 1u);
  EXPECT_EQ(b.at(1).td_error, 6.0);
  EXPECT_NE(b.at(0).td_error, 5.0);
  EXPECT_EQ(b.stale_update_count(), 1u);
}

TEST(UpdatePriorities, LengthMismatchIsAnError) {
  ReplayBuffer b = filled(2, 2);
  UniformSampler s;
  const std::vector<SlotRef> refs{b.ref(0)};
  EXPECT_THROW(update_priorities(b, s, refs, std::vector<double>{}, PerConfig{}), ContractViolation);
}

// ---- rank-based prioritization -------------------------------------------

struct RankFixture {
  RankFixture(const std::vector<double>& tds, PerConfig config) : buffer(tds.size(), 1, 1), sampler(config) {
    for (std::size_t i = 0; i < tds.size(); ++i) {
      const std::size_t slot = buffer.store(transition());
      sampler.on_store(buffer, slot);
    }
    for (std::size_t i = 0; i < tds.size(); ++i) buffer.set_td_error(i, tds[i], std::abs(tds[i]) + 0.01);
    sampler.resort(buffer);
  }
  ReplayBuffer buffer;
  RankSampler sampler;
};

TEST(Rank, TwoTransitionProbabilities) {
  RankFixture f({5.0, 1.0}, alpha_one());
  EXPECT_EQ(f.sampler.ranked_slots()[0], 0u);
  EXPECT_DOUBLE_EQ(f.sampler.rank_probability(1, 2), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(f.sampler.rank_probability(2, 2), 1.0 / 3.0);
  Rng rng(1);
  std::vector<int> counts(2, 0);
  for (int k = 0; k < 3000; ++k) {
    for (const auto& r : f.sampler.sample(f.buffer, 2, rng).slots) ++counts[r.index];
  }
  EXPECT_NEAR(counts[0] / 6000.0, 2.0 / 3.0, 0.02);
}

TEST(Rank, TiesKeepInsertionOrder) {
  RankFixture f({1.0, 1.0, 1.0, 1.0}, PerConfig{});
  EXPECT_EQ(f.sampler.ranked_slots(), (std::deque<std::size_t>{0, 1, 2, 3}));
}

TEST(Rank, SortsByMagnitudeDescending) {
  RankFixture f({0.1, -3.0, 2.0, 0.5}, PerConfig{});
  EXPECT_EQ(f.sampler.ranked_slots(), (std::deque<std::size_t>{1, 2, 3, 0}));
}

TEST(Rank, ProbabilitiesSumToOne) {
  RankSampler s(PerConfig{});
  double total = 0.0;
  for (std::size_t k = 1; k <= 50; ++k) total += s.rank_probability(k, 50);
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Rank, TopRankFrequency) {
  PerConfig c;
  c.alpha = 0.7;
  std::vector<double> tds(10000);
  for (std::size_t i = 0; i < tds.size(); ++i) tds[i] = 1.0 / (1.0 + static_cast<double>(i));
  RankFixture f(tds, c);
  Rng rng(5);
  int top = 0;
  for (int k = 0; k < 100000 / 64 + 1; ++k) {
    for (const auto& r : f.sampler.sample(f.buffer, 64, rng).slots) top += r.index == 0;
  }
  const double draws = static_cast<double>((100000 / 64 + 1) * 64);
  const double p1 = f.sampler.rank_probability(1, 10000);
  EXPECT_NEAR(top / draws, p1, 0.05 * p1);
}

TEST(Rank, WeightsAreAtMostOne) {
  RankFixture f({3, 2, 1, 0.5}, PerConfig{});
  f.sampler.set_beta(1.0);
  Rng rng(0);
  const auto batch = f.sampler.sample(f.buffer, 16, rng);
  double biggest = 0.0;
  for (double w : batch.is_weights) {
    EXPECT_LE(w, 1.0);
    EXPECT_GT(w, 0.0);
    biggest = std::max(biggest, w);
  }
}

TEST(Rank, NewTransitionsEnterAtTop) {
  PerConfig c;
  c.rank_refresh_interval = 1000;
  ReplayBuffer b(8, 1, 1);
  RankSampler s(c);
  for (int i = 0; i < 3; ++i) s.on_store(b, b.store(transition()));
  Rng rng(0);
  s.sample(b, 1, rng);
  s.on_store(b, b.store(transition()));
  EXPECT_EQ(s.ranked_slots().front(), 3u);
  EXPECT_EQ(s.ranked_slots().size(), 4u);
}

// ---- factory -------------------------------------------------------------

TEST(Samplers, NamesRoundTrip) {
  for (auto k : {SamplerKind::kUniform, SamplerKind::kPerProp, SamplerKind::kPerRank, SamplerKind::kEro}) {
    EXPECT_EQ(parse_sampler_kind(to_string(k)), k);
    EXPECT_EQ(make_sampler(k, 8, PerConfig{})->kind(), k);
  }
  EXPECT_THROW(parse_sampler_kind("greedy"), ConfigError);
}

TEST(Samplers, AnnealedBeta) {
  PerConfig c;
  EXPECT_DOUBLE_EQ(annealed_beta(c, 0.0), 0.4);
  EXPECT_DOUBLE_EQ(annealed_beta(c, 0.5), 0.7);
  EXPECT_DOUBLE_EQ(annealed_beta(c, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(annealed_beta(c, 3.0), 1.0);
}

TEST(Samplers, ReturnRequestedBatchSize) {
  ReplayBuffer b = filled(32, 20);
  Rng rng(0);
  for (auto k : {SamplerKind::kUniform, SamplerKind::kPerProp, SamplerKind::kPerRank, SamplerKind::kEro}) {
    auto s = make_sampler(k, 32, PerConfig{});
    for (std::size_t i = 0; i < 20; ++i) s->on_store(b, i);
    EXPECT_EQ(s->sample(b, 64, rng).slots.size(), 64u) << to_string(k);
  }
}

// ---- snapshot ------------------------------------------------------------

TEST(Snapshot, RoundTrip) {
  testing::TempDir dir;
  ReplayBuffer b = filled(3, 5);
  b.set_td_error(2, -0.25, 0.26);
  b.apply_mask(std::vector<std::uint8_t>{1, 0, 1});
  write_snapshot(b, dir.file("b.erpb"));
  const BufferSnapshot s = read_snapshot(dir.file("b.erpb"));
  EXPECT_EQ(s.capacity, 3u);
  ASSERT_EQ(s.transitions.size(), 3u);
  const auto order = b.slots_in_order();
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Transition& t = b.at(order[k]);
    EXPECT_EQ(s.transitions[k].reward, t.reward);
    EXPECT_EQ(s.transitions[k].state, t.state);
    EXPECT_EQ(s.transitions[k].insert_timestep, t.insert_timestep);
    EXPECT_EQ(s.transitions[k].td_error, t.td_error);
    EXPECT_EQ(s.in_subset[k], b.in_subset(order[k]) ? 1 : 0);
  }
}

TEST(Snapshot, RejectsGarbage) {
  testing::TempDir dir;
  {
    std::ofstream f(dir.file("bad.erpb"), std::ios::binary);
    f << "NOPE-not-a-snapshot";
  }
  EXPECT_THROW(read_snapshot(dir.file("bad.erpb")), IoError);
  EXPECT_THROW(read_snapshot(dir.file("missing.erpb")), IoError);
}

TEST(Snapshot, RejectsTruncation) {
  testing::TempDir dir;
  write_snapshot(filled(4, 4), dir.file("b.erpb"));
  std::ifstream in(dir.file("b.erpb"), std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  {
    std::ofstream out(dir.file("cut.erpb"), std::ios::binary);
    out << bytes.substr(0, bytes.size() - 3);
  }
  EXPECT_THROW(read_snapshot(dir.file("cut.erpb")), IoError);
}

}  // namespace
}  // namespace replay_opt::replay
