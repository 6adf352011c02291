#include "dew/forest.hpp"

#include <gtest/gtest.h>

#include "dew/engine.hpp"
#include "dew/oracle.hpp"

namespace dew {
namespace {

ForestPlan make_plan(std::uint64_t assoc, unsigned top,
                     std::uint64_t block_bytes = 4) {
  ForestPlan plan;
  plan.block_bytes = block_bytes;
  plan.assoc = assoc;
  plan.top_set_exponent = top;
  plan.reported_sets = plan.levels();
  plan.include_direct_mapped = assoc > 1;
  return plan;
}

TEST(SimulationForest, ThreeLevelTreeHasSevenEmptyNodes) {
  SimulationForest forest(make_plan(4, 2));
  EXPECT_EQ(forest.node_count(), 7u);
  EXPECT_EQ(forest.level_count(), 3u);
  for (unsigned level = 0; level < 3; ++level) {
    for (std::uint64_t set = 0; set < (std::uint64_t{1} << level); ++set) {
      const NodeRef node = forest.node(level, set);
      EXPECT_EQ(node.node.mra, kEmptyTag);
      EXPECT_EQ(node.node.mre, WayEntry{});
      EXPECT_EQ(node.node.fifo_cursor, 0u);
      ASSERT_EQ(node.ways.size(), 4u);
      for (const WayEntry& way : node.ways) EXPECT_EQ(way, WayEntry{});
    }
    EXPECT_EQ(forest.stats(level).misses_assoc, 0u);
    EXPECT_EQ(forest.stats(level).misses_dm, 0u);
  }
  EXPECT_EQ(forest.accesses(), 0u);
}

TEST(SimulationForest, FifteenLevelTreeHas32767Nodes) {
  SimulationForest forest(make_plan(2, 14));
  EXPECT_EQ(forest.node_count(), 32767u);
}

TEST(SimulationForest, RefusesToExceedTheNodeBudget) {
  EXPECT_THROW(SimulationForest(make_plan(2, 25)), ResourceError);
  EXPECT_THROW(SimulationForest(make_plan(2, 4), 16), ResourceError);
  EXPECT_NO_THROW(SimulationForest(make_plan(2, 4), 31));
}

TEST(SetIndex, RootLevelAlwaysSelectsSetZero) {
  EXPECT_EQ(set_index(0, 0), 0u);
  EXPECT_EQ(set_index(0, 0xdeadbeef), 0u);
}

TEST(SetIndex, LowBitsSelectTheSet) {
  EXPECT_EQ(set_index(2, 0b1011), 3u);
  EXPECT_EQ(set_index(3, 0b1011), 3u);  // bit 2 clear: same child index
  EXPECT_EQ(set_index(2, 0b1111), 3u);
  EXPECT_EQ(set_index(3, 0b1111), 7u);  // bit 2 set: child index + 4
}

TEST(SetIndex, ChildIsAlwaysOneOfTheTwoParentChildren) {
  for (unsigned level = 0; level < 6; ++level) {
    for (std::uint64_t block = 0; block < 64; ++block) {
      const std::uint64_t parent = set_index(level, block);
      const std::uint64_t child = set_index(level + 1, block);
      const bool high = (block >> level) & 1;
      EXPECT_EQ(child, high ? parent + (std::uint64_t{1} << level) : parent);
    }
  }
}

TEST(FifoVictim, CursorStartsAtZeroAndAdvancesPerInsertion) {
  SimulationForest forest(make_plan(4, 0));
  DewEngine engine(forest);
  NodeRef node = forest.node(0, 0);
  EXPECT_EQ(fifo_victim(node.node), 0u);
  engine.handle_miss(node, 100, ParentLink{});
  EXPECT_EQ(fifo_victim(node.node), 1u);
}

TEST(FifoVictim, SingleWayNodeAlwaysEvictsWayZero) {
  SimulationForest forest(make_plan(1, 0));
  DewEngine engine(forest);
  NodeRef node = forest.node(0, 0);
  EXPECT_EQ(fifo_victim(node.node), 0u);
  engine.handle_miss(node, 100, ParentLink{});
  EXPECT_EQ(fifo_victim(node.node), 0u);
}

TEST(FifoVictim, ThirdInsertionReplacesTheOldestWay) {
  SimulationForest forest(make_plan(2, 0));
  DewEngine engine(forest);
  for (std::uint64_t tag : {101, 102, 103}) {
    engine.process_access(tag);
  }
  NodeRef node = forest.node(0, 0);
  // 103 replaced 101 in way 0; the next victim is way 1, still holding 102.
  EXPECT_EQ(node.ways[0].tag, 103u);
  EXPECT_EQ(node.ways[1].tag, 102u);
  EXPECT_EQ(fifo_victim(node.node), 1u);

  // The reference model agrees on the surviving contents.
  ReferenceCache oracle(CacheConfig{1, 2, 1}, Policy::Fifo);
  for (std::uint64_t tag : {101, 102, 103}) oracle.access_block(tag);
  EXPECT_TRUE(oracle.access_block(102));   // still resident
  EXPECT_FALSE(oracle.access_block(101));  // evicted by the third insertion
}

TEST(EmptySentinels, NeverCollideWithTraceDerivableValues) {
  EXPECT_GT(kEmptyTag, kMaxAddress);
  EXPECT_EQ(kEmptyWave, std::numeric_limits<std::uint32_t>::max());
}

}  // namespace
}  // namespace dew
