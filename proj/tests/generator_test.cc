#include <gtest/gtest.h>

#include "mecplan/error.h"
#include "mecplan/generator.h"
#include "mecplan/io.h"
#include "mecplan/model.h"

namespace mecplan {
namespace {

TEST(GenerateInstance, SameSeedSameInstance) {
  GeneratorConfig cfg;
  cfg.seed = 42;
  EXPECT_EQ(SerializeInstance(GenerateInstance(cfg)),
            SerializeInstance(GenerateInstance(cfg)));
  GeneratorConfig other = cfg;
  other.seed = 43;
  EXPECT_NE(SerializeInstance(GenerateInstance(cfg)),
            SerializeInstance(GenerateInstance(other)));
}

TEST(GenerateInstance, DrawsRespectConfig) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.num_bs = 5;
    cfg.interfaces = 3;
    cfg.num_tasks = 20;
    const Instance inst = GenerateInstance(cfg);
    EXPECT_TRUE(ValidateInstance(inst).empty()) << "seed " << seed;
    ASSERT_EQ(inst.num_bs(), 5);
    ASSERT_EQ(inst.num_tasks(), 20);
    EXPECT_EQ(inst.CloudAttached(), std::vector<int>{4});
    EXPECT_TRUE(inst.base_stations[0].has_server);
    EXPECT_TRUE(inst.base_stations[2].has_server);
    EXPECT_FALSE(inst.base_stations[1].has_server);
    for (const BaseStation& bs : inst.base_stations) {
      EXPECT_EQ(bs.interfaces, 3);
      EXPECT_GE(bs.x, 0.0);
      EXPECT_LE(bs.x, cfg.area_width_m);
    }
    for (const Task& t : inst.tasks) {
      EXPECT_GE(t.size, cfg.size_min);
      EXPECT_LE(t.size, cfg.size_max);
      EXPECT_DOUBLE_EQ(t.weight, 1.0 / 20);
    }
  }
}

TEST(GenerateInstance, RejectsBadParameters) {
  auto expect_bad = [](GeneratorConfig cfg) {
    try {
      GenerateInstance(cfg);
      ADD_FAILURE() << "expected BadParameter";
    } catch (const PlanningError& e) {
      EXPECT_EQ(e.code(), ErrorCode::kBadParameter);
    }
  };
  GeneratorConfig cfg;
  cfg.num_bs = 0;
  expect_bad(cfg);
  cfg = {};
  cfg.size_min = 2 * cfg.size_max;
  expect_bad(cfg);
  cfg = {};
  cfg.servers = {{17, 1e9}};
  expect_bad(cfg);
  cfg = {};
  cfg.interfaces = 0;
  expect_bad(cfg);
  // Stations far apart with no servers: no instance can validate.
  cfg = {};
  cfg.servers.clear();
  cfg.area_width_m = cfg.area_height_m = 1e6;
  cfg.max_attempts = 20;
  expect_bad(cfg);
}

}  // namespace
}  // namespace mecplan
