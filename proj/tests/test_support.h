#ifndef MECPLAN_TESTS_TEST_SUPPORT_H_
#define MECPLAN_TESTS_TEST_SUPPORT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mecplan/generator.h"
#include "mecplan/io.h"
#include "mecplan/linkgraph.h"
#include "mecplan/model.h"

namespace mecplan::testing {

struct StationSpec {
  double x = 0.0;
  double y = 0.0;
  int interfaces = 1;
  double server_gb = 0.0;  // 0: no server
  bool cloud = false;
};

struct TaskSpec {
  double size_gb = 1.0;
  int origin = 0;  // zero-based
  double weight = 0.0;  // 0: uniform
};

inline Instance MakeInstance(const std::vector<StationSpec>& stations,
                             const std::vector<TaskSpec>& tasks) {
  Instance inst;
  for (const StationSpec& s : stations) {
    BaseStation bs;
    bs.x = s.x;
    bs.y = s.y;
    bs.interfaces = s.interfaces;
    bs.has_server = s.server_gb > 0.0;
    bs.storage_capacity = s.server_gb * kBytesPerGigabyte;
    bs.cloud_attached = s.cloud;
    inst.base_stations.push_back(bs);
  }
  bool weighted = false;
  for (const TaskSpec& t : tasks) {
    inst.tasks.push_back({t.size_gb * kBytesPerGigabyte, t.origin, t.weight});
    weighted = weighted || t.weight > 0.0;
  }
  NormalizeWeights(inst, weighted);
  return inst;
}

// Oracle-scale random scenario: 2 to 4 stations with two interfaces, 1 to 4
// tasks, one small server at BS1 and the cloud behind the last station.
inline GeneratorConfig TinyConfig(std::uint64_t seed) {
  GeneratorConfig c;
  c.seed = seed;
  c.num_bs = 2 + static_cast<int>(seed % 3);
  c.interfaces = 2;
  c.num_tasks = 1 + static_cast<int>(seed % 4);
  c.servers = {{0, 1.5 * kBytesPerGigabyte}};
  c.area_width_m = c.area_height_m = 150.0;
  return c;
}

// Small but non-trivial scenario for pipeline and allocation properties.
inline GeneratorConfig SmallConfig(std::uint64_t seed) {
  GeneratorConfig c;
  c.seed = seed;
  c.num_bs = 4;
  c.interfaces = 2;
  c.num_tasks = 4;
  c.servers = {{0, 1.2 * kBytesPerGigabyte}, {2, 1.0 * kBytesPerGigabyte}};
  c.area_width_m = c.area_height_m = 180.0;
  return c;
}

// BS1 -> BS2 -> BS3 (cloud). Task A starts at BS1 and crosses both links,
// task B starts at BS2 and shares only the second.
struct TwoLinkCase {
  Instance inst;
  LinkGraph graph;
  Plan plan;
  Link l1{0, 0, 1, 0};
  Link l2{1, 1, 2, 0};
};

inline TwoLinkCase MakeTwoLinkCase(double r1_gbps, double r2_gbps, double size_a,
                                   double size_b) {
  TwoLinkCase c;
  c.inst = MakeInstance({{0, 0, 1, 0, false}, {100, 0, 2, 0, false},
                         {200, 0, 1, 0, true}},
                        {{size_a, 0}, {size_b, 1}});
  c.inst.rate_overrides = {{0, 1, r1_gbps * kBytesPerSecondPerGbps, ""},
                           {1, 2, r2_gbps * kBytesPerSecondPerGbps, ""},
                           {0, 2, 0.0, ""}};
  c.graph = BuildInstanceGraph(c.inst);
  TaskRoute a;
  a.path = {c.l1, c.l2};
  a.cloud_entry = 2;
  TaskRoute b;
  b.path = {c.l2};
  b.cloud_entry = 2;
  c.plan.links = {c.l1, c.l2};
  c.plan.routes = {a, b};
  return c;
}

inline std::string DataPath(const std::string& name) {
  return std::string(MECPLAN_TEST_DATA_DIR) + "/" + name;
}

inline Instance SixStationInstance() {
  return ParseInstance(ReadFile(DataPath("six_station.json")));
}

}  // namespace mecplan::testing

#endif  // MECPLAN_TESTS_TEST_SUPPORT_H_
