#ifndef MECPLAN_GENERATOR_H_
#define MECPLAN_GENERATOR_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "mecplan/model.h"

namespace mecplan {

struct ServerSpec {
  int bs = 0;             // zero-based
  double capacity = 0.0;  // bytes
};

// Defaults describe the reference scenario: servers at BS1 and BS3, the cloud
// behind the last station, tasks of 0.1 to 1 GB over a 280 m square.
struct GeneratorConfig {
  std::uint64_t seed = 1;
  int num_bs = 6;
  int interfaces = 2;
  int num_tasks = 10;
  double size_min = 0.1 * kBytesPerGigabyte;
  double size_max = 1.0 * kBytesPerGigabyte;
  double area_width_m = 280.0;
  double area_height_m = 280.0;
  std::vector<ServerSpec> servers = {{0, 3.2 * kBytesPerGigabyte},
                                     {2, 3.6 * kBytesPerGigabyte}};
  std::vector<int> cloud_bs;  // empty: the last station
  double cloud_latency = 0.2;
  double saturation = 0.95;
  LinkModelConfig link_model;
  int max_attempts = 1000;
};

// Uniform placement and task draws, deterministic per seed on every
// platform. Draws are repeated until the instance validates. Throws
// PlanningError(kBadParameter) for out-of-range parameters or when no valid
// instance appears within max_attempts.
Instance GenerateInstance(const GeneratorConfig& config);

}  // namespace mecplan

#endif  // MECPLAN_GENERATOR_H_
