#include "mecplan/generator.h"

#include <random>
#include <string>

#include "mecplan/error.h"

namespace mecplan {
namespace {

// std::uniform_real_distribution is implementation-defined; this is not.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : engine_(seed) {}
  double Next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Between(double lo, double hi) { return lo + (hi - lo) * Next(); }
  int Index(int n) {
    const int k = static_cast<int>(Next() * n);
    return k < n ? k : n - 1;
  }

 private:
  std::mt19937_64 engine_;
};

void Check(bool ok, const std::string& message) {
  if (!ok) throw PlanningError(ErrorCode::kBadParameter, message);
}

}  // namespace

Instance GenerateInstance(const GeneratorConfig& c) {
  Check(c.num_bs >= 1, "num_bs must be >= 1");
  Check(c.interfaces >= 1, "interfaces must be >= 1");
  Check(c.num_tasks >= 0, "num_tasks must be >= 0");
  Check(c.size_min > 0 && c.size_max >= c.size_min, "bad task size range");
  Check(c.area_width_m > 0 && c.area_height_m > 0, "area must be positive");
  Check(c.cloud_latency >= 0, "cloud latency must be >= 0");
  Check(c.saturation > 0 && c.saturation <= 1, "saturation must be in (0, 1]");
  Check(c.max_attempts >= 1, "max_attempts must be >= 1");
  for (const ServerSpec& s : c.servers) {
    Check(s.bs >= 0 && s.bs < c.num_bs,
          "server station " + std::to_string(s.bs + 1) + " out of range");
    Check(s.capacity > 0, "server capacity must be positive");
  }
  std::vector<int> cloud = c.cloud_bs;
  if (cloud.empty()) cloud.push_back(c.num_bs - 1);
  for (int p : cloud) {
    Check(p >= 0 && p < c.num_bs,
          "cloud station " + std::to_string(p + 1) + " out of range");
  }

  Uniform rng(c.seed);
  for (int attempt = 0; attempt < c.max_attempts; ++attempt) {
    Instance inst;
    inst.seed = c.seed;
    inst.cloud_latency = c.cloud_latency;
    inst.saturation = c.saturation;
    inst.link_model = c.link_model;
    inst.base_stations.resize(c.num_bs);
    for (BaseStation& bs : inst.base_stations) {
      bs.x = rng.Between(0.0, c.area_width_m);
      bs.y = rng.Between(0.0, c.area_height_m);
      bs.interfaces = c.interfaces;
    }
    for (const ServerSpec& s : c.servers) {
      inst.base_stations[s.bs].has_server = true;
      inst.base_stations[s.bs].storage_capacity = s.capacity;
    }
    for (int p : cloud) inst.base_stations[p].cloud_attached = true;
    for (int b = 0; b < c.num_tasks; ++b) {
      Task t;
      t.origin = rng.Index(c.num_bs);
      t.size = rng.Between(c.size_min, c.size_max);
      inst.tasks.push_back(t);
    }
    NormalizeWeights(inst, false);
    if (ValidateInstance(inst).empty()) return inst;
  }
  throw PlanningError(ErrorCode::kBadParameter,
                      "no valid instance after " +
                          std::to_string(c.max_attempts) + " draws");
}

}  // namespace mecplan
