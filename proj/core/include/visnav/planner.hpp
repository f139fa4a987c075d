#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "visnav/imaginer.hpp"

namespace visnav::plan {

struct PlanQuery {
  const sim::World* world = nullptr;
  sim::Frame frame;
  Pose pose;
  double goal_x = 0.0;
  double goal_y = 0.0;
  std::string instruction;
  std::uint64_t seed = 0;
};

// Seam between the episode loop and whatever produces imagined plans.
class PlanProvider {
 public:
  virtual ~PlanProvider() = default;
  virtual imagine::VisualPlan plan(const PlanQuery& query) = 0;
};

// decompose -> route -> imagine against the in-process oracle. Holds one
// expert config per routable expert id.
class OraclePlanProvider : public PlanProvider {
 public:
  OraclePlanProvider(imagine::RouterMode mode, const imagine::ErrorModel& error_model,
                     sim::SensorConfig sensor, int horizon_frames);

  imagine::VisualPlan plan(const PlanQuery& query) override;

 private:
  imagine::RouterMode mode_;
  std::map<imagine::ExpertId, imagine::ExpertConfig> experts_;
  sim::SensorConfig sensor_;
  int horizon_frames_;
};

}  // namespace visnav::plan
