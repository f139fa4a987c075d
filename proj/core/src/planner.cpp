#include "visnav/planner.hpp"

#include <stdexcept>

namespace visnav::plan {

OraclePlanProvider::OraclePlanProvider(imagine::RouterMode mode,
                                       const imagine::ErrorModel& error_model,
                                       sim::SensorConfig sensor, int horizon_frames)
    : mode_(mode), sensor_(sensor), horizon_frames_(horizon_frames) {
  using imagine::ExpertId;
  if (mode == imagine::RouterMode::ACMoE) {
    experts_[ExpertId::Left] = {ExpertId::Left, error_model};
    experts_[ExpertId::Right] = {ExpertId::Right, error_model};
  } else {
    experts_[ExpertId::Single] = {ExpertId::Single, error_model};
  }
}

imagine::VisualPlan OraclePlanProvider::plan(const PlanQuery& q) {
  if (q.world == nullptr) throw std::invalid_argument("plan: query carries no world");
  const auto subgoal = imagine::decompose(q.instruction, q.frame, q.pose, q.goal_x, q.goal_y);
  const auto expert_id = imagine::route(subgoal, mode_);
  return imagine::imagine(*q.world, q.frame, q.pose, subgoal, experts_.at(expert_id), sensor_,
                          horizon_frames_, q.seed);
}

}  // namespace visnav::plan
