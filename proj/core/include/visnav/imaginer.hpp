#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "visnav/geometry.hpp"
#include "visnav/world.hpp"

namespace visnav::imagine {

enum class Primitive { Forward, TurnLeft, TurnRight };

const char* label(Primitive p);

struct Subgoal {
  std::string text;
  Primitive primitive = Primitive::Forward;
  std::optional<std::array<double, 2>> target_hint;  // world frame, meters
};

enum class ExpertId { Left, Right, Single };

const char* label(ExpertId id);

// Failure-mode knobs of the imagined plan generator.
struct ErrorModel {
  double flip_prob = 0.0;           // left/right mirror of the planned motion
  double drift_sigma_t = 0.0;       // meters per step
  double drift_sigma_r = 0.0;       // radians per step
  double hallucination_prob = 0.0;  // plan ignores one obstacle cluster
  double truncation_prob = 0.0;     // imagined motion cut short at a random step

  bool operator==(const ErrorModel&) const = default;
};

void validate(const ErrorModel& em);

struct ExpertConfig {
  ExpertId expert_id = ExpertId::Single;
  ErrorModel error_model;
};

enum class RouterMode { ACMoE, SingleExpert };

// Imagined observation sequence over a horizon. frames[0] is the current
// observation; frame indices increase strictly. planned_poses are the
// construction-time camera poses of the rendered frames and reference_poses
// the pre-error ideal; both are empty for externally produced plans.
struct VisualPlan {
  std::vector<sim::Frame> frames;  // H + 1 entries
  int horizon_frames = 0;          // H
  std::vector<Pose> planned_poses;
  std::vector<Pose> reference_poses;
  bool fallback_rotation = false;  // no free path: in-place rotation plan
  bool flipped = false;
  bool hallucinated = false;
  bool truncated = false;
};

inline constexpr double kFrameRateHz = 24.0;
inline constexpr double kForwardConeHalfAngle = kPi / 8.0;
// Synthetic target distance when a subgoal carries no hint.
inline constexpr double kDefaultTargetDistance = 2.0;

// Rule-based reasoner: picks the primitive from the goal bearing
// (TurnLeft above +pi/8, TurnRight below -pi/8, Forward inside the cone)
// and renders a camera-movement prompt for it.
Subgoal decompose(const std::string& instruction, const sim::Frame& frame, const Pose& pose,
                  double goal_x, double goal_y);

// ACMoE: turn subgoals go to the matching side expert; forward requests go to
// the left expert by convention. SingleExpert: always Single.
ExpertId route(const Subgoal& subgoal, RouterMode mode);

// Oracle plan generator: grid-plans toward the subgoal target, rolls a
// virtual unicycle along the taut path at the frame rate, applies the
// expert's error model, and renders a frame at every planned pose.
// Deterministic given rng_seed.
VisualPlan imagine(const sim::World& world, const sim::Frame& current, const Pose& pose,
                   const Subgoal& subgoal, const ExpertConfig& expert,
                   const sim::SensorConfig& sensor, int horizon_frames, std::uint64_t rng_seed);

}  // namespace visnav::imagine
