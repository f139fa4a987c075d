#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "visnav/geometry.hpp"
#include "visnav/result.hpp"

namespace visnav::metrics {

enum class Action { F, TL, TR, S };

using ActionSequence = std::vector<Action>;

const char* label(Action a);

struct DiscretizationThresholds {
  double trans_min = 0.05;  // meters per step
  double yaw_min = 0.05;    // radians per step
};

// Euclidean distance from the final pose to the goal, in the plane.
double navigation_error(const Pose& final_pose, double goal_x, double goal_y);

// True iff any trace pose comes within `threshold` of the goal.
bool oracle_success(const Trajectory& trace, double goal_x, double goal_y, double threshold);

// SPL = (1/N) sum_i S_i * l_i / max(p_i, l_i). Throws std::invalid_argument
// on an empty list or any l_i <= 0.
double spl(const std::vector<ctrl::EpisodeResult>& results);

struct Aggregate {
  double tl = 0.0;   // mean executed length
  double ne = 0.0;   // mean navigation error
  double os = 0.0;   // oracle success rate
  double sr = 0.0;   // success rate
  double spl = 0.0;
  std::size_t n = 0;
};

Aggregate aggregate(const std::vector<ctrl::EpisodeResult>& results);

struct RpeResult {
  double translational = 0.0;  // meters
  double rotational = 0.0;     // radians
};

// Mean pointwise pose error between equal-length trajectories expressed in a
// common frame. Throws std::invalid_argument on length mismatch or empties.
RpeResult rpe(const Trajectory& reference, const Trajectory& generated);

// Per step: |dtheta| >= yaw_min picks TL/TR by sign; otherwise translation
// magnitude >= trans_min picks F; otherwise S.
ActionSequence discretize_actions(const WaypointTrajectory& steps,
                                  const DiscretizationThresholds& th);

// Unit-cost insert/delete/substitute edit distance.
std::size_t levenshtein(const ActionSequence& a, const ActionSequence& b);

// 1 - Levenshtein(ref, gen) / max(|ref|, |gen|). Throws std::invalid_argument
// when both are empty.
double motion_fidelity(const ActionSequence& reference, const ActionSequence& generated);

// Kinematic rollup of one episode's plan records (decoded vs pre-error
// reference); available only when reference plans were recorded.
struct KinematicStats {
  double rpe_t = 0.0;
  double rpe_r = 0.0;
  double motion_fidelity = 0.0;
  bool available = false;
};

KinematicStats kinematics(const ctrl::EpisodeResult& result,
                          const DiscretizationThresholds& th = {});

}  // namespace visnav::metrics
