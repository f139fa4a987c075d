#pragma once

#include <cstddef>
#include <vector>

#include "visnav/geometry.hpp"
#include "visnav/imaginer.hpp"
#include "visnav/world.hpp"

namespace visnav::idm {

// Per-step output of the geometric inverse dynamics.
struct PoseEstimate {
  RelativePose rel;           // camera motion a -> b, in a's body frame
  std::size_t n_matches = 0;  // common landmarks used
  double residual = 0.0;      // RMS of post-alignment point residuals, meters
};

struct IdmConfig {
  int stride = 4;                // frames between decoded waypoints
  std::size_t min_matches = 2;   // minimum common landmarks
  double max_residual = 0.1;     // meters, gating threshold
};

void validate(const IdmConfig& cfg);

// Closed-form planar rigid alignment of the common landmark points.
// Throws EstimateError (DegenerateGeometry) below min_matches common
// landmarks and EstimateError (UnreliableEstimate) above the residual gate.
PoseEstimate estimate_relative_pose(const sim::Frame& a, const sim::Frame& b,
                                    const IdmConfig& cfg);

// Waypoints between frames k*stride and (k+1)*stride; a trailing partial
// stride is dropped. Requires at least stride + 1 frames. A per-step failure
// aborts the decode with a DecodeError carrying the step index.
WaypointTrajectory decode_frames(const std::vector<sim::Frame>& frames, const IdmConfig& cfg);

inline WaypointTrajectory decode_trajectory(const imagine::VisualPlan& plan,
                                            const IdmConfig& cfg) {
  return decode_frames(plan.frames, cfg);
}

}  // namespace visnav::idm
