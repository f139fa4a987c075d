#pragma once

#include "visnav/geometry.hpp"
#include "visnav/world.hpp"

namespace visnav::ctrl {

struct ControllerGains {
  double k_v = 6.0;        // 1/s; 1/dt pairs one waypoint with one control tick
  double k_theta = 6.0;    // 1/s
  double v_max = 1.0;      // m/s
  double omega_max = 1.0;  // rad/s
};

// Throws std::invalid_argument unless all gains are strictly positive.
void validate(const ControllerGains& gains);

// Heuristic proportional waypoint tracker:
//   v     = clip(k_v * sqrt(dx^2 + dy^2), 0, v_max)   if |dtheta| <= pi/4
//         = 0                                         otherwise
//   omega = clip(k_theta * wrap(dtheta), -omega_max, omega_max)
sim::Command track(const RelativePose& waypoint, const ControllerGains& gains);

}  // namespace visnav::ctrl
