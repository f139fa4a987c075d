#pragma once

#include <cstdint>

#include "visnav/controller.hpp"
#include "visnav/idm.hpp"
#include "visnav/planner.hpp"
#include "visnav/result.hpp"

namespace visnav::ctrl {

struct EpisodeConfig {
  int max_steps = 900;             // control ticks
  double success_threshold = 3.0;  // meters
  int ticks_per_waypoint = 1;
  double dt = 1.0 / 6.0;           // control tick period, seconds
  bool record_frames = false;      // keep a per-tick observation log
  int trace_stride = 1;            // trace downsampling on serialization
};

void validate(const EpisodeConfig& cfg);

// Open-loop execute/replan loop: observe, plan, decode, then consume the
// whole waypoint buffer on dead reckoning before observing again. Terminates
// on the stop decision (within threshold at a replan boundary), on the tick
// budget, or after three consecutive decode failures. Deterministic given
// the seed.
EpisodeResult run_episode(const sim::Episode& episode, plan::PlanProvider& provider,
                          const idm::IdmConfig& idm_cfg, const ControllerGains& gains,
                          const EpisodeConfig& cfg, const sim::SensorConfig& sensor,
                          std::uint64_t seed);

}  // namespace visnav::ctrl
