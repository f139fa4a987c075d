#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "visnav/geometry.hpp"
#include "visnav/world.hpp"

namespace visnav::ctrl {

enum class Termination { Stopped, Budget, DecodeFailure };

const char* label(Termination t);
Termination termination_from_label(const std::string& s);

// One replanning round: what was decoded and what the pre-error plan was.
struct PlanRecord {
  WaypointTrajectory decoded;
  WaypointTrajectory reference;  // strided pre-error steps; empty for external plans
  int start_tick = 0;            // control tick at which this plan took over
  bool fallback_rotation = false;
  bool flipped = false;
  bool hallucinated = false;
  bool truncated = false;
  bool decode_failed = false;

  bool operator==(const PlanRecord&) const = default;
};

struct EpisodeResult {
  int episode_index = 0;
  std::uint64_t seed = 0;
  bool success = false;            // S_i: final pose within the goal threshold
  double shortest_path_len = 0.0;  // l_i
  double executed_len = 0.0;       // p_i
  double nav_error = 0.0;          // |final - goal|
  Pose final_pose;
  double goal_x = 0.0;
  double goal_y = 0.0;
  double success_threshold = 0.0;
  Trajectory trace;                // pose per control tick, starting pose first
  std::vector<sim::Frame> frames;  // per-tick observations when recorded
  Termination termination = Termination::Budget;
  int collisions = 0;
  int ticks = 0;
  std::vector<PlanRecord> plans;

  bool operator==(const EpisodeResult&) const = default;
};

// One versioned JSON document per episode; trace_stride > 1 downsamples the
// trace (the final pose is always kept).
std::string to_json_string(const EpisodeResult& r, int trace_stride = 1);
EpisodeResult episode_result_from_json_string(const std::string& text);
void save_episode_result(const EpisodeResult& r, const std::string& path, int trace_stride = 1);
EpisodeResult load_episode_result(const std::string& path);

}  // namespace visnav::ctrl
