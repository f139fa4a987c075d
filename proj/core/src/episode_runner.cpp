#include "visnav/episode_runner.hpp"

#include <cmath>
#include <stdexcept>

#include "visnav/errors.hpp"
#include "visnav/rng.hpp"

namespace visnav::ctrl {

void validate(const EpisodeConfig& cfg) {
  if (cfg.max_steps < 1) throw std::invalid_argument("episode: max_steps must be >= 1");
  if (!(cfg.success_threshold > 0.0))
    throw std::invalid_argument("episode: success_threshold must be positive");
  if (cfg.ticks_per_waypoint < 1)
    throw std::invalid_argument("episode: ticks_per_waypoint must be >= 1");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("episode: dt must be positive");
  if (cfg.trace_stride < 1) throw std::invalid_argument("episode: trace_stride must be >= 1");
}

namespace {

constexpr int kMaxConsecutiveDecodeFailures = 3;

// Pre-error plan steps at the decode stride, aligned with the decoded buffer.
WaypointTrajectory strided_reference(const imagine::VisualPlan& plan, int stride,
                                     std::size_t n_steps) {
  WaypointTrajectory out;
  const auto& ref = plan.reference_poses;
  if (ref.size() != plan.frames.size()) return out;
  const std::size_t s = static_cast<std::size_t>(stride);
  for (std::size_t k = 0; k < n_steps && (k + 1) * s < ref.size(); ++k)
    out.steps.push_back(relative(ref[k * s], ref[(k + 1) * s]));
  return out;
}

}  // namespace

EpisodeResult run_episode(const sim::Episode& episode, plan::PlanProvider& provider,
                          const idm::IdmConfig& idm_cfg, const ControllerGains& gains,
                          const EpisodeConfig& cfg, const sim::SensorConfig& sensor,
                          std::uint64_t seed) {
  if (episode.world == nullptr) throw std::invalid_argument("run_episode: episode has no world");
  if (!(episode.shortest_path_len > 0.0) || !std::isfinite(episode.shortest_path_len))
    throw std::invalid_argument("run_episode: shortest_path_len must be positive and finite");
  if (!episode.world->in_free_space(episode.start.x, episode.start.y))
    throw std::invalid_argument("run_episode: start in occupied space");
  if (!episode.world->in_free_space(episode.goal_x, episode.goal_y))
    throw std::invalid_argument("run_episode: goal in occupied space");
  validate(gains);
  validate(cfg);
  idm::validate(idm_cfg);
  sim::validate(sensor);

  const sim::World& world = *episode.world;
  EpisodeResult r;
  r.seed = seed;
  r.shortest_path_len = episode.shortest_path_len;
  r.goal_x = episode.goal_x;
  r.goal_y = episode.goal_y;
  r.success_threshold = cfg.success_threshold;

  sim::AgentState state{episode.start, false, 0.0};
  r.trace.poses.push_back(state.pose);
  r.trace.timestamps.push_back(0.0);
  if (cfg.record_frames)
    r.frames.push_back(sim::render_frame(world, state.pose, sensor, 0));

  int ticks = 0;
  int replans = 0;
  int consecutive_failures = 0;
  Termination term = Termination::Budget;

  auto goal_dist = [&](const Pose& p) { return std::hypot(episode.goal_x - p.x, episode.goal_y - p.y); };

  // Consumes a waypoint buffer open loop: track each waypoint for its tick
  // group, updating the remaining displacement from the commanded motion
  // only. Returns false when the tick budget ran out.
  auto execute_buffer = [&](const WaypointTrajectory& buffer, int ticks_per_waypoint) {
    for (const auto& waypoint : buffer.steps) {
      RelativePose remaining = waypoint;
      for (int t = 0; t < ticks_per_waypoint; ++t) {
        if (ticks >= cfg.max_steps) return false;
        const sim::Command cmd = track(remaining, gains);
        state = sim::step(state, cmd, cfg.dt, world);
        if (state.collided) ++r.collisions;
        ++ticks;
        r.trace.poses.push_back(state.pose);
        r.trace.timestamps.push_back(state.time);
        if (cfg.record_frames)
          r.frames.push_back(sim::render_frame(world, state.pose, sensor, ticks));
        const Pose commanded(cmd.v * cfg.dt, 0.0, cmd.omega * cfg.dt);
        remaining = relative(commanded, Pose(remaining.dx, remaining.dy, remaining.dtheta));
      }
    }
    return true;
  };

  // Blind-spot escape when nothing could be decoded: head a short way down
  // the widest opening in the scan so the next observation sees a different
  // landmark set.
  auto scan_nudge = [&](const sim::Frame& obs) {
    if (obs.scan.empty()) return;
    std::size_t best = 0;
    for (std::size_t k = 1; k < obs.scan.size(); ++k)
      if (obs.scan[k] > obs.scan[best]) best = k;
    const double bearing =
        -sensor.fov / 2.0 + sensor.fov * static_cast<double>(best) / (obs.scan.size() - 1);
    const double dist = std::min(0.5, obs.scan[best] / 2.0);
    WaypointTrajectory nudge;
    nudge.steps.push_back(RelativePose(0.0, 0.0, bearing));
    nudge.steps.push_back(RelativePose(dist, 0.0, 0.0));
    execute_buffer(nudge, 6);
  };

  while (true) {
    // Replan boundary: stop decision first, then budget.
    if (goal_dist(state.pose) <= cfg.success_threshold) {
      term = Termination::Stopped;
      break;
    }
    if (ticks >= cfg.max_steps) {
      term = Termination::Budget;
      break;
    }

    sim::Frame obs = sim::render_frame(world, state.pose, sensor, ticks);
    plan::PlanQuery query{&world, obs, state.pose, episode.goal_x, episode.goal_y,
                          episode.instruction, seed_hash(seed, static_cast<std::uint64_t>(replans))};
    ++replans;
    const imagine::VisualPlan vp = provider.plan(query);

    PlanRecord record;
    record.start_tick = ticks;
    record.fallback_rotation = vp.fallback_rotation;
    record.flipped = vp.flipped;
    record.hallucinated = vp.hallucinated;
    record.truncated = vp.truncated;

    WaypointTrajectory buffer;
    try {
      buffer = idm::decode_trajectory(vp, idm_cfg);
      consecutive_failures = 0;
    } catch (const DecodeError& e) {
      record.decode_failed = true;
      if (e.step_index() == 0) {
        // No usable waypoint: a zero-progress failure counts toward the limit.
        r.plans.push_back(std::move(record));
        if (++consecutive_failures >= kMaxConsecutiveDecodeFailures) {
          term = Termination::DecodeFailure;
          break;
        }
        scan_nudge(obs);
        continue;
      }
      // Execute the decodable prefix; the steps before the failure repeat
      // deterministically, so this cannot throw.
      std::vector<sim::Frame> prefix(vp.frames.begin(),
                                     vp.frames.begin() + e.step_index() * idm_cfg.stride + 1);
      buffer = idm::decode_frames(prefix, idm_cfg);
      consecutive_failures = 0;
    }
    record.decoded = buffer;
    record.reference = strided_reference(vp, idm_cfg.stride, buffer.steps.size());
    r.plans.push_back(std::move(record));

    execute_buffer(buffer, cfg.ticks_per_waypoint);
  }

  r.termination = term;
  r.ticks = ticks;
  r.final_pose = state.pose;
  r.nav_error = goal_dist(state.pose);
  r.success = r.nav_error <= cfg.success_threshold;
  r.executed_len = path_length(r.trace);
  return r;
}

}  // namespace visnav::ctrl
