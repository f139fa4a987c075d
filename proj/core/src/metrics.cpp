#include "visnav/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace visnav::metrics {

const char* label(Action a) {
  switch (a) {
    case Action::F: return "F";
    case Action::TL: return "TL";
    case Action::TR: return "TR";
    case Action::S: return "S";
  }
  return "?";
}

double navigation_error(const Pose& final_pose, double goal_x, double goal_y) {
  if (!std::isfinite(final_pose.x) || !std::isfinite(final_pose.y) || !std::isfinite(goal_x) ||
      !std::isfinite(goal_y))
    throw std::invalid_argument("navigation_error: non-finite input");
  return std::hypot(final_pose.x - goal_x, final_pose.y - goal_y);
}

bool oracle_success(const Trajectory& trace, double goal_x, double goal_y, double threshold) {
  if (trace.poses.empty()) throw std::invalid_argument("oracle_success: empty trace");
  for (const auto& p : trace.poses)
    if (std::hypot(p.x - goal_x, p.y - goal_y) <= threshold) return true;
  return false;
}

double spl(const std::vector<ctrl::EpisodeResult>& results) {
  if (results.empty()) throw std::invalid_argument("spl: empty result list");
  double sum = 0.0;
  for (const auto& r : results) {
    if (!(r.shortest_path_len > 0.0))
      throw std::invalid_argument("spl: shortest_path_len must be positive");
    if (r.success) sum += r.shortest_path_len / std::max(r.executed_len, r.shortest_path_len);
  }
  return sum / static_cast<double>(results.size());
}

Aggregate aggregate(const std::vector<ctrl::EpisodeResult>& results) {
  if (results.empty()) throw std::invalid_argument("aggregate: empty result list");
  Aggregate agg;
  agg.n = results.size();
  double tl = 0.0, ne = 0.0;
  std::size_t os_hits = 0, sr_hits = 0;
  for (const auto& r : results) {
    tl += r.executed_len;
    ne += r.nav_error;
    if (r.success) ++sr_hits;
    if (oracle_success(r.trace, r.goal_x, r.goal_y, r.success_threshold)) ++os_hits;
  }
  const double n = static_cast<double>(results.size());
  agg.tl = tl / n;
  agg.ne = ne / n;
  agg.os = static_cast<double>(os_hits) / n;
  agg.sr = static_cast<double>(sr_hits) / n;
  agg.spl = spl(results);
  return agg;
}

RpeResult rpe(const Trajectory& reference, const Trajectory& generated) {
  if (reference.poses.size() != generated.poses.size())
    throw std::invalid_argument("rpe: trajectory lengths differ");
  if (reference.poses.empty()) throw std::invalid_argument("rpe: empty trajectories");
  double sum_t = 0.0, sum_r = 0.0;
  const std::size_t n = reference.poses.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = reference.poses[i];
    const auto& b = generated.poses[i];
    sum_t += std::hypot(a.x - b.x, a.y - b.y);
    sum_r += std::abs(wrap(a.theta - b.theta));
  }
  return RpeResult{sum_t / static_cast<double>(n), sum_r / static_cast<double>(n)};
}

ActionSequence discretize_actions(const WaypointTrajectory& steps,
                                  const DiscretizationThresholds& th) {
  if (steps.steps.empty()) throw std::invalid_argument("discretize_actions: empty steps");
  if (!(th.trans_min > 0.0) || !(th.yaw_min > 0.0))
    throw std::invalid_argument("discretize_actions: thresholds must be positive");
  ActionSequence out;
  out.reserve(steps.steps.size());
  for (const auto& s : steps.steps) {
    if (std::abs(s.dtheta) >= th.yaw_min) {
      out.push_back(s.dtheta > 0.0 ? Action::TL : Action::TR);
    } else if (std::hypot(s.dx, s.dy) >= th.trans_min) {
      out.push_back(Action::F);
    } else {
      out.push_back(Action::S);
    }
  }
  return out;
}

std::size_t levenshtein(const ActionSequence& a, const ActionSequence& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double motion_fidelity(const ActionSequence& reference, const ActionSequence& generated) {
  if (reference.empty() && generated.empty())
    throw std::invalid_argument("motion_fidelity: both sequences empty");
  const double denom = static_cast<double>(std::max(reference.size(), generated.size()));
  return 1.0 - static_cast<double>(levenshtein(reference, generated)) / denom;
}

KinematicStats kinematics(const ctrl::EpisodeResult& result, const DiscretizationThresholds& th) {
  KinematicStats stats;
  double sum_t = 0.0, sum_r = 0.0;
  std::size_t n_poses = 0;
  ActionSequence ref_actions, gen_actions;
  for (const auto& plan : result.plans) {
    if (plan.decode_failed || plan.reference.steps.empty()) continue;
    if (plan.reference.steps.size() != plan.decoded.steps.size()) continue;
    const Trajectory t_ref = accumulate(Pose(), plan.reference);
    const Trajectory t_gen = accumulate(Pose(), plan.decoded);
    for (std::size_t i = 0; i < t_ref.poses.size(); ++i) {
      sum_t += std::hypot(t_ref.poses[i].x - t_gen.poses[i].x, t_ref.poses[i].y - t_gen.poses[i].y);
      sum_r += std::abs(wrap(t_ref.poses[i].theta - t_gen.poses[i].theta));
    }
    n_poses += t_ref.poses.size();
    const auto ra = discretize_actions(plan.reference, th);
    const auto ga = discretize_actions(plan.decoded, th);
    ref_actions.insert(ref_actions.end(), ra.begin(), ra.end());
    gen_actions.insert(gen_actions.end(), ga.begin(), ga.end());
  }
  if (n_poses == 0 || ref_actions.empty()) return stats;
  stats.rpe_t = sum_t / static_cast<double>(n_poses);
  stats.rpe_r = sum_r / static_cast<double>(n_poses);
  stats.motion_fidelity = motion_fidelity(ref_actions, gen_actions);
  stats.available = true;
  return stats;
}

}  // namespace visnav::metrics
