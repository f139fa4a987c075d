#include "visnav/imaginer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>

#include "visnav/controller.hpp"
#include "visnav/errors.hpp"
#include "visnav/rng.hpp"

namespace visnav::imagine {

const char* label(Primitive p) {
  switch (p) {
    case Primitive::Forward: return "forward";
    case Primitive::TurnLeft: return "turn_left";
    case Primitive::TurnRight: return "turn_right";
  }
  return "?";
}

const char* label(ExpertId id) {
  switch (id) {
    case ExpertId::Left: return "left";
    case ExpertId::Right: return "right";
    case ExpertId::Single: return "single";
  }
  return "?";
}

void validate(const ErrorModel& em) {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(em.flip_prob) || !prob(em.hallucination_prob) || !prob(em.truncation_prob))
    throw std::invalid_argument("error_model: probabilities must lie in [0, 1]");
  if (em.drift_sigma_t < 0.0 || em.drift_sigma_r < 0.0)
    throw std::invalid_argument("error_model: sigmas must be non-negative");
}

Subgoal decompose(const std::string& /*instruction*/, const sim::Frame& /*frame*/,
                  const Pose& pose, double goal_x, double goal_y) {
  if (!std::isfinite(goal_x) || !std::isfinite(goal_y))
    throw std::invalid_argument("decompose: non-finite goal");
  const double beta = wrap(std::atan2(goal_y - pose.y, goal_x - pose.x) - pose.theta);
  Subgoal sg;
  sg.target_hint = {{goal_x, goal_y}};
  if (beta > kForwardConeHalfAngle) {
    sg.primitive = Primitive::TurnLeft;
    sg.text = "pan left toward the goal, then dolly forward";
  } else if (beta < -kForwardConeHalfAngle) {
    sg.primitive = Primitive::TurnRight;
    sg.text = "pan right toward the goal, then dolly forward";
  } else {
    sg.primitive = Primitive::Forward;
    sg.text = "dolly forward toward the goal";
  }
  return sg;
}

ExpertId route(const Subgoal& subgoal, RouterMode mode) {
  if (mode == RouterMode::SingleExpert) return ExpertId::Single;
  switch (subgoal.primitive) {
    case Primitive::TurnLeft: return ExpertId::Left;
    case Primitive::TurnRight: return ExpertId::Right;
    case Primitive::Forward: return ExpertId::Left;  // both experts handle forward motion
  }
  return ExpertId::Left;
}

namespace {

constexpr double kCaptureRadius = 0.3;  // carrot advance distance, meters
constexpr double kArrivalRadius = 0.05;
// Align before translating; driving while badly misaligned arcs the rollout
// away from the taut line and into wall corners.
constexpr double kAlignGate = 0.2;  // radians

struct PlanGrid {
  int width = 0;
  int height = 0;
  double resolution = 1.0;
  std::vector<std::uint8_t> cells;

  sim::GridView view() const { return sim::GridView{width, height, resolution, cells.data()}; }
  bool occupied(int cx, int cy) const { return view().occupied(cx, cy); }
  std::size_t index(int cx, int cy) const { return static_cast<std::size_t>(cy) * width + cx; }
};

// One-cell 8-neighbourhood dilation so taut paths keep clearance from true
// obstacles; the start and target cells are forced free afterwards.
PlanGrid inflate(const sim::World& world, int scx, int scy, int tcx, int tcy) {
  PlanGrid g;
  g.width = world.width();
  g.height = world.height();
  g.resolution = world.resolution();
  g.cells.assign(static_cast<std::size_t>(g.width) * g.height, 0);
  for (int cy = 0; cy < g.height; ++cy) {
    for (int cx = 0; cx < g.width; ++cx) {
      if (!world.occupied(cx, cy)) continue;
      for (int oy = -1; oy <= 1; ++oy) {
        for (int ox = -1; ox <= 1; ++ox) {
          const int nx = cx + ox;
          const int ny = cy + oy;
          if (nx >= 0 && nx < g.width && ny >= 0 && ny < g.height) g.cells[g.index(nx, ny)] = 1;
        }
      }
    }
  }
  if (!world.occupied(scx, scy)) g.cells[g.index(scx, scy)] = 0;
  if (!world.occupied(tcx, tcy)) g.cells[g.index(tcx, tcy)] = 0;
  return g;
}

// A* over the inflated grid. Ties break on (f, h, squared cross product with
// the start-target line, cell index); the geometric key keeps the expansion
// order stable under left/right mirroring of the whole problem.
std::optional<std::vector<std::pair<int, int>>> astar(const PlanGrid& g, int scx, int scy,
                                                      int tcx, int tcy, double sx, double sy,
                                                      double tx, double ty) {
  if (g.occupied(scx, scy) || g.occupied(tcx, tcy)) return std::nullopt;
  const double res = g.resolution;
  const double diag = res * std::sqrt(2.0);
  const std::size_t n = g.cells.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> gscore(n, inf);
  std::vector<int> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);

  auto heuristic = [&](int cx, int cy) {
    const double ax = std::abs(static_cast<double>(cx - tcx));
    const double ay = std::abs(static_cast<double>(cy - tcy));
    const double lo = std::min(ax, ay);
    return diag * lo + res * (std::max(ax, ay) - lo);
  };
  auto line_key = [&](int cx, int cy) {
    const double px = (cx + 0.5) * res - sx;
    const double py = (cy + 0.5) * res - sy;
    const double cross = px * (ty - sy) - py * (tx - sx);
    return cross * cross;
  };

  struct Entry {
    double f, h, line;
    int idx;
    bool operator>(const Entry& o) const {
      if (f != o.f) return f > o.f;
      if (h != o.h) return h > o.h;
      if (line != o.line) return line > o.line;
      return idx > o.idx;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  const std::size_t start = g.index(scx, scy);
  gscore[start] = 0.0;
  open.push({heuristic(scx, scy), heuristic(scx, scy), line_key(scx, scy), static_cast<int>(start)});

  const std::size_t target = g.index(tcx, tcy);
  while (!open.empty()) {
    const Entry e = open.top();
    open.pop();
    const std::size_t idx = static_cast<std::size_t>(e.idx);
    if (closed[idx]) continue;
    closed[idx] = 1;
    if (idx == target) break;
    const int cx = e.idx % g.width;
    const int cy = e.idx / g.width;
    for (int oy = -1; oy <= 1; ++oy) {
      for (int ox = -1; ox <= 1; ++ox) {
        if (ox == 0 && oy == 0) continue;
        const int nx = cx + ox;
        const int ny = cy + oy;
        if (g.occupied(nx, ny)) continue;
        // no corner cutting: diagonal moves need both side cells free
        if (ox != 0 && oy != 0 && (g.occupied(cx + ox, cy) || g.occupied(cx, cy + oy))) continue;
        const std::size_t nidx = g.index(nx, ny);
        if (closed[nidx]) continue;
        const double ng = gscore[idx] + ((ox != 0 && oy != 0) ? diag : res);
        if (ng < gscore[nidx]) {
          gscore[nidx] = ng;
          parent[nidx] = e.idx;
          const double h = heuristic(nx, ny);
          open.push({ng + h, h, line_key(nx, ny), static_cast<int>(nidx)});
        }
      }
    }
  }
  if (gscore[target] == inf) return std::nullopt;

  std::vector<std::pair<int, int>> path;
  for (int idx = static_cast<int>(target); idx >= 0; idx = parent[idx])
    path.emplace_back(idx % g.width, idx / g.width);
  std::reverse(path.begin(), path.end());
  return path;
}

// Greedy line-of-sight shortcutting over the cell path; endpoints are the
// exact continuous start and target points.
std::vector<std::array<double, 2>> string_pull(const PlanGrid& g,
                                               const std::vector<std::pair<int, int>>& path,
                                               double sx, double sy, double tx, double ty) {
  std::vector<std::array<double, 2>> pts;
  pts.push_back({sx, sy});
  for (std::size_t i = 1; i + 1 < path.size(); ++i)
    pts.push_back({(path[i].first + 0.5) * g.resolution, (path[i].second + 0.5) * g.resolution});
  pts.push_back({tx, ty});

  const sim::GridView view = g.view();
  std::vector<std::array<double, 2>> pulled;
  pulled.push_back(pts.front());
  std::size_t i = 0;
  while (i + 1 < pts.size()) {
    std::size_t j = pts.size() - 1;
    while (j > i + 1 && !sim::segment_clear(view, pts[i][0], pts[i][1], pts[j][0], pts[j][1]))
      --j;
    pulled.push_back(pts[j]);
    i = j;
  }
  return pulled;
}

// Virtual unicycle chasing the polyline carrot with the default proportional
// tracker at the frame rate; produces the ideal imagined pose sequence.
// Translation into occupied cells is cancelled frame by frame (rotation still
// applies), matching how the simulated agent behaves at contact.
std::vector<Pose> roll_out(const std::vector<std::array<double, 2>>& polyline, const Pose& start,
                           int horizon, const sim::World& world) {
  const double dt = 1.0 / kFrameRateHz;
  const ctrl::ControllerGains gains{};
  std::vector<Pose> poses;
  poses.reserve(horizon + 1);
  poses.push_back(start);
  std::size_t target_i = polyline.size() > 1 ? 1 : 0;
  Pose p = start;
  for (int k = 0; k < horizon; ++k) {
    while (target_i + 1 < polyline.size() &&
           std::hypot(polyline[target_i][0] - p.x, polyline[target_i][1] - p.y) < kCaptureRadius)
      ++target_i;
    const double ex = polyline[target_i][0] - p.x;
    const double ey = polyline[target_i][1] - p.y;
    const double d = std::hypot(ex, ey);
    sim::Command cmd{0.0, 0.0};
    if (target_i + 1 < polyline.size() || d > kArrivalRadius) {
      const double c = std::cos(p.theta);
      const double s = std::sin(p.theta);
      const double bx = c * ex + s * ey;
      const double by = -s * ex + c * ey;
      const double bearing = std::atan2(by, bx);
      if (std::abs(bearing) > kAlignGate)
        cmd = ctrl::track(RelativePose(0.0, 0.0, bearing), gains);
      else
        cmd = ctrl::track(RelativePose(bx, by, bearing), gains);
    }
    double nx = p.x + cmd.v * std::cos(p.theta) * dt;
    double ny = p.y + cmd.v * std::sin(p.theta) * dt;
    if (!world.in_free_space(nx, ny)) {
      nx = p.x;
      ny = p.y;
    }
    p = Pose(nx, ny, p.theta + cmd.omega * dt);
    poses.push_back(p);
  }
  return poses;
}

std::vector<Pose> rotation_plan(const Pose& start, double tx, double ty, int horizon) {
  const double beta = wrap(std::atan2(ty - start.y, tx - start.x) - start.theta);
  std::vector<Pose> poses;
  poses.reserve(horizon + 1);
  for (int k = 0; k <= horizon; ++k)
    poses.push_back(Pose(start.x, start.y, start.theta + beta * k / horizon));
  return poses;
}

// Removes one 4-connected cluster of interior occupied cells, picked by the
// rng; returns false when the world has no interior obstacles.
bool remove_random_cluster(const sim::World& world, Rng& rng, sim::World* out) {
  const int w = world.width();
  const int h = world.height();
  std::vector<int> cluster_of(static_cast<std::size_t>(w) * h, -1);
  int n_clusters = 0;
  for (int cy = 1; cy < h - 1; ++cy) {
    for (int cx = 1; cx < w - 1; ++cx) {
      const std::size_t idx = static_cast<std::size_t>(cy) * w + cx;
      if (!world.occupied(cx, cy) || cluster_of[idx] >= 0) continue;
      const int id = n_clusters++;
      std::deque<std::pair<int, int>> frontier{{cx, cy}};
      cluster_of[idx] = id;
      while (!frontier.empty()) {
        auto [ux, uy] = frontier.front();
        frontier.pop_front();
        constexpr int dx[4] = {1, -1, 0, 0};
        constexpr int dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = ux + dx[k];
          const int ny = uy + dy[k];
          if (nx < 1 || nx >= w - 1 || ny < 1 || ny >= h - 1) continue;
          const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
          if (world.occupied(nx, ny) && cluster_of[nidx] < 0) {
            cluster_of[nidx] = id;
            frontier.emplace_back(nx, ny);
          }
        }
      }
    }
  }
  if (n_clusters == 0) return false;
  const int victim = static_cast<int>(rng.uniform_int(n_clusters));
  std::vector<std::uint8_t> cells = world.cells();
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (cluster_of[i] == victim) cells[i] = 0;
  *out = sim::World(w, h, world.resolution(), std::move(cells),
                    world.landmarks(), world.seed());
  return true;
}

}  // namespace

VisualPlan imagine(const sim::World& world, const sim::Frame& current, const Pose& pose,
                   const Subgoal& subgoal, const ExpertConfig& expert,
                   const sim::SensorConfig& sensor, int horizon_frames, std::uint64_t rng_seed) {
  if (horizon_frames < 1) throw std::invalid_argument("imagine: horizon_frames must be >= 1");
  if (!world.in_free_space(pose.x, pose.y))
    throw std::invalid_argument("imagine: pose in occupied space");
  validate(expert.error_model);
  sim::validate(sensor);

  Rng rng(rng_seed);
  const ErrorModel& em = expert.error_model;
  // Fixed draw order keeps plans comparable across error-model sweeps.
  const bool want_flip = rng.bernoulli(em.flip_prob);
  const bool want_hallucination = rng.bernoulli(em.hallucination_prob);
  const bool want_truncation = rng.bernoulli(em.truncation_prob);

  const sim::World* active = &world;
  sim::World modified;
  bool hallucinated = false;
  if (want_hallucination && remove_random_cluster(world, rng, &modified)) {
    active = &modified;
    hallucinated = true;
  }

  // Target point: the hint, or a fixed-distance probe along the primitive
  // direction snapped to the nearest free cell center.
  double tx, ty;
  if (subgoal.target_hint) {
    tx = (*subgoal.target_hint)[0];
    ty = (*subgoal.target_hint)[1];
  } else {
    double dir = pose.theta;
    if (subgoal.primitive == Primitive::TurnLeft) dir = wrap(pose.theta + kPi / 2.0);
    if (subgoal.primitive == Primitive::TurnRight) dir = wrap(pose.theta - kPi / 2.0);
    tx = pose.x + kDefaultTargetDistance * std::cos(dir);
    ty = pose.y + kDefaultTargetDistance * std::sin(dir);
  }

  VisualPlan plan;
  plan.horizon_frames = horizon_frames;
  plan.flipped = want_flip;
  plan.hallucinated = hallucinated;

  std::vector<Pose> ideal;
  const int scx = active->cell_x(pose.x), scy = active->cell_y(pose.y);
  int tcx = active->cell_x(tx), tcy = active->cell_y(ty);
  if (active->occupied(tcx, tcy)) {
    // Probe targets may land inside obstacles; retarget the nearest free cell.
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int cy = 1; cy < active->height() - 1; ++cy) {
      for (int cx = 1; cx < active->width() - 1; ++cx) {
        if (active->occupied(cx, cy)) continue;
        const double d = std::hypot(active->center_x(cx) - tx, active->center_y(cy) - ty);
        if (d < best_d) {
          best_d = d;
          best = cy * active->width() + cx;
        }
      }
    }
    if (best >= 0) {
      tcx = best % active->width();
      tcy = best / active->width();
      tx = active->center_x(tcx);
      ty = active->center_y(tcy);
    }
  }

  // Prefer the inflated grid for clearance; desk-scale worlds can fragment
  // under dilation, so fall back to the raw grid before giving up.
  const PlanGrid inflated = inflate(*active, scx, scy, tcx, tcy);
  auto cell_path = astar(inflated, scx, scy, tcx, tcy, pose.x, pose.y, tx, ty);
  const PlanGrid* grid = &inflated;
  PlanGrid raw;
  if (!cell_path) {
    raw.width = active->width();
    raw.height = active->height();
    raw.resolution = active->resolution();
    raw.cells = active->cells();
    cell_path = astar(raw, scx, scy, tcx, tcy, pose.x, pose.y, tx, ty);
    grid = &raw;
  }
  if (cell_path) {
    const auto polyline = string_pull(*grid, *cell_path, pose.x, pose.y, tx, ty);
    ideal = roll_out(polyline, pose, horizon_frames, *active);
  } else {
    plan.fallback_rotation = true;
    ideal = rotation_plan(pose, tx, ty, horizon_frames);
  }
  plan.reference_poses = ideal;

  // Error injection on the relative steps, then re-accumulation; imagined
  // motion stops at the first in-collision pose and holds there.
  std::vector<RelativePose> steps;
  steps.reserve(horizon_frames);
  for (int k = 1; k <= horizon_frames; ++k) steps.push_back(relative(ideal[k - 1], ideal[k]));
  if (want_flip) {
    for (auto& s : steps) s = RelativePose(s.dx, -s.dy, wrap(-s.dtheta));
  }
  for (auto& s : steps) {
    const double gx = rng.gaussian();
    const double gy = rng.gaussian();
    const double gr = rng.gaussian();
    if (em.drift_sigma_t > 0.0 || em.drift_sigma_r > 0.0)
      s = RelativePose(s.dx + em.drift_sigma_t * gx, s.dy + em.drift_sigma_t * gy,
                       s.dtheta + em.drift_sigma_r * gr);
  }
  if (want_truncation && horizon_frames >= 2) {
    steps.resize(1 + rng.uniform_int(static_cast<std::uint64_t>(horizon_frames - 1)));
    plan.truncated = true;
  }

  plan.planned_poses.reserve(horizon_frames + 1);
  plan.planned_poses.push_back(pose);
  for (const auto& s : steps) {
    const Pose next = compose(plan.planned_poses.back(), s);
    if (!active->in_free_space(next.x, next.y)) {
      plan.truncated = true;
      break;
    }
    plan.planned_poses.push_back(next);
  }
  while (plan.planned_poses.size() < static_cast<std::size_t>(horizon_frames) + 1)
    plan.planned_poses.push_back(plan.planned_poses.back());

  plan.frames.reserve(horizon_frames + 1);
  plan.frames.push_back(current);
  for (int k = 1; k <= horizon_frames; ++k)
    plan.frames.push_back(
        sim::render_frame(*active, plan.planned_poses[k], sensor, current.frame_index + k));
  return plan;
}

}  // namespace visnav::imagine
