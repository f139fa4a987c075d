#include "visnav/world.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "visnav/errors.hpp"
#include "visnav/rng.hpp"

namespace visnav::sim {

using nlohmann::json;

World::World(int width, int height, double resolution, std::vector<std::uint8_t> cells,
             std::vector<Landmark> landmarks, std::uint64_t seed)
    : width_(width), height_(height), res_(resolution), cells_(std::move(cells)),
      landmarks_(std::move(landmarks)), seed_(seed) {
  if (width_ < 3 || height_ < 3) throw ValidationError("world: grid must be at least 3x3");
  if (!(res_ > 0.0)) throw ValidationError("world: resolution must be positive");
  if (cells_.size() != static_cast<std::size_t>(width_) * height_)
    throw ValidationError("world: cell count does not match dimensions");
  for (int cx = 0; cx < width_; ++cx) {
    if (!occupied(cx, 0) || !occupied(cx, height_ - 1))
      throw ValidationError("world: boundary cells must be occupied");
  }
  for (int cy = 0; cy < height_; ++cy) {
    if (!occupied(0, cy) || !occupied(width_ - 1, cy))
      throw ValidationError("world: boundary cells must be occupied");
  }
  std::set<int> ids;
  for (const auto& lm : landmarks_) {
    if (!ids.insert(lm.id).second)
      throw ValidationError("world: duplicate landmark id " + std::to_string(lm.id));
    if (occupied_at(lm.x, lm.y))
      throw ValidationError("world: landmark " + std::to_string(lm.id) + " not in free space");
  }
  std::sort(landmarks_.begin(), landmarks_.end(),
            [](const Landmark& a, const Landmark& b) { return a.id < b.id; });
}

namespace {

// All free cells must form a single 4-connected component.
bool free_space_connected(int w, int h, const std::vector<std::uint8_t>& cells) {
  std::size_t n_free = 0;
  int seed_cx = -1, seed_cy = -1;
  for (int cy = 0; cy < h; ++cy) {
    for (int cx = 0; cx < w; ++cx) {
      if (cells[static_cast<std::size_t>(cy) * w + cx] == 0) {
        ++n_free;
        if (seed_cx < 0) {
          seed_cx = cx;
          seed_cy = cy;
        }
      }
    }
  }
  if (n_free == 0) return false;
  std::vector<std::uint8_t> seen(cells.size(), 0);
  std::deque<std::pair<int, int>> frontier{{seed_cx, seed_cy}};
  seen[static_cast<std::size_t>(seed_cy) * w + seed_cx] = 1;
  std::size_t reached = 0;
  while (!frontier.empty()) {
    auto [cx, cy] = frontier.front();
    frontier.pop_front();
    ++reached;
    constexpr int dx[4] = {1, -1, 0, 0};
    constexpr int dy[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int nx = cx + dx[k];
      const int ny = cy + dy[k];
      if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
      const std::size_t idx = static_cast<std::size_t>(ny) * w + nx;
      if (cells[idx] == 0 && !seen[idx]) {
        seen[idx] = 1;
        frontier.emplace_back(nx, ny);
      }
    }
  }
  return reached == n_free;
}

}  // namespace

World World::generate(std::uint64_t seed, const WorldParams& p) {
  if (p.width_cells < 8 || p.height_cells < 8)
    throw std::invalid_argument("generate_world: grid must be at least 8x8");
  if (!(p.resolution > 0.0)) throw std::invalid_argument("generate_world: resolution must be positive");
  if (p.obstacle_density < 0.0 || p.obstacle_density > 0.4)
    throw std::invalid_argument("generate_world: obstacle_density must be in [0, 0.4]");
  if (p.n_landmarks < 8) throw std::invalid_argument("generate_world: need at least 8 landmarks");
  if (p.max_retries < 1) throw std::invalid_argument("generate_world: max_retries must be >= 1");

  Rng rng(seed);
  const int w = p.width_cells;
  const int h = p.height_cells;
  for (int attempt = 0; attempt < p.max_retries; ++attempt) {
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(w) * h, 0);
    for (int cx = 0; cx < w; ++cx) {
      cells[cx] = 1;
      cells[static_cast<std::size_t>(h - 1) * w + cx] = 1;
    }
    for (int cy = 0; cy < h; ++cy) {
      cells[static_cast<std::size_t>(cy) * w] = 1;
      cells[static_cast<std::size_t>(cy) * w + (w - 1)] = 1;
    }
    for (int cy = 1; cy < h - 1; ++cy) {
      for (int cx = 1; cx < w - 1; ++cx) {
        if (rng.bernoulli(p.obstacle_density)) cells[static_cast<std::size_t>(cy) * w + cx] = 1;
      }
    }
    if (!free_space_connected(w, h, cells)) continue;

    std::vector<std::size_t> free_cells;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i] == 0) free_cells.push_back(i);
    }
    if (free_cells.size() < static_cast<std::size_t>(p.n_landmarks)) continue;

    // Partial Fisher-Yates draw of landmark cells, then jitter inside the
    // central region of each cell so positions stay strictly in free space.
    std::vector<Landmark> landmarks;
    landmarks.reserve(p.n_landmarks);
    for (int i = 0; i < p.n_landmarks; ++i) {
      const std::size_t j = i + rng.uniform_int(free_cells.size() - i);
      std::swap(free_cells[i], free_cells[j]);
      const std::size_t idx = free_cells[i];
      const int cx = static_cast<int>(idx % w);
      const int cy = static_cast<int>(idx / w);
      const double lx = (cx + 0.3 + 0.4 * rng.uniform()) * p.resolution;
      const double ly = (cy + 0.3 + 0.4 * rng.uniform()) * p.resolution;
      landmarks.push_back(Landmark{i, lx, ly});
    }
    return World(w, h, p.resolution, std::move(cells), std::move(landmarks), seed);
  }
  throw GenerationError("generate_world: no connected layout within " +
                        std::to_string(p.max_retries) + " attempts");
}

void validate(const SensorConfig& cfg) {
  if (!(cfg.fov > 0.0) || cfg.fov > kTwoPi + 1e-12)
    throw std::invalid_argument("sensor: fov must be in (0, 2pi]");
  if (cfg.n_rays < 8) throw std::invalid_argument("sensor: n_rays must be >= 8");
  if (!(cfg.max_range > 0.0)) throw std::invalid_argument("sensor: max_range must be positive");
}

double raycast(const GridView& grid, double ox, double oy, double dx, double dy,
               double max_range) {
  const double res = grid.resolution;
  int cx = static_cast<int>(std::floor(ox / res));
  int cy = static_cast<int>(std::floor(oy / res));
  if (grid.occupied(cx, cy)) return 0.0;

  const double inf = std::numeric_limits<double>::infinity();
  int step_x = 0, step_y = 0;
  double t_max_x = inf, t_max_y = inf, t_delta_x = inf, t_delta_y = inf;
  if (dx > 0.0) {
    step_x = 1;
    t_delta_x = res / dx;
    t_max_x = ((cx + 1) * res - ox) / dx;
  } else if (dx < 0.0) {
    step_x = -1;
    t_delta_x = -res / dx;
    t_max_x = (cx * res - ox) / dx;
  }
  if (dy > 0.0) {
    step_y = 1;
    t_delta_y = res / dy;
    t_max_y = ((cy + 1) * res - oy) / dy;
  } else if (dy < 0.0) {
    step_y = -1;
    t_delta_y = -res / dy;
    t_max_y = (cy * res - oy) / dy;
  }
  if (step_x == 0 && step_y == 0) return max_range;

  while (true) {
    double t_next;
    if (t_max_x < t_max_y) {
      t_next = t_max_x;
      if (t_next >= max_range) return max_range;
      cx += step_x;
      t_max_x += t_delta_x;
    } else if (t_max_y < t_max_x) {
      t_next = t_max_y;
      if (t_next >= max_range) return max_range;
      cy += step_y;
      t_max_y += t_delta_y;
    } else {
      // Exact corner crossing: conservatively treat the two cells sharing the
      // corner as touched by the ray.
      t_next = t_max_x;
      if (t_next >= max_range) return max_range;
      if (grid.occupied(cx + step_x, cy) || grid.occupied(cx, cy + step_y)) return t_next;
      cx += step_x;
      cy += step_y;
      t_max_x += t_delta_x;
      t_max_y += t_delta_y;
    }
    if (grid.occupied(cx, cy)) return t_next;
  }
}

bool segment_clear(const GridView& grid, double x0, double y0, double x1, double y1) {
  const double dx = x1 - x0;
  const double dy = y1 - y0;
  const double len = std::hypot(dx, dy);
  if (len == 0.0) return !grid.occupied(static_cast<int>(std::floor(x0 / grid.resolution)),
                                        static_cast<int>(std::floor(y0 / grid.resolution)));
  return raycast(grid, x0, y0, dx / len, dy / len, len) >= len;
}

AgentState step(const AgentState& state, const Command& cmd, double dt, const World& world) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("step: dt must be positive");
  if (!std::isfinite(cmd.v) || std::abs(cmd.v) > kMaxLinearSpeed)
    throw std::invalid_argument("step: |v| exceeds the hard cap");
  if (!std::isfinite(cmd.omega) || std::abs(cmd.omega) > kMaxAngularSpeed)
    throw std::invalid_argument("step: |omega| exceeds the hard cap");

  AgentState out{state.pose, false, state.time + dt};
  const double h = dt / kCollisionSubsteps;
  for (int i = 0; i < kCollisionSubsteps; ++i) {
    const double nx = out.pose.x + cmd.v * std::cos(out.pose.theta) * h;
    const double ny = out.pose.y + cmd.v * std::sin(out.pose.theta) * h;
    const double nth = out.pose.theta + cmd.omega * h;
    if (world.occupied_at(nx, ny)) {
      out.collided = true;
      break;
    }
    out.pose = Pose(nx, ny, nth);
  }
  return out;
}

Frame render_frame(const World& world, const Pose& pose, const SensorConfig& cfg,
                   int frame_index) {
  validate(cfg);
  if (world.occupied_at(pose.x, pose.y))
    throw std::invalid_argument("render_frame: pose in occupied space");

  Frame frame;
  frame.frame_index = frame_index;
  frame.scan.reserve(cfg.n_rays);
  const GridView grid = world.grid();
  for (int k = 0; k < cfg.n_rays; ++k) {
    const double bearing = -cfg.fov / 2.0 + cfg.fov * k / (cfg.n_rays - 1);
    const double a = pose.theta + bearing;
    frame.scan.push_back(raycast(grid, pose.x, pose.y, std::cos(a), std::sin(a), cfg.max_range));
  }

  for (const auto& lm : world.landmarks()) {
    const double ex = lm.x - pose.x;
    const double ey = lm.y - pose.y;
    const double range = std::hypot(ex, ey);
    if (range <= 0.0 || range > cfg.max_range) continue;
    const double bearing = wrap(std::atan2(ey, ex) - pose.theta);
    if (std::abs(bearing) > cfg.fov / 2.0) continue;
    if (cfg.landmark_visibility) {
      const double hit = raycast(grid, pose.x, pose.y, ex / range, ey / range, range);
      if (hit < range) continue;  // wall between agent and landmark
    }
    frame.observations.push_back(Observation{lm.id, range, bearing});
  }
  // landmarks() is id-sorted, so observations are too
  return frame;
}

std::optional<double> shortest_path_length(const World& world, double sx, double sy,
                                           double gx, double gy) {
  if (!world.in_free_space(sx, sy))
    throw std::invalid_argument("shortest_path_length: start in occupied space");
  if (!world.in_free_space(gx, gy))
    throw std::invalid_argument("shortest_path_length: goal in occupied space");

  const int scx = world.cell_x(sx), scy = world.cell_y(sy);
  const int gcx = world.cell_x(gx), gcy = world.cell_y(gy);
  if (scx == gcx && scy == gcy) return std::hypot(gx - sx, gy - sy);

  const int w = world.width();
  const int h = world.height();
  const double res = world.resolution();
  const double diag = res * std::sqrt(2.0);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(w) * h, inf);

  using Entry = std::pair<double, int>;  // (cost, cell index)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  // Seed the containing cell and its free neighbours from the exact start
  // point; stitch to the goal point the same way on the other end.
  auto stitchable = [&](int bx, int by, int cx, int cy) {
    // endpoint cell plus neighbours reachable without crossing a corner
    if (world.occupied(cx, cy)) return false;
    const int ox = cx - bx;
    const int oy = cy - by;
    if (ox != 0 && oy != 0 && (world.occupied(bx + ox, by) || world.occupied(bx, by + oy)))
      return false;
    return true;
  };
  for (int oy = -1; oy <= 1; ++oy) {
    for (int ox = -1; ox <= 1; ++ox) {
      const int cx = scx + ox;
      const int cy = scy + oy;
      if (!stitchable(scx, scy, cx, cy)) continue;
      const double d = std::hypot(world.center_x(cx) - sx, world.center_y(cy) - sy);
      const std::size_t idx = static_cast<std::size_t>(cy) * w + cx;
      if (d < dist[idx]) {
        dist[idx] = d;
        open.emplace(d, static_cast<int>(idx));
      }
    }
  }

  while (!open.empty()) {
    const auto [d, idx] = open.top();
    open.pop();
    if (d > dist[idx]) continue;
    const int cx = idx % w;
    const int cy = idx / w;
    for (int oy = -1; oy <= 1; ++oy) {
      for (int ox = -1; ox <= 1; ++ox) {
        if (ox == 0 && oy == 0) continue;
        const int nx = cx + ox;
        const int ny = cy + oy;
        if (world.occupied(nx, ny)) continue;
        // no corner cutting: a diagonal move needs both side cells free
        if (ox != 0 && oy != 0 && (world.occupied(cx + ox, cy) || world.occupied(cx, cy + oy)))
          continue;
        const double nd = d + ((ox != 0 && oy != 0) ? diag : res);
        const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
        if (nd < dist[nidx]) {
          dist[nidx] = nd;
          open.emplace(nd, static_cast<int>(nidx));
        }
      }
    }
  }

  double best = inf;
  for (int oy = -1; oy <= 1; ++oy) {
    for (int ox = -1; ox <= 1; ++ox) {
      const int cx = gcx + ox;
      const int cy = gcy + oy;
      if (!stitchable(gcx, gcy, cx, cy)) continue;
      const std::size_t idx = static_cast<std::size_t>(cy) * w + cx;
      if (dist[idx] == inf) continue;
      best = std::min(best, dist[idx] + std::hypot(gx - world.center_x(cx), gy - world.center_y(cy)));
    }
  }
  if (best == inf) return std::nullopt;
  return best;
}

std::string World::to_json_string() const {
  json j;
  j["version"] = 1;
  j["type"] = "world";
  j["seed"] = seed_;
  j["width"] = width_;
  j["height"] = height_;
  j["resolution"] = res_;
  // Run lengths alternating free/occupied, first run counting free cells.
  json rle = json::array();
  std::uint8_t current = 0;
  std::size_t run = 0;
  for (const std::uint8_t c : cells_) {
    const std::uint8_t v = c ? 1 : 0;
    if (v == current) {
      ++run;
    } else {
      rle.push_back(run);
      current = v;
      run = 1;
    }
  }
  rle.push_back(run);
  j["grid_rle"] = std::move(rle);
  json lms = json::array();
  for (const auto& lm : landmarks_) lms.push_back({{"id", lm.id}, {"x", lm.x}, {"y", lm.y}});
  j["landmarks"] = std::move(lms);
  return j.dump();
}

World World::from_json_string(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("world: not valid JSON");
  try {
    if (j.at("version").get<int>() != 1) throw ValidationError("world: unsupported version");
    const int w = j.at("width").get<int>();
    const int h = j.at("height").get<int>();
    const double res = j.at("resolution").get<double>();
    const auto seed = j.at("seed").get<std::uint64_t>();
    std::vector<std::uint8_t> cells;
    cells.reserve(static_cast<std::size_t>(w) * h);
    std::uint8_t v = 0;
    for (const auto& run : j.at("grid_rle")) {
      const auto n = run.get<std::size_t>();
      cells.insert(cells.end(), n, v);
      v = v ? 0 : 1;
    }
    if (cells.size() != static_cast<std::size_t>(w) * h)
      throw ValidationError("world: grid_rle does not cover the grid");
    std::vector<Landmark> lms;
    for (const auto& e : j.at("landmarks"))
      lms.push_back(Landmark{e.at("id").get<int>(), e.at("x").get<double>(), e.at("y").get<double>()});
    return World(w, h, res, std::move(cells), std::move(lms), seed);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("world: ") + e.what());
  }
}

void World::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("world: cannot open for writing: " + path);
  out << to_json_string() << "\n";
  if (!out) throw Error("world: write failed: " + path);
}

World World::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("world: cannot open: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_string(ss.str());
}

}  // namespace visnav::sim
