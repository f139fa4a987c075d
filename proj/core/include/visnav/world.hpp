#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "visnav/geometry.hpp"

namespace visnav::sim {

struct Landmark {
  int id = 0;
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Landmark&) const = default;
};

struct WorldParams {
  int width_cells = 40;
  int height_cells = 40;
  double resolution = 0.5;         // meters per cell
  double obstacle_density = 0.10;  // interior occupancy probability, in [0, 0.4]
  int n_landmarks = 96;            // >= 8
  int max_retries = 64;            // regeneration attempts for connectivity
};

// Non-owning occupancy view shared by the ray casting and planning code.
struct GridView {
  int width = 0;
  int height = 0;
  double resolution = 1.0;
  const std::uint8_t* cells = nullptr;  // row-major, nonzero = occupied

  bool in_bounds(int cx, int cy) const { return cx >= 0 && cx < width && cy >= 0 && cy < height; }
  // Out-of-bounds counts as occupied.
  bool occupied(int cx, int cy) const {
    return !in_bounds(cx, cy) || cells[static_cast<std::size_t>(cy) * width + cx] != 0;
  }
};

// Deterministic walled occupancy world with point landmarks. Immutable after
// construction and safe to share across concurrent episode executors.
class World {
 public:
  World() = default;
  // Validates the invariants: walled boundary, landmarks strictly inside free
  // space, unique landmark ids. Throws ValidationError on violation.
  World(int width, int height, double resolution, std::vector<std::uint8_t> cells,
        std::vector<Landmark> landmarks, std::uint64_t seed);

  static World generate(std::uint64_t seed, const WorldParams& params);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return res_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Landmark>& landmarks() const { return landmarks_; }
  const std::vector<std::uint8_t>& cells() const { return cells_; }
  GridView grid() const { return GridView{width_, height_, res_, cells_.data()}; }

  double width_m() const { return width_ * res_; }
  double height_m() const { return height_ * res_; }

  bool in_bounds(int cx, int cy) const { return cx >= 0 && cx < width_ && cy >= 0 && cy < height_; }
  bool occupied(int cx, int cy) const {
    return !in_bounds(cx, cy) || cells_[static_cast<std::size_t>(cy) * width_ + cx] != 0;
  }
  int cell_x(double x) const { return static_cast<int>(std::floor(x / res_)); }
  int cell_y(double y) const { return static_cast<int>(std::floor(y / res_)); }
  double center_x(int cx) const { return (cx + 0.5) * res_; }
  double center_y(int cy) const { return (cy + 0.5) * res_; }
  bool occupied_at(double x, double y) const { return occupied(cell_x(x), cell_y(y)); }
  bool in_free_space(double x, double y) const { return !occupied_at(x, y); }

  // Versioned JSON document with run-length encoded grid.
  std::string to_json_string() const;
  static World from_json_string(const std::string& text);
  void save(const std::string& path) const;
  static World load(const std::string& path);

  bool operator==(const World&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  double res_ = 1.0;
  std::vector<std::uint8_t> cells_;
  std::vector<Landmark> landmarks_;
  std::uint64_t seed_ = 0;
};

struct SensorConfig {
  double fov = kTwoPi;      // radians, (0, 2pi]
  double max_range = 10.0;  // meters
  int n_rays = 64;          // >= 8
  bool landmark_visibility = true;  // occlude landmarks behind occupied cells
};

// Throws std::invalid_argument when the config violates its invariants.
void validate(const SensorConfig& cfg);

struct Observation {
  int id = 0;
  double range = 0.0;    // (0, max_range]
  double bearing = 0.0;  // body frame, (-pi, pi], within +-fov/2

  bool operator==(const Observation&) const = default;
};

// Egocentric observation: landmark range/bearing set plus a range scan.
struct Frame {
  std::vector<Observation> observations;  // sorted by id, at most one per id
  std::vector<double> scan;               // n_rays ranges, max_range when no hit
  int frame_index = 0;

  bool operator==(const Frame&) const = default;
};

struct Episode {
  const World* world = nullptr;
  Pose start;
  double goal_x = 0.0;
  double goal_y = 0.0;
  std::string instruction;
  double shortest_path_len = 0.0;  // > 0 and finite (goal reachable)
};

struct AgentState {
  Pose pose;
  bool collided = false;  // outcome flag of the most recent step
  double time = 0.0;
};

struct Command {
  double v = 0.0;      // m/s
  double omega = 0.0;  // rad/s
};

// Hard caps on commanded velocities; step() rejects commands beyond these.
inline constexpr double kMaxLinearSpeed = 5.0;
inline constexpr double kMaxAngularSpeed = 5.0;
inline constexpr int kCollisionSubsteps = 10;

inline World generate_world(std::uint64_t seed, const WorldParams& params) {
  return World::generate(seed, params);
}

// 8-connected grid distance (straight = resolution, diagonal = sqrt(2) *
// resolution) between the containing cells, stitched to the continuous
// endpoints through the cells around them. nullopt when unreachable.
// Preconditions: both points in free space.
std::optional<double> shortest_path_length(const World& world, double sx, double sy,
                                           double gx, double gy);

// Forward-Euler unicycle integration over 10 collision sub-steps; on contact
// the agent stops at the last free sub-step with collided set.
AgentState step(const AgentState& state, const Command& cmd, double dt, const World& world);

// Ray casting over the field of view plus landmark range/bearing extraction.
// Throws std::invalid_argument when pose is in occupied space.
Frame render_frame(const World& world, const Pose& pose, const SensorConfig& cfg,
                   int frame_index);

// First-hit distance from (ox, oy) along direction (dx, dy) (not necessarily
// normalized; distances are measured in its Euclidean length units times t),
// capped at max_range. Grid-corner crossings are conservative: touching the
// corner of an occupied cell counts as a hit.
double raycast(const GridView& grid, double ox, double oy, double dx, double dy,
               double max_range);

inline double raycast(const World& world, double ox, double oy, double angle,
                      double max_range) {
  return raycast(world.grid(), ox, oy, std::cos(angle), std::sin(angle), max_range);
}

// True when the open segment between the two points crosses no occupied cell.
bool segment_clear(const GridView& grid, double x0, double y0, double x1, double y1);

}  // namespace visnav::sim
