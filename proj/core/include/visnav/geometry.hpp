#pragma once

#include <vector>

namespace visnav {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// Normalizes an angle to the half-open interval (-pi, pi].
// Throws std::invalid_argument on non-finite input.
double wrap(double angle);

// Planar pose; theta is kept normalized to (-pi, pi].
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose() = default;
  Pose(double x_, double y_, double theta_);

  bool operator==(const Pose&) const = default;
};

// Body-frame displacement: dx along the source heading, dy to its left,
// dtheta normalized to (-pi, pi].
struct RelativePose {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;

  RelativePose() = default;
  RelativePose(double dx_, double dy_, double dtheta_);

  bool operator==(const RelativePose&) const = default;
};

struct Trajectory {
  std::vector<Pose> poses;
  std::vector<double> timestamps;  // seconds, strictly increasing, same length

  std::size_t size() const { return poses.size(); }
  bool operator==(const Trajectory&) const = default;
};

struct WaypointTrajectory {
  std::vector<RelativePose> steps;

  std::size_t size() const { return steps.size(); }
  bool operator==(const WaypointTrajectory&) const = default;
};

// Pose reached by applying displacement b in a's body frame.
Pose compose(const Pose& a, const RelativePose& b);

// Inverse of compose: the displacement that maps a onto b, expressed in a's
// body frame. compose(a, relative(a, b)) == b up to round-off.
RelativePose relative(const Pose& a, const Pose& b);

// Fold of compose over the waypoint steps; result has steps.size() + 1 poses
// with synthetic timestamps spaced `period` seconds apart.
// Throws std::invalid_argument on empty steps or non-positive period.
Trajectory accumulate(const Pose& start, const WaypointTrajectory& steps, double period = 1.0);

// Sum of consecutive planar Euclidean distances; 0 for a single pose.
double path_length(const Trajectory& t);

}  // namespace visnav
