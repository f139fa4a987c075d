#include "visnav/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace visnav {

double wrap(double angle) {
  if (!std::isfinite(angle)) throw std::invalid_argument("wrap: non-finite angle");
  double r = std::remainder(angle, kTwoPi);  // [-pi, pi]
  if (r <= -kPi) r += kTwoPi;
  return r;
}

Pose::Pose(double x_, double y_, double theta_) : x(x_), y(y_), theta(wrap(theta_)) {}

RelativePose::RelativePose(double dx_, double dy_, double dtheta_)
    : dx(dx_), dy(dy_), dtheta(wrap(dtheta_)) {}

Pose compose(const Pose& a, const RelativePose& b) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return Pose(a.x + b.dx * c - b.dy * s, a.y + b.dx * s + b.dy * c, a.theta + b.dtheta);
}

RelativePose relative(const Pose& a, const Pose& b) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  const double ex = b.x - a.x;
  const double ey = b.y - a.y;
  return RelativePose(c * ex + s * ey, -s * ex + c * ey, b.theta - a.theta);
}

Trajectory accumulate(const Pose& start, const WaypointTrajectory& steps, double period) {
  if (steps.steps.empty()) throw std::invalid_argument("accumulate: empty waypoint trajectory");
  if (!(period > 0.0)) throw std::invalid_argument("accumulate: period must be positive");
  Trajectory out;
  out.poses.reserve(steps.steps.size() + 1);
  out.timestamps.reserve(steps.steps.size() + 1);
  out.poses.push_back(start);
  out.timestamps.push_back(0.0);
  for (std::size_t i = 0; i < steps.steps.size(); ++i) {
    out.poses.push_back(compose(out.poses.back(), steps.steps[i]));
    out.timestamps.push_back(static_cast<double>(i + 1) * period);
  }
  return out;
}

double path_length(const Trajectory& t) {
  if (t.poses.empty()) throw std::invalid_argument("path_length: empty trajectory");
  double len = 0.0;
  for (std::size_t i = 1; i < t.poses.size(); ++i) {
    len += std::hypot(t.poses[i].x - t.poses[i - 1].x, t.poses[i].y - t.poses[i - 1].y);
  }
  return len;
}

}  // namespace visnav
