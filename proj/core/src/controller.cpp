#include "visnav/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace visnav::ctrl {

void validate(const ControllerGains& g) {
  if (!(g.k_v > 0.0) || !(g.k_theta > 0.0) || !(g.v_max > 0.0) || !(g.omega_max > 0.0))
    throw std::invalid_argument("gains: all fields must be strictly positive");
}

sim::Command track(const RelativePose& w, const ControllerGains& g) {
  if (!std::isfinite(w.dx) || !std::isfinite(w.dy) || !std::isfinite(w.dtheta))
    throw std::invalid_argument("track: non-finite waypoint");
  const double dtheta = wrap(w.dtheta);
  double v = 0.0;
  if (std::abs(dtheta) <= kPi / 4.0)
    v = std::clamp(g.k_v * std::hypot(w.dx, w.dy), 0.0, g.v_max);
  const double omega = std::clamp(g.k_theta * dtheta, -g.omega_max, g.omega_max);
  return sim::Command{v, omega};
}

}  // namespace visnav::ctrl
