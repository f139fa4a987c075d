#include "visnav/idm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "visnav/errors.hpp"

namespace visnav::idm {

void validate(const IdmConfig& cfg) {
  if (cfg.stride < 1) throw std::invalid_argument("idm: stride must be >= 1");
  if (cfg.min_matches < 2) throw std::invalid_argument("idm: min_matches must be >= 2");
  if (!(cfg.max_residual > 0.0)) throw std::invalid_argument("idm: max_residual must be positive");
}

PoseEstimate estimate_relative_pose(const sim::Frame& a, const sim::Frame& b,
                                    const IdmConfig& cfg) {
  validate(cfg);

  struct Point {
    int id;
    double x, y;
  };
  auto to_points = [](const sim::Frame& f) {
    std::vector<Point> pts;
    pts.reserve(f.observations.size());
    for (const auto& o : f.observations)
      pts.push_back({o.id, o.range * std::cos(o.bearing), o.range * std::sin(o.bearing)});
    std::sort(pts.begin(), pts.end(), [](const Point& l, const Point& r) { return l.id < r.id; });
    return pts;
  };
  const auto pa = to_points(a);
  const auto pb = to_points(b);

  std::vector<std::pair<Point, Point>> matches;
  std::size_t i = 0, j = 0;
  while (i < pa.size() && j < pb.size()) {
    if (pa[i].id < pb[j].id) {
      ++i;
    } else if (pb[j].id < pa[i].id) {
      ++j;
    } else {
      matches.emplace_back(pa[i], pb[j]);
      ++i;
      ++j;
    }
  }
  if (matches.size() < cfg.min_matches)
    throw EstimateError(EstimateError::Kind::DegenerateGeometry,
                        "estimate_relative_pose: " + std::to_string(matches.size()) +
                            " common landmarks, need " + std::to_string(cfg.min_matches));

  const double n = static_cast<double>(matches.size());
  double pcx = 0, pcy = 0, qcx = 0, qcy = 0;
  for (const auto& [p, q] : matches) {
    pcx += p.x;
    pcy += p.y;
    qcx += q.x;
    qcy += q.y;
  }
  pcx /= n;
  pcy /= n;
  qcx /= n;
  qcy /= n;

  // p' ~= R(dtheta) q' on centered points; least-squares rotation from the
  // cross/dot sums, then translation from the centroids.
  double s_cross = 0, s_dot = 0;
  for (const auto& [p, q] : matches) {
    const double px = p.x - pcx, py = p.y - pcy;
    const double qx = q.x - qcx, qy = q.y - qcy;
    s_cross += qx * py - qy * px;
    s_dot += qx * px + qy * py;
  }
  const double dtheta = std::atan2(s_cross, s_dot);
  const double c = std::cos(dtheta), s = std::sin(dtheta);
  const double tx = pcx - (c * qcx - s * qcy);
  const double ty = pcy - (s * qcx + c * qcy);

  double sq = 0;
  for (const auto& [p, q] : matches) {
    const double rx = p.x - (c * q.x - s * q.y + tx);
    const double ry = p.y - (s * q.x + c * q.y + ty);
    sq += rx * rx + ry * ry;
  }
  const double residual = std::sqrt(sq / n);
  if (residual > cfg.max_residual)
    throw EstimateError(EstimateError::Kind::UnreliableEstimate,
                        "estimate_relative_pose: residual " + std::to_string(residual) +
                            " m exceeds gate " + std::to_string(cfg.max_residual) + " m");

  return PoseEstimate{RelativePose(tx, ty, dtheta), matches.size(), residual};
}

WaypointTrajectory decode_frames(const std::vector<sim::Frame>& frames, const IdmConfig& cfg) {
  validate(cfg);
  const std::size_t stride = static_cast<std::size_t>(cfg.stride);
  if (frames.size() < stride + 1)
    throw std::invalid_argument("decode: need at least stride + 1 frames");

  const std::size_t n = (frames.size() - 1) / stride;
  WaypointTrajectory out;
  out.steps.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    try {
      out.steps.push_back(
          estimate_relative_pose(frames[k * stride], frames[(k + 1) * stride], cfg).rel);
    } catch (const EstimateError& e) {
      throw DecodeError(k, e.kind(),
                        "decode: step " + std::to_string(k) + " failed: " + e.what());
    }
  }
  return out;
}

}  // namespace visnav::idm
