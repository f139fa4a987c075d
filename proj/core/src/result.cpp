#include "visnav/result.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "visnav/errors.hpp"

namespace visnav::ctrl {

using nlohmann::json;

const char* label(Termination t) {
  switch (t) {
    case Termination::Stopped: return "stopped";
    case Termination::Budget: return "budget";
    case Termination::DecodeFailure: return "decode_failure";
  }
  return "?";
}

Termination termination_from_label(const std::string& s) {
  if (s == "stopped") return Termination::Stopped;
  if (s == "budget") return Termination::Budget;
  if (s == "decode_failure") return Termination::DecodeFailure;
  throw ValidationError("episode: unknown termination label: " + s);
}

namespace {

json steps_to_json(const WaypointTrajectory& t) {
  json out = json::array();
  for (const auto& s : t.steps) out.push_back({s.dx, s.dy, s.dtheta});
  return out;
}

WaypointTrajectory steps_from_json(const json& j) {
  WaypointTrajectory t;
  for (const auto& e : j)
    t.steps.push_back(RelativePose(e.at(0).get<double>(), e.at(1).get<double>(),
                                   e.at(2).get<double>()));
  return t;
}

json frame_to_json(const sim::Frame& f) {
  json obs = json::array();
  for (const auto& o : f.observations)
    obs.push_back({{"id", o.id}, {"range", o.range}, {"bearing", o.bearing}});
  return json{{"index", f.frame_index}, {"observations", std::move(obs)}, {"scan", f.scan}};
}

sim::Frame frame_from_json(const json& j) {
  sim::Frame f;
  f.frame_index = j.at("index").get<int>();
  for (const auto& o : j.at("observations"))
    f.observations.push_back(sim::Observation{o.at("id").get<int>(), o.at("range").get<double>(),
                                              o.at("bearing").get<double>()});
  f.scan = j.at("scan").get<std::vector<double>>();
  return f;
}

}  // namespace

std::string to_json_string(const EpisodeResult& r, int trace_stride) {
  if (trace_stride < 1) throw std::invalid_argument("episode: trace_stride must be >= 1");
  json j;
  j["schema_version"] = 1;
  j["type"] = "episode_result";
  j["episode_index"] = r.episode_index;
  j["seed"] = r.seed;
  j["success"] = r.success;
  j["shortest_path_len"] = r.shortest_path_len;
  j["executed_len"] = r.executed_len;
  j["nav_error"] = r.nav_error;
  j["final_pose"] = {r.final_pose.x, r.final_pose.y, r.final_pose.theta};
  j["goal"] = {r.goal_x, r.goal_y};
  j["success_threshold"] = r.success_threshold;
  j["termination"] = label(r.termination);
  j["collisions"] = r.collisions;
  j["ticks"] = r.ticks;
  j["trace_stride"] = trace_stride;

  json poses = json::array();
  json times = json::array();
  const std::size_t n = r.trace.poses.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i % trace_stride != 0 && i + 1 != n) continue;
    const auto& p = r.trace.poses[i];
    poses.push_back({p.x, p.y, p.theta});
    times.push_back(r.trace.timestamps[i]);
  }
  j["trace"] = {{"poses", std::move(poses)}, {"timestamps", std::move(times)}};

  json frames = json::array();
  for (const auto& f : r.frames) frames.push_back(frame_to_json(f));
  j["frames"] = std::move(frames);

  json plans = json::array();
  for (const auto& p : r.plans) {
    plans.push_back({{"decoded", steps_to_json(p.decoded)},
                     {"reference", steps_to_json(p.reference)},
                     {"start_tick", p.start_tick},
                     {"fallback_rotation", p.fallback_rotation},
                     {"flipped", p.flipped},
                     {"hallucinated", p.hallucinated},
                     {"truncated", p.truncated},
                     {"decode_failed", p.decode_failed}});
  }
  j["plans"] = std::move(plans);
  return j.dump();
}

EpisodeResult episode_result_from_json_string(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("episode: not valid JSON");
  try {
    if (j.at("schema_version").get<int>() != 1)
      throw ValidationError("episode: unsupported schema_version");
    EpisodeResult r;
    r.episode_index = j.at("episode_index").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.success = j.at("success").get<bool>();
    r.shortest_path_len = j.at("shortest_path_len").get<double>();
    r.executed_len = j.at("executed_len").get<double>();
    r.nav_error = j.at("nav_error").get<double>();
    const auto& fp = j.at("final_pose");
    r.final_pose = Pose(fp.at(0).get<double>(), fp.at(1).get<double>(), fp.at(2).get<double>());
    r.goal_x = j.at("goal").at(0).get<double>();
    r.goal_y = j.at("goal").at(1).get<double>();
    r.success_threshold = j.at("success_threshold").get<double>();
    r.termination = termination_from_label(j.at("termination").get<std::string>());
    r.collisions = j.at("collisions").get<int>();
    r.ticks = j.at("ticks").get<int>();
    for (const auto& p : j.at("trace").at("poses"))
      r.trace.poses.push_back(Pose(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()));
    r.trace.timestamps = j.at("trace").at("timestamps").get<std::vector<double>>();
    for (const auto& f : j.at("frames")) r.frames.push_back(frame_from_json(f));
    for (const auto& p : j.at("plans")) {
      PlanRecord pr;
      pr.decoded = steps_from_json(p.at("decoded"));
      pr.reference = steps_from_json(p.at("reference"));
      pr.start_tick = p.at("start_tick").get<int>();
      pr.fallback_rotation = p.at("fallback_rotation").get<bool>();
      pr.flipped = p.at("flipped").get<bool>();
      pr.hallucinated = p.at("hallucinated").get<bool>();
      pr.truncated = p.at("truncated").get<bool>();
      pr.decode_failed = p.at("decode_failed").get<bool>();
      r.plans.push_back(std::move(pr));
    }
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("episode: ") + e.what());
  }
}

void save_episode_result(const EpisodeResult& r, const std::string& path, int trace_stride) {
  std::ofstream out(path);
  if (!out) throw Error("episode: cannot open for writing: " + path);
  out << to_json_string(r, trace_stride) << "\n";
  if (!out) throw Error("episode: write failed: " + path);
}

EpisodeResult load_episode_result(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("episode: cannot open: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return episode_result_from_json_string(ss.str());
}

}  // namespace visnav::ctrl
