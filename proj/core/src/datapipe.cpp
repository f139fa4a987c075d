#include "visnav/datapipe.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "visnav/errors.hpp"
#include "visnav/rng.hpp"

namespace visnav::pipe {

namespace fs = std::filesystem;
using nlohmann::json;

const char* label(MotionPrimitive p) {
  switch (p) {
    case MotionPrimitive::Forward: return "forward";
    case MotionPrimitive::TurnLeft: return "turn_left";
    case MotionPrimitive::TurnRight: return "turn_right";
    case MotionPrimitive::CompoundLeft: return "compound_left";
    case MotionPrimitive::CompoundRight: return "compound_right";
    case MotionPrimitive::Static: return "static";
  }
  return "?";
}

MotionPrimitive primitive_from_label(const std::string& s) {
  if (s == "forward") return MotionPrimitive::Forward;
  if (s == "turn_left") return MotionPrimitive::TurnLeft;
  if (s == "turn_right") return MotionPrimitive::TurnRight;
  if (s == "compound_left") return MotionPrimitive::CompoundLeft;
  if (s == "compound_right") return MotionPrimitive::CompoundRight;
  if (s == "static") return MotionPrimitive::Static;
  throw ValidationError("manifest: unknown primitive label: " + s);
}

MotionPrimitive mirror_primitive(MotionPrimitive p) {
  switch (p) {
    case MotionPrimitive::TurnLeft: return MotionPrimitive::TurnRight;
    case MotionPrimitive::TurnRight: return MotionPrimitive::TurnLeft;
    case MotionPrimitive::CompoundLeft: return MotionPrimitive::CompoundRight;
    case MotionPrimitive::CompoundRight: return MotionPrimitive::CompoundLeft;
    default: return p;
  }
}

namespace {

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

json steps_to_json(const WaypointTrajectory& t) {
  json out = json::array();
  for (const auto& s : t.steps) out.push_back({s.dx, s.dy, s.dtheta});
  return out;
}

WaypointTrajectory steps_from_json(const json& j) {
  WaypointTrajectory t;
  for (const auto& e : j)
    t.steps.push_back(
        RelativePose(e.at(0).get<double>(), e.at(1).get<double>(), e.at(2).get<double>()));
  return t;
}

constexpr const char* kMirrorSuffix = "~m";

}  // namespace

std::string to_json_string(const FrameLog& log) {
  json j;
  j["version"] = 1;
  j["type"] = "frame_log";
  j["source_id"] = log.source_id;
  j["timestamps"] = log.timestamps;
  json poses = json::array();
  for (const auto& p : log.poses) poses.push_back({p.x, p.y, p.theta});
  j["poses"] = std::move(poses);
  json frames = json::array();
  for (const auto& f : log.frames) frames.push_back(frame_to_json(f));
  j["frames"] = std::move(frames);
  return j.dump();
}

FrameLog frame_log_from_json_string(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("frame_log: not valid JSON");
  try {
    if (j.at("version").get<int>() != 1) throw ValidationError("frame_log: unsupported version");
    FrameLog log;
    log.source_id = j.at("source_id").get<std::string>();
    log.timestamps = j.at("timestamps").get<std::vector<double>>();
    for (const auto& p : j.at("poses"))
      log.poses.push_back(Pose(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()));
    for (const auto& f : j.at("frames")) log.frames.push_back(frame_from_json(f));
    if (log.poses.size() != log.frames.size() || log.poses.size() != log.timestamps.size())
      throw ValidationError("frame_log: poses, frames and timestamps must align");
    return log;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("frame_log: ") + e.what());
  }
}

void save_frame_log(const FrameLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("frame_log: cannot open for writing: " + path);
  out << to_json_string(log) << "\n";
  if (!out) throw Error("frame_log: write failed: " + path);
}

FrameLog load_frame_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("frame_log: cannot open: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return frame_log_from_json_string(ss.str());
}

FrameLog frame_log_from_episode(const ctrl::EpisodeResult& r, const std::string& source_id) {
  if (r.frames.empty())
    throw ValidationError("frame_log: episode was recorded without frames");
  if (r.frames.size() != r.trace.poses.size())
    throw ValidationError("frame_log: episode frames do not align with the trace");
  FrameLog log;
  log.source_id = source_id;
  log.timestamps = r.trace.timestamps;
  log.poses = r.trace.poses;
  log.frames = r.frames;
  return log;
}

std::vector<Clip> segment_clips(const FrameLog& log, int clip_len, int hop) {
  if (clip_len < 2) throw std::invalid_argument("segment_clips: clip_len must be >= 2");
  if (hop < 1) throw std::invalid_argument("segment_clips: hop must be >= 1");
  std::vector<Clip> clips;
  const std::size_t n = log.frames.size();
  for (std::size_t start = 0; start + clip_len <= n; start += hop) {
    Clip c;
    char idx[16];
    std::snprintf(idx, sizeof(idx), "%06zu", start);
    c.clip_id = log.source_id + "_" + idx;
    c.source_id = log.source_id;
    c.frames.assign(log.frames.begin() + start, log.frames.begin() + start + clip_len);
    if (log.poses.size() == n) {
      for (int k = 1; k < clip_len; ++k)
        c.gt_steps.steps.push_back(relative(log.poses[start + k - 1], log.poses[start + k]));
    }
    c.caption_seed = fnv1a(c.clip_id.data(), c.clip_id.size());
    clips.push_back(std::move(c));
  }
  return clips;
}

MotionPrimitive classify_primitive(const WaypointTrajectory& steps,
                                   const PrimitiveThresholds& th) {
  if (steps.steps.empty()) throw std::invalid_argument("classify_primitive: empty steps");
  if (!(th.min_translation > 0.0) || !(th.min_yaw > 0.0))
    throw std::invalid_argument("classify_primitive: thresholds must be positive");
  double translation = 0.0;
  double yaw = 0.0;
  for (const auto& s : steps.steps) {
    translation += std::hypot(s.dx, s.dy);
    yaw += wrap(s.dtheta);
  }
  const bool moves = translation >= th.min_translation;
  const bool turns = std::abs(yaw) >= th.min_yaw;
  if (!moves && !turns) return MotionPrimitive::Static;
  if (moves && !turns) return MotionPrimitive::Forward;
  if (!moves) return yaw > 0.0 ? MotionPrimitive::TurnLeft : MotionPrimitive::TurnRight;
  return yaw > 0.0 ? MotionPrimitive::CompoundLeft : MotionPrimitive::CompoundRight;
}

std::string caption(MotionPrimitive primitive, const std::vector<std::string>& scene_tags,
                    std::uint64_t rng_seed) {
  // Camera-movement vocabulary only: dolly for translation, pan for rotation.
  static const std::vector<std::string> kForward = {
      "dolly forward along the walkway",
      "dolly forward at a steady pace",
      "dolly straight ahead through the open space",
  };
  static const std::vector<std::string> kTurnLeft = {
      "pan left across the scene",
      "pan left at a steady rate",
      "pan left toward the far side",
  };
  static const std::vector<std::string> kTurnRight = {
      "pan right across the scene",
      "pan right at a steady rate",
      "pan right toward the far side",
  };
  static const std::vector<std::string> kCompoundLeft = {
      "dolly forward while panning left",
      "dolly ahead while panning left around the bend",
      "dolly forward with a gradual pan left",
  };
  static const std::vector<std::string> kCompoundRight = {
      "dolly forward while panning right",
      "dolly ahead while panning right around the bend",
      "dolly forward with a gradual pan right",
  };
  static const std::vector<std::string> kStatic = {
      "hold the camera still",
      "keep the viewpoint fixed in place",
      "hold position with the camera steady",
  };
  const std::vector<std::string>* variants = &kStatic;
  switch (primitive) {
    case MotionPrimitive::Forward: variants = &kForward; break;
    case MotionPrimitive::TurnLeft: variants = &kTurnLeft; break;
    case MotionPrimitive::TurnRight: variants = &kTurnRight; break;
    case MotionPrimitive::CompoundLeft: variants = &kCompoundLeft; break;
    case MotionPrimitive::CompoundRight: variants = &kCompoundRight; break;
    case MotionPrimitive::Static: variants = &kStatic; break;
  }
  std::string text = (*variants)[splitmix64(rng_seed) % variants->size()];
  if (!scene_tags.empty()) {
    text += ", near the ";
    for (std::size_t i = 0; i < scene_tags.size(); ++i) {
      if (i > 0) text += i + 1 == scene_tags.size() ? " and the " : ", the ";
      text += scene_tags[i];
    }
  }
  return text;
}

Clip mirror(const Clip& clip) {
  Clip m = clip;
  m.mirrored = !clip.mirrored;
  if (m.clip_id.size() >= 2 && m.clip_id.ends_with(kMirrorSuffix))
    m.clip_id.erase(m.clip_id.size() - 2);
  else
    m.clip_id += kMirrorSuffix;
  for (auto& f : m.frames) {
    for (auto& o : f.observations) o.bearing = wrap(-o.bearing);
    std::reverse(f.scan.begin(), f.scan.end());
  }
  auto mirror_steps = [](WaypointTrajectory& t) {
    for (auto& s : t.steps) {
      s.dy = -s.dy;
      s.dtheta = wrap(-s.dtheta);
    }
  };
  mirror_steps(m.gt_steps);
  mirror_steps(m.recovered_steps);
  m.primitive = mirror_primitive(clip.primitive);
  m.caption = caption(m.primitive, m.scene_tags, m.caption_seed);
  return m;
}

void annotate(Clip& clip, const idm::IdmConfig& idm_cfg, const PrimitiveThresholds& th) {
  clip.stride = idm_cfg.stride;
  clip.recovered_steps = idm::decode_frames(clip.frames, idm_cfg);
  clip.primitive = classify_primitive(clip.recovered_steps, th);
  clip.caption = caption(clip.primitive, clip.scene_tags, clip.caption_seed);
}

ManifestSummary summarize(const std::vector<Clip>& clips) {
  ManifestSummary s;
  s.total = clips.size();
  for (const auto& c : clips) {
    ++s.per_primitive[label(c.primitive)];
    ++s.per_source[c.source_id];
  }
  return s;
}

ManifestSummary build_manifest(const std::vector<Clip>& clips, const std::string& out_path,
                               FramesMode mode) {
  std::set<std::string> ids;
  for (const auto& c : clips)
    if (!ids.insert(c.clip_id).second)
      throw ValidationError("manifest: duplicate clip_id: " + c.clip_id);

  const fs::path manifest_path(out_path);
  if (manifest_path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(manifest_path.parent_path(), ec);
  }
  fs::path frames_dir;
  if (mode == FramesMode::Sidecar) {
    frames_dir = manifest_path;
    frames_dir += ".frames";
    std::error_code ec;
    fs::create_directories(frames_dir, ec);
    if (ec) throw Error("manifest: cannot create frames directory: " + frames_dir.string());
  }

  std::ofstream out(out_path);
  if (!out) throw Error("manifest: cannot open for writing: " + out_path);
  for (const auto& c : clips) {
    json record;
    record["clip_id"] = c.clip_id;
    record["source_id"] = c.source_id;
    record["mirrored"] = c.mirrored;
    record["primitive"] = label(c.primitive);
    record["caption"] = c.caption;
    record["clip_len"] = c.frames.size();
    record["stride"] = c.stride;
    record["steps"] = steps_to_json(c.recovered_steps);
    if (mode == FramesMode::Inline) {
      json frames = json::array();
      for (const auto& f : c.frames) frames.push_back(frame_to_json(f));
      record["frames_ref"] = std::move(frames);
    } else {
      std::string name = c.clip_id;
      std::replace(name.begin(), name.end(), '~', 'm');
      const fs::path frame_file = frames_dir / (name + ".json");
      std::ofstream fout(frame_file);
      if (!fout) throw Error("manifest: cannot write frames file: " + frame_file.string());
      json frames = json::array();
      for (const auto& f : c.frames) frames.push_back(frame_to_json(f));
      fout << frames.dump() << "\n";
      record["frames_ref"] = fs::relative(frame_file, manifest_path.parent_path().empty()
                                                          ? fs::path(".")
                                                          : manifest_path.parent_path())
                                 .string();
    }
    out << record.dump() << "\n";
    if (!out) throw Error("manifest: write failed: " + out_path);
  }
  ManifestSummary s = summarize(clips);
  s.manifest_path = out_path;
  return s;
}

std::vector<Clip> parse_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("manifest: cannot open: " + path);
  const fs::path base = fs::path(path).parent_path();
  std::vector<Clip> clips;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw ValidationError("manifest: line " + std::to_string(line_no) + " is not valid JSON");
    try {
      Clip c;
      c.clip_id = j.at("clip_id").get<std::string>();
      c.source_id = j.at("source_id").get<std::string>();
      c.mirrored = j.at("mirrored").get<bool>();
      c.primitive = primitive_from_label(j.at("primitive").get<std::string>());
      c.caption = j.at("caption").get<std::string>();
      c.stride = j.at("stride").get<int>();
      c.recovered_steps = steps_from_json(j.at("steps"));
      const auto& ref = j.at("frames_ref");
      if (ref.is_array()) {
        for (const auto& f : ref) c.frames.push_back(frame_from_json(f));
      } else {
        const fs::path frame_file = base / ref.get<std::string>();
        std::ifstream fin(frame_file);
        if (!fin) throw ValidationError("manifest: missing frames file: " + frame_file.string());
        json frames;
        fin >> frames;
        for (const auto& f : frames) c.frames.push_back(frame_from_json(f));
      }
      if (c.frames.size() != j.at("clip_len").get<std::size_t>())
        throw ValidationError("manifest: clip_len mismatch for " + c.clip_id);
      clips.push_back(std::move(c));
    } catch (const json::exception& e) {
      throw ValidationError("manifest: line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return clips;
}

}  // namespace visnav::pipe
