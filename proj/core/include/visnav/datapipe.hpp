#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "visnav/geometry.hpp"
#include "visnav/idm.hpp"
#include "visnav/result.hpp"
#include "visnav/world.hpp"

namespace visnav::pipe {

enum class MotionPrimitive { Forward, TurnLeft, TurnRight, CompoundLeft, CompoundRight, Static };

const char* label(MotionPrimitive p);
MotionPrimitive primitive_from_label(const std::string& s);
MotionPrimitive mirror_primitive(MotionPrimitive p);

struct PrimitiveThresholds {
  double min_translation = 0.3;                // meters over the clip
  double min_yaw = 15.0 * kPi / 180.0;         // radians over the clip
};

// Pose-stamped frame log; episode traces recorded with frames convert to this.
struct FrameLog {
  std::string source_id;
  std::vector<double> timestamps;
  std::vector<Pose> poses;
  std::vector<sim::Frame> frames;
};

std::string to_json_string(const FrameLog& log);
FrameLog frame_log_from_json_string(const std::string& text);
void save_frame_log(const FrameLog& log, const std::string& path);
FrameLog load_frame_log(const std::string& path);

// Requires the episode to have been run with record_frames.
FrameLog frame_log_from_episode(const ctrl::EpisodeResult& r, const std::string& source_id);

struct Clip {
  std::string clip_id;
  std::string source_id;
  std::vector<sim::Frame> frames;      // fixed clip length
  WaypointTrajectory gt_steps;         // frame-rate ground truth from the log poses
  WaypointTrajectory recovered_steps;  // inverse-dynamics output at `stride`
  int stride = 4;
  MotionPrimitive primitive = MotionPrimitive::Static;
  std::string caption;
  bool mirrored = false;
  std::vector<std::string> scene_tags;
  std::uint64_t caption_seed = 0;

  bool operator==(const Clip&) const = default;
};

// Sliding-window segmentation; a tail shorter than clip_len is dropped.
// Returns raw clips (geometry and labels not yet recovered).
std::vector<Clip> segment_clips(const FrameLog& log, int clip_len, int hop);

// let T = sum of planar step magnitudes and Theta = signed yaw sum:
// Static when both below threshold, Forward on translation only, TurnLeft /
// TurnRight on rotation only, CompoundLeft / CompoundRight when both exceed.
MotionPrimitive classify_primitive(const WaypointTrajectory& steps,
                                   const PrimitiveThresholds& th);

// Camera-movement caption template for the primitive, deterministic per seed.
std::string caption(MotionPrimitive primitive, const std::vector<std::string>& scene_tags,
                    std::uint64_t rng_seed);

// Geometric mirror: bearings negated, scans reversed, lateral and angular
// step components negated, primitive side-swapped, caption regenerated.
// An involution on all numeric content.
Clip mirror(const Clip& clip);

// Recover steps with the inverse dynamics, classify, and caption one clip.
void annotate(Clip& clip, const idm::IdmConfig& idm_cfg, const PrimitiveThresholds& th);

enum class FramesMode { Inline, Sidecar };

struct ManifestSummary {
  std::size_t total = 0;
  std::map<std::string, std::size_t> per_primitive;
  std::map<std::string, std::size_t> per_source;
  std::string manifest_path;
};

// One JSON Lines record per clip. Duplicate clip ids raise ValidationError;
// unwritable paths raise Error. Sidecar mode stores frames next to the
// manifest under <manifest>.frames/.
ManifestSummary build_manifest(const std::vector<Clip>& clips, const std::string& out_path,
                               FramesMode mode = FramesMode::Sidecar);

// Reads back the dataset-facing fields (frames resolved through frames_ref).
std::vector<Clip> parse_manifest(const std::string& path);

ManifestSummary summarize(const std::vector<Clip>& clips);

}  // namespace visnav::pipe
