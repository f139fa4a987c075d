#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "visnav/datapipe.hpp"
#include "visnav/episode_runner.hpp"
#include "visnav/metrics.hpp"
#include "visnav/rng.hpp"

namespace visnav::bench {

inline constexpr const char* kToolVersion = "0.1.0";

enum class PlannerMode { OracleNoiseless, OracleWithErrors, External };
enum class ExpertMode { ACMoE, SingleExpert };

const char* label(PlannerMode m);
const char* label(ExpertMode m);
PlannerMode planner_mode_from_label(const std::string& s);
ExpertMode expert_mode_from_label(const std::string& s);

struct BenchmarkConfig {
  int version = 1;
  std::uint64_t global_seed = 1;
  int n_worlds = 4;
  int episodes_per_world = 5;
  sim::WorldParams world;
  sim::SensorConfig sensor;
  PlannerMode planner = PlannerMode::OracleNoiseless;
  std::string external_endpoint;  // used when planner == External
  double external_timeout_s = 10.0;
  ExpertMode experts = ExpertMode::ACMoE;
  imagine::ErrorModel error_model;  // ignored by the noiseless oracle
  int horizon_frames = 70;
  idm::IdmConfig idm;
  ctrl::ControllerGains gains;
  ctrl::EpisodeConfig episode;
  double min_goal_separation = 6.0;  // lower bound on sampled l_i, meters
  std::string output_dir;            // no artifacts written when empty
  int threads = 1;
};

void validate(const BenchmarkConfig& cfg);
std::string to_json_string(const BenchmarkConfig& cfg);
BenchmarkConfig config_from_json_string(const std::string& text);
BenchmarkConfig load_config(const std::string& path);
void save_config(const BenchmarkConfig& cfg, const std::string& path);

// Hash of the semantically meaningful fields (output_dir and threads do not
// participate), over the canonical serialization.
std::string config_hash(const BenchmarkConfig& cfg);

struct KinematicAggregate {
  double rpe_t = 0.0;
  double rpe_r = 0.0;             // radians
  double motion_fidelity = 0.0;
  std::size_t episodes = 0;       // episodes contributing kinematic stats
  bool available = false;
};

struct RunRecord {
  BenchmarkConfig config;  // resolved
  std::string hash;
  std::vector<ctrl::EpisodeResult> results;  // ordered by episode index
  metrics::Aggregate aggregate;
  KinematicAggregate kinematics;
  double wall_clock_s = 0.0;
  std::string tool_version = kToolVersion;
  bool complete = true;
};

// Deterministic world/episode generation from the global seed, episode
// execution (cfg.threads workers), aggregation, and artifact writing when
// output_dir is set. An unreachable external planner aborts the run and the
// partial record comes back flagged incomplete.
RunRecord run_benchmark(const BenchmarkConfig& cfg);

// Episode seeds are a stable hash of (global_seed, world_index,
// episode_index) so any subset reproduces exactly.
std::uint64_t episode_seed(std::uint64_t global_seed, int world_index, int episode_index);

// Rejection-samples a start pose and a reachable goal at least min_len apart;
// the start must see at least three landmarks with the given sensor.
sim::Episode sample_episode(const sim::World& world, Rng& rng, double min_len,
                            const sim::SensorConfig& sensor);

// run.json (+ resolved_config.json + episodes/ep_NNNN.json) in `dir`.
void write_run(const RunRecord& record, const std::string& dir);
RunRecord load_run(const std::string& dir);
std::string run_to_json_string(const RunRecord& record, bool include_wall_clock = true);

struct PipelineConfig {
  int clip_len = 121;
  int hop = 121;
  idm::IdmConfig idm;
  pipe::PrimitiveThresholds thresholds;
  bool mirror_augment = true;
  pipe::FramesMode frames_mode = pipe::FramesMode::Sidecar;
  std::vector<std::string> scene_tags;
};

// segment -> decode -> classify -> caption -> (mirror) -> manifest over every
// input log (frame logs or frame-recorded episode results). Malformed inputs
// raise ValidationError naming the file and record.
pipe::ManifestSummary run_datapipe(const std::vector<std::string>& input_files,
                                   const PipelineConfig& cfg, const std::string& out_manifest);

// Sorted *.json files directly under `dir`.
std::vector<std::string> list_input_logs(const std::string& dir);

enum class ReportFormat { Csv, Json, PlotData };
ReportFormat report_format_from_label(const std::string& s);

// Emits report.csv / report.json / plotdata.json into out_dir; returns the
// written paths.
std::vector<std::string> emit_report(const RunRecord& record, ReportFormat format,
                                     const std::string& out_dir);

// Aggregate episode results loaded from a results directory (a run dir or
// its episodes/ subdirectory).
std::vector<ctrl::EpisodeResult> load_results_dir(const std::string& dir);

}  // namespace visnav::bench
