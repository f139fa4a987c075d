#include "visnav/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "visnav/errors.hpp"
#include "visnav/plan_client.hpp"

namespace visnav::bench {

namespace fs = std::filesystem;
using nlohmann::json;

const char* label(PlannerMode m) {
  switch (m) {
    case PlannerMode::OracleNoiseless: return "oracle";
    case PlannerMode::OracleWithErrors: return "oracle-noisy";
    case PlannerMode::External: return "external";
  }
  return "?";
}

const char* label(ExpertMode m) {
  return m == ExpertMode::ACMoE ? "acmoe" : "single";
}

PlannerMode planner_mode_from_label(const std::string& s) {
  if (s == "oracle") return PlannerMode::OracleNoiseless;
  if (s == "oracle-noisy") return PlannerMode::OracleWithErrors;
  if (s == "external") return PlannerMode::External;
  throw ValidationError("config: unknown planner mode: " + s);
}

ExpertMode expert_mode_from_label(const std::string& s) {
  if (s == "acmoe") return ExpertMode::ACMoE;
  if (s == "single") return ExpertMode::SingleExpert;
  throw ValidationError("config: unknown expert mode: " + s);
}

ReportFormat report_format_from_label(const std::string& s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  if (s == "plotdata") return ReportFormat::PlotData;
  throw std::invalid_argument("report: unknown format: " + s);
}

void validate(const BenchmarkConfig& cfg) {
  if (cfg.version != 1) throw ValidationError("config: unsupported version");
  if (cfg.n_worlds < 1) throw ValidationError("config: n_worlds must be >= 1");
  if (cfg.episodes_per_world < 1) throw ValidationError("config: episodes_per_world must be >= 1");
  if (cfg.horizon_frames < 1) throw ValidationError("config: horizon_frames must be >= 1");
  if (cfg.horizon_frames < cfg.idm.stride)
    throw ValidationError("config: horizon_frames must cover at least one decode stride");
  if (cfg.threads < 1) throw ValidationError("config: threads must be >= 1");
  if (cfg.planner == PlannerMode::External && cfg.external_endpoint.empty())
    throw ValidationError("config: external planner needs an endpoint");
  if (!(cfg.min_goal_separation > 0.0))
    throw ValidationError("config: min_goal_separation must be positive");
  try {
    sim::validate(cfg.sensor);
    idm::validate(cfg.idm);
    ctrl::validate(cfg.gains);
    ctrl::validate(cfg.episode);
    imagine::validate(cfg.error_model);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

namespace {

json config_to_json(const BenchmarkConfig& c) {
  json j;
  j["version"] = c.version;
  j["global_seed"] = c.global_seed;
  j["n_worlds"] = c.n_worlds;
  j["episodes_per_world"] = c.episodes_per_world;
  j["world"] = {{"width_cells", c.world.width_cells},
                {"height_cells", c.world.height_cells},
                {"resolution", c.world.resolution},
                {"obstacle_density", c.world.obstacle_density},
                {"n_landmarks", c.world.n_landmarks},
                {"max_retries", c.world.max_retries}};
  j["sensor"] = {{"fov", c.sensor.fov},
                 {"max_range", c.sensor.max_range},
                 {"n_rays", c.sensor.n_rays},
                 {"landmark_visibility", c.sensor.landmark_visibility}};
  j["planner"] = label(c.planner);
  j["external_endpoint"] = c.external_endpoint;
  j["external_timeout_s"] = c.external_timeout_s;
  j["experts"] = label(c.experts);
  j["error_model"] = {{"flip_prob", c.error_model.flip_prob},
                      {"drift_sigma_t", c.error_model.drift_sigma_t},
                      {"drift_sigma_r", c.error_model.drift_sigma_r},
                      {"hallucination_prob", c.error_model.hallucination_prob},
                      {"truncation_prob", c.error_model.truncation_prob}};
  j["horizon_frames"] = c.horizon_frames;
  j["idm"] = {{"stride", c.idm.stride},
              {"min_matches", c.idm.min_matches},
              {"max_residual", c.idm.max_residual}};
  j["gains"] = {{"k_v", c.gains.k_v},
                {"k_theta", c.gains.k_theta},
                {"v_max", c.gains.v_max},
                {"omega_max", c.gains.omega_max}};
  j["episode"] = {{"max_steps", c.episode.max_steps},
                  {"success_threshold", c.episode.success_threshold},
                  {"ticks_per_waypoint", c.episode.ticks_per_waypoint},
                  {"dt", c.episode.dt},
                  {"record_frames", c.episode.record_frames},
                  {"trace_stride", c.episode.trace_stride}};
  j["min_goal_separation"] = c.min_goal_separation;
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  return j;
}

BenchmarkConfig config_from_json(const json& j) {
  BenchmarkConfig c;
  try {
    c.version = j.value("version", 1);
    c.global_seed = j.value("global_seed", c.global_seed);
    c.n_worlds = j.value("n_worlds", c.n_worlds);
    c.episodes_per_world = j.value("episodes_per_world", c.episodes_per_world);
    if (j.contains("world")) {
      const auto& w = j["world"];
      c.world.width_cells = w.value("width_cells", c.world.width_cells);
      c.world.height_cells = w.value("height_cells", c.world.height_cells);
      c.world.resolution = w.value("resolution", c.world.resolution);
      c.world.obstacle_density = w.value("obstacle_density", c.world.obstacle_density);
      c.world.n_landmarks = w.value("n_landmarks", c.world.n_landmarks);
      c.world.max_retries = w.value("max_retries", c.world.max_retries);
    }
    if (j.contains("sensor")) {
      const auto& s = j["sensor"];
      c.sensor.fov = s.value("fov", c.sensor.fov);
      c.sensor.max_range = s.value("max_range", c.sensor.max_range);
      c.sensor.n_rays = s.value("n_rays", c.sensor.n_rays);
      c.sensor.landmark_visibility = s.value("landmark_visibility", c.sensor.landmark_visibility);
    }
    if (j.contains("planner")) c.planner = planner_mode_from_label(j["planner"].get<std::string>());
    c.external_endpoint = j.value("external_endpoint", c.external_endpoint);
    c.external_timeout_s = j.value("external_timeout_s", c.external_timeout_s);
    if (j.contains("experts")) c.experts = expert_mode_from_label(j["experts"].get<std::string>());
    if (j.contains("error_model")) {
      const auto& e = j["error_model"];
      c.error_model.flip_prob = e.value("flip_prob", 0.0);
      c.error_model.drift_sigma_t = e.value("drift_sigma_t", 0.0);
      c.error_model.drift_sigma_r = e.value("drift_sigma_r", 0.0);
      c.error_model.hallucination_prob = e.value("hallucination_prob", 0.0);
      c.error_model.truncation_prob = e.value("truncation_prob", 0.0);
    }
    c.horizon_frames = j.value("horizon_frames", c.horizon_frames);
    if (j.contains("idm")) {
      const auto& e = j["idm"];
      c.idm.stride = e.value("stride", c.idm.stride);
      c.idm.min_matches = e.value("min_matches", c.idm.min_matches);
      c.idm.max_residual = e.value("max_residual", c.idm.max_residual);
    }
    if (j.contains("gains")) {
      const auto& e = j["gains"];
      c.gains.k_v = e.value("k_v", c.gains.k_v);
      c.gains.k_theta = e.value("k_theta", c.gains.k_theta);
      c.gains.v_max = e.value("v_max", c.gains.v_max);
      c.gains.omega_max = e.value("omega_max", c.gains.omega_max);
    }
    if (j.contains("episode")) {
      const auto& e = j["episode"];
      c.episode.max_steps = e.value("max_steps", c.episode.max_steps);
      c.episode.success_threshold = e.value("success_threshold", c.episode.success_threshold);
      c.episode.ticks_per_waypoint = e.value("ticks_per_waypoint", c.episode.ticks_per_waypoint);
      c.episode.dt = e.value("dt", c.episode.dt);
      c.episode.record_frames = e.value("record_frames", c.episode.record_frames);
      c.episode.trace_stride = e.value("trace_stride", c.episode.trace_stride);
    }
    c.min_goal_separation = j.value("min_goal_separation", c.min_goal_separation);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.threads = j.value("threads", c.threads);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string to_json_string(const BenchmarkConfig& cfg) { return config_to_json(cfg).dump(2); }

BenchmarkConfig config_from_json_string(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("config: not valid JSON");
  return config_from_json(j);
}

BenchmarkConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_string(ss.str());
}

void save_config(const BenchmarkConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("config: cannot open for writing: " + path);
  out << to_json_string(cfg) << "\n";
  if (!out) throw Error("config: write failed: " + path);
}

std::string config_hash(const BenchmarkConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("output_dir");
  j.erase("threads");
  const std::string canon = j.dump();
  const std::uint64_t h = fnv1a(canon.data(), canon.size());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

std::uint64_t episode_seed(std::uint64_t global_seed, int world_index, int episode_index) {
  return seed_hash(global_seed, static_cast<std::uint64_t>(world_index),
                   static_cast<std::uint64_t>(episode_index));
}

sim::Episode sample_episode(const sim::World& world, Rng& rng, double min_len,
                            const sim::SensorConfig& sensor) {
  constexpr int kMaxAttempts = 512;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const double sx = rng.uniform(0.0, world.width_m());
    const double sy = rng.uniform(0.0, world.height_m());
    const double gx = rng.uniform(0.0, world.width_m());
    const double gy = rng.uniform(0.0, world.height_m());
    const double theta = rng.uniform(-kPi, kPi);
    if (!world.in_free_space(sx, sy) || !world.in_free_space(gx, gy)) continue;
    if (sim::render_frame(world, Pose(sx, sy, theta), sensor, 0).observations.size() < 3) continue;
    const auto len = sim::shortest_path_length(world, sx, sy, gx, gy);
    if (!len || *len < min_len) continue;
    sim::Episode ep;
    ep.world = &world;
    ep.start = Pose(sx, sy, theta);
    ep.goal_x = gx;
    ep.goal_y = gy;
    ep.instruction = "head to the goal marker";
    ep.shortest_path_len = *len;
    return ep;
  }
  throw GenerationError("sample_episode: no reachable start/goal pair within " +
                        std::to_string(kMaxAttempts) + " attempts");
}

namespace {

std::unique_ptr<plan::PlanProvider> make_provider(const BenchmarkConfig& cfg) {
  const imagine::RouterMode mode = cfg.experts == ExpertMode::ACMoE
                                       ? imagine::RouterMode::ACMoE
                                       : imagine::RouterMode::SingleExpert;
  switch (cfg.planner) {
    case PlannerMode::OracleNoiseless:
      return std::make_unique<plan::OraclePlanProvider>(mode, imagine::ErrorModel{}, cfg.sensor,
                                                        cfg.horizon_frames);
    case PlannerMode::OracleWithErrors:
      return std::make_unique<plan::OraclePlanProvider>(mode, cfg.error_model, cfg.sensor,
                                                        cfg.horizon_frames);
    case PlannerMode::External:
      return std::make_unique<wire::ExternalPlanProvider>(
          cfg.external_endpoint, cfg.external_timeout_s, cfg.sensor, cfg.horizon_frames);
  }
  throw std::logic_error("make_provider: unhandled planner mode");
}

KinematicAggregate aggregate_kinematics(const std::vector<ctrl::EpisodeResult>& results) {
  KinematicAggregate agg;
  for (const auto& r : results) {
    const auto k = metrics::kinematics(r);
    if (!k.available) continue;
    agg.rpe_t += k.rpe_t;
    agg.rpe_r += k.rpe_r;
    agg.motion_fidelity += k.motion_fidelity;
    ++agg.episodes;
  }
  if (agg.episodes > 0) {
    const double n = static_cast<double>(agg.episodes);
    agg.rpe_t /= n;
    agg.rpe_r /= n;
    agg.motion_fidelity /= n;
    agg.available = true;
  }
  return agg;
}

}  // namespace

RunRecord run_benchmark(const BenchmarkConfig& cfg) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();

  RunRecord record;
  record.config = cfg;
  record.hash = config_hash(cfg);

  std::vector<sim::World> worlds;
  worlds.reserve(cfg.n_worlds);
  for (int w = 0; w < cfg.n_worlds; ++w)
    worlds.push_back(sim::World::generate(seed_hash(cfg.global_seed, 0x57, w), cfg.world));

  struct Job {
    sim::Episode episode;
    std::uint64_t seed;
    int index;
  };
  std::vector<Job> jobs;
  const double min_len = std::max(cfg.min_goal_separation, cfg.episode.success_threshold);
  for (int w = 0; w < cfg.n_worlds; ++w) {
    for (int e = 0; e < cfg.episodes_per_world; ++e) {
      const int index = w * cfg.episodes_per_world + e;
      const std::uint64_t seed = episode_seed(cfg.global_seed, w, e);
      Rng sample_rng(seed_hash(seed, 0x5A));
      jobs.push_back(Job{sample_episode(worlds[w], sample_rng, min_len, cfg.sensor), seed, index});
    }
  }

  std::vector<ctrl::EpisodeResult> results(jobs.size());
  std::vector<std::uint8_t> done(jobs.size(), 0);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex error_mutex;
  std::string first_error;

  auto worker = [&]() {
    auto provider = make_provider(cfg);
    while (!abort.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) break;
      try {
        ctrl::EpisodeResult r =
            ctrl::run_episode(jobs[i].episode, *provider, cfg.idm, cfg.gains, cfg.episode,
                              cfg.sensor, jobs[i].seed);
        r.episode_index = jobs[i].index;
        results[i] = std::move(r);
        done[i] = 1;
      } catch (const Error& e) {
        // Wire failures abort the run; partial results stay usable.
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error.empty()) first_error = e.what();
        abort.store(true);
        break;
      }
    }
  };

  const int n_threads = std::max(1, cfg.threads);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < jobs.size(); ++i)
    if (done[i]) record.results.push_back(std::move(results[i]));
  record.complete = record.results.size() == jobs.size();

  if (!record.results.empty()) {
    record.aggregate = metrics::aggregate(record.results);
    record.kinematics = aggregate_kinematics(record.results);
  }
  record.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!record.complete && record.results.empty())
    throw Error("run_benchmark: no episode completed: " + first_error);

  if (!cfg.output_dir.empty()) write_run(record, cfg.output_dir);
  return record;
}

namespace {

json aggregate_to_json(const metrics::Aggregate& a) {
  return json{{"tl", a.tl}, {"ne", a.ne}, {"os", a.os}, {"sr", a.sr}, {"spl", a.spl}, {"n", a.n}};
}

json kinematics_to_json(const KinematicAggregate& k) {
  return json{{"rpe_t_m", k.rpe_t},
              {"rpe_r_rad", k.rpe_r},
              {"rpe_r_deg", k.rpe_r * 180.0 / kPi},
              {"motion_fidelity", k.motion_fidelity},
              {"episodes", k.episodes},
              {"available", k.available}};
}

}  // namespace

std::string run_to_json_string(const RunRecord& record, bool include_wall_clock) {
  json j;
  j["type"] = "run_record";
  j["schema_version"] = 1;
  j["tool_version"] = record.tool_version;
  j["config_hash"] = record.hash;
  j["config"] = config_to_json(record.config);
  j["complete"] = record.complete;
  j["episodes"] = record.results.size();
  j["aggregate"] = aggregate_to_json(record.aggregate);
  j["kinematics"] = kinematics_to_json(record.kinematics);
  if (include_wall_clock) j["wall_clock_s"] = record.wall_clock_s;
  json eps = json::array();
  for (const auto& r : record.results) {
    eps.push_back({{"episode_index", r.episode_index},
                   {"seed", r.seed},
                   {"success", r.success},
                   {"nav_error", r.nav_error},
                   {"termination", ctrl::label(r.termination)}});
  }
  j["episode_summaries"] = std::move(eps);
  return j.dump(2);
}

void write_run(const RunRecord& record, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "episodes", ec);
  if (ec) throw Error("write_run: cannot create " + dir);
  save_config(record.config, (fs::path(dir) / "resolved_config.json").string());
  {
    std::ofstream out(fs::path(dir) / "run.json");
    if (!out) throw Error("write_run: cannot write run.json");
    out << run_to_json_string(record) << "\n";
  }
  for (const auto& r : record.results) {
    char name[32];
    std::snprintf(name, sizeof(name), "ep_%04d.json", r.episode_index);
    ctrl::save_episode_result(r, (fs::path(dir) / "episodes" / name).string(),
                              record.config.episode.trace_stride);
  }
}

RunRecord load_run(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "run.json");
  if (!in) throw Error("load_run: cannot open run.json in " + dir);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("load_run: ") + e.what());
  }
  RunRecord record;
  try {
    record.tool_version = j.at("tool_version").get<std::string>();
    record.hash = j.at("config_hash").get<std::string>();
    record.config = config_from_json(j.at("config"));
    record.complete = j.at("complete").get<bool>();
    record.wall_clock_s = j.value("wall_clock_s", 0.0);
    const auto& a = j.at("aggregate");
    record.aggregate = metrics::Aggregate{a.at("tl").get<double>(), a.at("ne").get<double>(),
                                          a.at("os").get<double>(), a.at("sr").get<double>(),
                                          a.at("spl").get<double>(), a.at("n").get<std::size_t>()};
    const auto& k = j.at("kinematics");
    record.kinematics.rpe_t = k.at("rpe_t_m").get<double>();
    record.kinematics.rpe_r = k.at("rpe_r_rad").get<double>();
    record.kinematics.motion_fidelity = k.at("motion_fidelity").get<double>();
    record.kinematics.episodes = k.at("episodes").get<std::size_t>();
    record.kinematics.available = k.at("available").get<bool>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("load_run: ") + e.what());
  }
  record.results = load_results_dir((fs::path(dir) / "episodes").string());
  return record;
}

std::vector<ctrl::EpisodeResult> load_results_dir(const std::string& dir) {
  fs::path p(dir);
  if (fs::is_directory(p / "episodes")) p /= "episodes";
  if (!fs::is_directory(p)) throw Error("results: not a directory: " + dir);
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(p))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  std::vector<ctrl::EpisodeResult> results;
  results.reserve(files.size());
  for (const auto& f : files) results.push_back(ctrl::load_episode_result(f));
  std::sort(results.begin(), results.end(),
            [](const ctrl::EpisodeResult& a, const ctrl::EpisodeResult& b) {
              return a.episode_index < b.episode_index;
            });
  return results;
}

std::vector<std::string> list_input_logs(const std::string& dir) {
  if (!fs::is_directory(dir)) throw Error("datapipe: not a directory: " + dir);
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

pipe::ManifestSummary run_datapipe(const std::vector<std::string>& input_files,
                                   const PipelineConfig& cfg, const std::string& out_manifest) {
  if (cfg.clip_len < 2) throw ValidationError("datapipe: clip_len must be >= 2");
  if (cfg.hop < 1) throw ValidationError("datapipe: hop must be >= 1");
  std::vector<pipe::Clip> clips;
  for (const auto& file : input_files) {
    pipe::FrameLog log;
    try {
      std::ifstream in(file);
      if (!in) throw Error("cannot open");
      std::stringstream ss;
      ss << in.rdbuf();
      const std::string text = ss.str();
      json j = json::parse(text, nullptr, false);
      if (j.is_discarded()) throw ValidationError("not valid JSON");
      if (j.is_object() && j.value("type", "") == "episode_result") {
        log = pipe::frame_log_from_episode(ctrl::episode_result_from_json_string(text),
                                           fs::path(file).stem().string());
      } else {
        log = pipe::frame_log_from_json_string(text);
        if (log.source_id.empty()) log.source_id = fs::path(file).stem().string();
      }
    } catch (const Error& e) {
      throw ValidationError("datapipe: " + file + ": " + e.what());
    }
    auto raw = pipe::segment_clips(log, cfg.clip_len, cfg.hop);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      raw[i].scene_tags = cfg.scene_tags;
      try {
        pipe::annotate(raw[i], cfg.idm, cfg.thresholds);
      } catch (const Error& e) {
        throw ValidationError("datapipe: " + file + ": clip " + std::to_string(i) + ": " +
                              e.what());
      }
      clips.push_back(std::move(raw[i]));
    }
  }
  if (cfg.mirror_augment) {
    const std::size_t n = clips.size();
    clips.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) clips.push_back(pipe::mirror(clips[i]));
  }
  return pipe::build_manifest(clips, out_manifest, cfg.frames_mode);
}

std::vector<std::string> emit_report(const RunRecord& record, ReportFormat format,
                                     const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const std::string method =
      std::string(label(record.config.planner)) + "/" + label(record.config.experts);
  std::vector<std::string> written;

  if (format == ReportFormat::Csv) {
    const fs::path path = fs::path(out_dir) / "report.csv";
    std::ofstream out(path);
    if (!out) throw Error("report: cannot write " + path.string());
    out << "method,goal_threshold,episodes,TL,NE,OS,SR,SPL,incomplete\n";
    out << method << "," << format_double(record.config.episode.success_threshold) << ","
        << record.aggregate.n << "," << format_double(record.aggregate.tl) << ","
        << format_double(record.aggregate.ne) << "," << format_double(record.aggregate.os) << ","
        << format_double(record.aggregate.sr) << "," << format_double(record.aggregate.spl) << ","
        << (record.complete ? 0 : 1) << "\n";
    written.push_back(path.string());
  } else if (format == ReportFormat::Json) {
    const fs::path path = fs::path(out_dir) / "report.json";
    std::ofstream out(path);
    if (!out) throw Error("report: cannot write " + path.string());
    json j;
    j["method"] = method;
    j["goal_threshold"] = record.config.episode.success_threshold;
    j["config_hash"] = record.hash;
    j["tool_version"] = record.tool_version;
    j["incomplete"] = !record.complete;
    j["aggregate"] = aggregate_to_json(record.aggregate);
    j["kinematics"] = kinematics_to_json(record.kinematics);
    out << j.dump(2) << "\n";
    written.push_back(path.string());
  } else {
    const fs::path path = fs::path(out_dir) / "plotdata.json";
    std::ofstream out(path);
    if (!out) throw Error("report: cannot write " + path.string());
    json eps = json::array();
    for (const auto& r : record.results) {
      json poly = json::array();
      for (const auto& p : r.trace.poses) poly.push_back({p.x, p.y});
      eps.push_back({{"episode_index", r.episode_index},
                     {"success", r.success},
                     {"goal", {r.goal_x, r.goal_y}},
                     {"polyline", std::move(poly)}});
    }
    json j;
    j["method"] = method;
    j["incomplete"] = !record.complete;
    j["episodes"] = std::move(eps);
    out << j.dump() << "\n";
    written.push_back(path.string());
  }
  return written;
}

}  // namespace visnav::bench
