// Command line front end: benchmark runs, the auto-labeling pipeline, metric
// evaluation, report emission, and world generation.
#include <csignal>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "visnav/bench.hpp"
#include "visnav/errors.hpp"

namespace {

// Exit codes: 0 success, 1 usage, 2 validation, 3 runtime.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

using namespace visnav;

void apply_planner_flag(bench::BenchmarkConfig& cfg, const std::string& planner) {
  if (planner == "oracle") {
    cfg.planner = bench::PlannerMode::OracleNoiseless;
  } else if (planner == "oracle-noisy") {
    cfg.planner = bench::PlannerMode::OracleWithErrors;
  } else if (planner.rfind("external:", 0) == 0) {
    cfg.planner = bench::PlannerMode::External;
    cfg.external_endpoint = planner.substr(9);
  } else {
    throw CLI::ValidationError("--planner", "expected oracle|oracle-noisy|external:<addr>");
  }
}

void print_aggregate(const metrics::Aggregate& a, double threshold, bool complete) {
  std::printf("method TL NE OS SR SPL (goal threshold %.2f m, %zu episodes%s)\n", threshold, a.n,
              complete ? "" : ", INCOMPLETE");
  std::printf("run %.3f %.3f %.3f %.3f %.3f\n", a.tl, a.ne, a.os, a.sr, a.spl);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Imagined-plan navigation stack: benchmark, data pipeline and reports"};
  app.require_subcommand(1);

  // ---- bench run ----
  auto* bench_cmd = app.add_subcommand("bench", "Benchmark orchestration");
  bench_cmd->require_subcommand(1);
  auto* bench_run = bench_cmd->add_subcommand("run", "Run a benchmark configuration");
  std::string bench_config_path;
  std::string bench_planner;
  std::string bench_experts;
  std::string bench_out;
  std::uint64_t bench_seed = 0;
  bool bench_seed_set = false;
  int bench_threads = 0;
  bench_run->add_option("--config", bench_config_path, "Benchmark config JSON");
  bench_run->add_option("--seed", bench_seed, "Override the global seed")
      ->each([&](const std::string&) { bench_seed_set = true; });
  bench_run->add_option("--planner", bench_planner, "oracle|oracle-noisy|external:<addr>");
  bench_run->add_option("--experts", bench_experts, "acmoe|single");
  bench_run->add_option("--out", bench_out, "Output directory (overrides config)");
  bench_run->add_option("--threads", bench_threads, "Worker threads (overrides config)");

  // ---- datapipe run ----
  auto* pipe_cmd = app.add_subcommand("datapipe", "Auto-labeling pipeline");
  pipe_cmd->require_subcommand(1);
  auto* pipe_run = pipe_cmd->add_subcommand("run", "Label input logs into a clip manifest");
  std::string pipe_in;
  std::string pipe_out;
  int pipe_clip_len = 121;
  int pipe_hop = 121;
  int pipe_stride = 4;
  bool pipe_no_mirror = false;
  bool pipe_inline_frames = false;
  std::vector<std::string> pipe_tags;
  pipe_run->add_option("--in", pipe_in, "Directory of input logs (*.json)")->required();
  pipe_run->add_option("--out", pipe_out, "Output manifest path (JSON Lines)")->required();
  pipe_run->add_option("--clip-len", pipe_clip_len, "Frames per clip");
  pipe_run->add_option("--hop", pipe_hop, "Frames between clip starts");
  pipe_run->add_option("--stride", pipe_stride, "Decode stride");
  pipe_run->add_flag("--no-mirror", pipe_no_mirror, "Disable mirroring augmentation");
  pipe_run->add_flag("--inline-frames", pipe_inline_frames, "Embed frames in the manifest");
  pipe_run->add_option("--tag", pipe_tags, "Scene tag(s) appended to captions");

  // ---- metrics eval ----
  auto* metrics_cmd = app.add_subcommand("metrics", "Metric evaluation");
  metrics_cmd->require_subcommand(1);
  auto* metrics_eval = metrics_cmd->add_subcommand("eval", "Aggregate episode results");
  std::string metrics_dir;
  metrics_eval->add_option("--results", metrics_dir, "Run directory or episodes directory")
      ->required();

  // ---- report ----
  auto* report_cmd = app.add_subcommand("report", "Emit report files for a finished run");
  std::string report_run;
  std::string report_format = "csv";
  std::string report_out;
  report_cmd->add_option("--run", report_run, "Run directory (with run.json)")->required();
  report_cmd->add_option("--format", report_format, "csv|json|plotdata");
  report_cmd->add_option("--out", report_out, "Output directory (defaults to the run dir)");

  // ---- world gen ----
  auto* world_cmd = app.add_subcommand("world", "World utilities");
  world_cmd->require_subcommand(1);
  auto* world_gen = world_cmd->add_subcommand("gen", "Generate a world file");
  std::uint64_t world_seed = 1;
  std::string world_out;
  sim::WorldParams world_params;
  world_gen->add_option("--seed", world_seed, "Generation seed")->required();
  world_gen->add_option("--out", world_out, "Output path")->required();
  world_gen->add_option("--width", world_params.width_cells, "Grid width in cells");
  world_gen->add_option("--height", world_params.height_cells, "Grid height in cells");
  world_gen->add_option("--resolution", world_params.resolution, "Meters per cell");
  world_gen->add_option("--density", world_params.obstacle_density, "Obstacle density [0, 0.4]");
  world_gen->add_option("--landmarks", world_params.n_landmarks, "Landmark count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (bench_run->parsed()) {
      bench::BenchmarkConfig cfg;
      if (!bench_config_path.empty()) cfg = bench::load_config(bench_config_path);
      if (bench_seed_set) cfg.global_seed = bench_seed;
      if (!bench_planner.empty()) apply_planner_flag(cfg, bench_planner);
      if (!bench_experts.empty()) cfg.experts = bench::expert_mode_from_label(bench_experts);
      if (!bench_out.empty()) cfg.output_dir = bench_out;
      if (bench_threads > 0) cfg.threads = bench_threads;
      const auto record = bench::run_benchmark(cfg);
      print_aggregate(record.aggregate, cfg.episode.success_threshold, record.complete);
      if (!cfg.output_dir.empty()) std::printf("run written to %s\n", cfg.output_dir.c_str());
      return record.complete ? kExitOk : kExitRuntime;
    }
    if (pipe_run->parsed()) {
      bench::PipelineConfig cfg;
      cfg.clip_len = pipe_clip_len;
      cfg.hop = pipe_hop;
      cfg.idm.stride = pipe_stride;
      cfg.mirror_augment = !pipe_no_mirror;
      cfg.frames_mode = pipe_inline_frames ? pipe::FramesMode::Inline : pipe::FramesMode::Sidecar;
      cfg.scene_tags = pipe_tags;
      const auto summary =
          bench::run_datapipe(bench::list_input_logs(pipe_in), cfg, pipe_out);
      std::printf("manifest %s: %zu clips\n", summary.manifest_path.c_str(), summary.total);
      for (const auto& [primitive, count] : summary.per_primitive)
        std::printf("  %-16s %zu\n", primitive.c_str(), count);
      return kExitOk;
    }
    if (metrics_eval->parsed()) {
      const auto results = bench::load_results_dir(metrics_dir);
      if (results.empty()) throw ValidationError("metrics eval: no episode results in " + metrics_dir);
      const auto agg = metrics::aggregate(results);
      std::printf("episodes,goal_threshold,TL,NE,OS,SR,SPL\n");
      std::printf("%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", agg.n, results.front().success_threshold,
                  agg.tl, agg.ne, agg.os, agg.sr, agg.spl);
      return kExitOk;
    }
    if (report_cmd->parsed()) {
      const auto record = bench::load_run(report_run);
      const auto format = bench::report_format_from_label(report_format);
      const auto out_dir = report_out.empty() ? report_run : report_out;
      for (const auto& path : bench::emit_report(record, format, out_dir))
        std::printf("wrote %s\n", path.c_str());
      return kExitOk;
    }
    if (world_gen->parsed()) {
      const auto world = sim::World::generate(world_seed, world_params);
      world.save(world_out);
      std::printf("world written to %s (%dx%d cells, %zu landmarks)\n", world_out.c_str(),
                  world.width(), world.height(), world.landmarks().size());
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGPIPE, SIG_IGN);
  return run_cli(argc, argv);
}
