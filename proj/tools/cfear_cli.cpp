// Command-line front end: run odometry over a scan directory, generate
// synthetic datasets, and evaluate trajectories against ground truth.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "cfear/errors.hpp"
#include "cfear/evaluation.hpp"
#include "cfear/odometry.hpp"
#include "cfear/parallel.hpp"
#include "cfear/presets.hpp"
#include "cfear/simulator.hpp"

namespace fs = std::filesystem;
using namespace cfear;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitData = 3;

struct OdometryArgs {
  std::string scan_dir;
  std::string out_traj;
  std::string preset = "cfear-3";
  std::string config_file;
  std::string kitti_out;
  bool print_config = false;
};

struct SimulateArgs {
  std::string world_file;
  std::string traj_spec;
  std::string out_dir;
  uint64_t seed = 0;
  SimConfig sim;
};

struct EvaluateArgs {
  std::string est_path;
  std::string gt_path;
  std::vector<double> segment_lengths = {100, 200, 300, 400, 500, 600, 700, 800};
  std::string csv_out;
};

OdometryConfig resolve_config(const OdometryArgs& args) {
  if (!args.config_file.empty()) return load_config_file(args.config_file);
  return make_preset(args.preset);
}

int run_odometry(const OdometryArgs& args) {
  const OdometryConfig cfg = resolve_config(args);
  if (args.print_config) {
    std::cout << dump_config(cfg);
    return kExitOk;
  }

  if (!fs::is_directory(args.scan_dir)) {
    std::cerr << "error: not a directory: " << args.scan_dir << "\n";
    return kExitIo;
  }
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(args.scan_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".cfrad")
      paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  if (paths.empty())
    std::cerr << "warning: no .cfrad scans in " << args.scan_dir << "\n";

  std::vector<PolarScan> scans;
  scans.reserve(paths.size());
  for (const std::string& p : paths) scans.push_back(read_scan(p));

  const SequenceResult result = run_sequence(scans, cfg);
  write_trajectory(result.trajectory, args.out_traj);
  write_covariances(result.trajectory, args.out_traj + ".cov");
  if (!args.kitti_out.empty()) write_kitti_poses(result.trajectory, args.kitti_out);

  char timing[512];
  std::snprintf(timing, sizeof(timing),
                "stage timing  mean [ms]   max [ms]\n"
                "  filter      %9.3f  %9.3f\n"
                "  compensate  %9.3f  %9.3f\n"
                "  features    %9.3f  %9.3f\n"
                "  register    %9.3f  %9.3f\n"
                "  total       %9.3f  %9.3f\n",
                result.mean_timing.filter * 1e3, result.max_timing.filter * 1e3,
                result.mean_timing.compensate * 1e3, result.max_timing.compensate * 1e3,
                result.mean_timing.features * 1e3, result.max_timing.features * 1e3,
                result.mean_timing.registration * 1e3, result.max_timing.registration * 1e3,
                result.mean_timing.total * 1e3, result.max_timing.total * 1e3);
  std::printf("%zu scans -> %s (%d fallbacks)\n%s", scans.size(), args.out_traj.c_str(),
              result.fallback_count, timing);
  std::ofstream timing_file(args.out_traj + ".timing.txt");
  timing_file << timing;
  return kExitOk;
}

int run_simulate(const SimulateArgs& args) {
  const World world = read_world(args.world_file);
  const SimTrajectory traj = read_trajectory_spec(args.traj_spec);
  SimConfig cfg = args.sim;
  cfg.seed = args.seed;
  const SimSequence seq = generate_sequence(world, traj, cfg);

  fs::create_directories(args.out_dir);
  char name[64];
  for (size_t i = 0; i < seq.scans.size(); ++i) {
    std::snprintf(name, sizeof(name), "scan_%06zu.cfrad", i);
    write_scan(seq.scans[i], (fs::path(args.out_dir) / name).string());
  }
  write_trajectory(seq.ground_truth, (fs::path(args.out_dir) / "gt.traj").string());
  std::printf("%zu scans + gt.traj -> %s\n", seq.scans.size(), args.out_dir.c_str());
  return kExitOk;
}

int run_evaluate(const EvaluateArgs& args) {
  const Trajectory est = read_trajectory(args.est_path);
  const Trajectory gt = read_trajectory(args.gt_path);
  if (est.size() != gt.size()) {
    std::cerr << "error: trajectory lengths differ: " << est.size() << " (estimate) vs "
              << gt.size() << " (ground truth)\n";
    return kExitData;
  }
  const DriftReport drift = kitti_drift(est, gt, args.segment_lengths);
  const RpeReport rpe_report = rpe(est, gt);
  const double ate_value = ate(est, gt);
  std::cout << format_report(drift, rpe_report, ate_value);
  if (!args.csv_out.empty()) {
    std::ofstream os(args.csv_out);
    if (!os) {
      std::cerr << "error: cannot write " << args.csv_out << "\n";
      return kExitIo;
    }
    os << format_report_csv(drift, rpe_report, ate_value);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CFEAR-style spinning-radar odometry"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker threads for per-scan stages")->capture_default_str();

  OdometryArgs odo;
  CLI::App* cmd_odo = app.add_subcommand("odometry", "estimate a trajectory from a scan directory");
  cmd_odo->add_option("scan_dir", odo.scan_dir, "directory of .cfrad scans, lexicographic order");
  cmd_odo->add_option("-o,--out", odo.out_traj, "output .traj path")->default_val("odometry.traj");
  cmd_odo->add_option("--preset", odo.preset, "cfear-1|cfear-2|cfear-3|cfear-3-s50|baseline")
      ->capture_default_str();
  cmd_odo->add_option("--config", odo.config_file, "key=value config file (overrides --preset)");
  cmd_odo->add_option("--kitti", odo.kitti_out, "also export KITTI 3x4 poses");
  cmd_odo->add_flag("--print-config", odo.print_config, "dump the resolved config and exit");

  SimulateArgs sim;
  CLI::App* cmd_sim = app.add_subcommand("simulate", "render a synthetic scan sequence");
  cmd_sim->add_option("world", sim.world_file, "world description file")->required();
  cmd_sim->add_option("--traj", sim.traj_spec, "trajectory spec file")->required();
  cmd_sim->add_option("-o,--out", sim.out_dir, "output directory")->required();
  cmd_sim->add_option("--seed", sim.seed, "RNG seed")->capture_default_str();
  cmd_sim->add_option("--na", sim.sim.na)->capture_default_str();
  cmd_sim->add_option("--nr", sim.sim.nr)->capture_default_str();
  cmd_sim->add_option("--gamma", sim.sim.gamma, "meters per range bin")->capture_default_str();
  cmd_sim->add_option("--sweep-duration", sim.sim.sweep_duration)->capture_default_str();
  cmd_sim->add_option("--base-intensity", sim.sim.base_intensity)->capture_default_str();
  cmd_sim->add_option("--falloff", sim.sim.range_falloff_exponent)->capture_default_str();
  cmd_sim->add_option("--speckle", sim.sim.speckle_sigma)->capture_default_str();
  cmd_sim->add_option("--noise-floor", sim.sim.noise_floor_mean)->capture_default_str();
  cmd_sim->add_option("--multipath", sim.sim.multipath_gain)->capture_default_str();
  cmd_sim->add_option("--beam-width", sim.sim.beam_width, "radians")->capture_default_str();

  EvaluateArgs eval;
  CLI::App* cmd_eval = app.add_subcommand("evaluate", "compare a trajectory against ground truth");
  cmd_eval->add_option("estimate", eval.est_path)->required();
  cmd_eval->add_option("ground_truth", eval.gt_path)->required();
  cmd_eval->add_option("--segments", eval.segment_lengths, "drift segment lengths in meters");
  cmd_eval->add_option("--csv", eval.csv_out, "also write a machine-readable report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  set_num_threads(threads);
  try {
    if (cmd_odo->parsed()) return run_odometry(odo);
    if (cmd_sim->parsed()) return run_simulate(sim);
    if (cmd_eval->parsed()) return run_evaluate(eval);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const TruncationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
