#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "cfear/errors.hpp"
#include "cfear/filtering.hpp"
#include "cfear/motion.hpp"
#include "cfear/simulator.hpp"

using namespace cfear;

namespace {

SimConfig quiet_config() {
  SimConfig cfg;
  cfg.na = 400;
  cfg.nr = 1000;
  cfg.gamma = 0.1;
  cfg.sweep_duration = 0.25;
  cfg.speckle_sigma = 0.0;
  cfg.noise_floor_mean = 0.0;
  cfg.multipath_gain = 0.0;
  cfg.beam_width = 0.0;
  return cfg;
}

World crossroad_world() {
  World world;
  world.segments.push_back({{20.0, -60.0}, {20.0, 60.0}, 1.0});
  world.segments.push_back({{-30.0, -40.0}, {-30.0, 40.0}, 0.8});
  world.segments.push_back({{-40.0, 30.0}, {40.0, 30.0}, 1.2});
  for (int i = 0; i < 8; ++i)
    world.point_reflectors.push_back({{-15.0 + 4.0 * i, -20.0}, 1.5});
  world.bounds = {-100, -100, 100, 100};
  return world;
}

}  // namespace

TEST_CASE("empty world with zero noise renders an all-zero scan") {
  World world;
  const PolarScan scan = render_scan(world, Pose2::identity(), Velocity2::zero(), quiet_config());
  for (uint16_t v : scan.intensities) CHECK(v == 0);
}

TEST_CASE("single point reflector lands in its bin") {
  World world;
  world.point_reflectors.push_back({{10.0, 0.0}, 1.0});
  world.bounds = {-50, -50, 50, 50};
  const SimConfig cfg = quiet_config();
  const PolarScan scan = render_scan(world, Pose2::identity(), Velocity2::zero(), cfg);

  const int expected_bin = static_cast<int>(std::lround(10.0 / cfg.gamma));
  uint16_t best = 0;
  int best_a = -1, best_c = -1;
  for (int a = 0; a < scan.na; ++a)
    for (int c = 0; c < scan.nr; ++c)
      if (scan.at(a, c) > best) {
        best = scan.at(a, c);
        best_a = a;
        best_c = c;
      }
  CHECK(best_a == 0);
  CHECK(best_c + 1 == expected_bin);
  CHECK(best > 0);
}

TEST_CASE("same seed renders bit-identical sequences") {
  const World world = crossroad_world();
  SimConfig cfg = quiet_config();
  cfg.noise_floor_mean = 30.0;
  cfg.speckle_sigma = 200.0;
  cfg.multipath_gain = 0.1;
  cfg.seed = 99;
  SimTrajectory traj;
  traj.line(10.0, 5.0);
  const SimSequence a = generate_sequence(world, traj, cfg);
  const SimSequence b = generate_sequence(world, traj, cfg);
  REQUIRE(a.scans.size() == b.scans.size());
  for (size_t i = 0; i < a.scans.size(); ++i)
    CHECK(a.scans[i].intensities == b.scans[i].intensities);

  cfg.seed = 100;
  const SimSequence c = generate_sequence(world, traj, cfg);
  bool any_different = false;
  for (size_t i = 0; i < a.scans.size() && !any_different; ++i)
    any_different = a.scans[i].intensities != c.scans[i].intensities;
  CHECK(any_different);
}

TEST_CASE("static zero-noise render ignores the sweep duration") {
  const World world = crossroad_world();
  SimConfig cfg = quiet_config();
  const PolarScan a = render_scan(world, Pose2(1.0, 2.0, 0.3), Velocity2::zero(), cfg);
  cfg.sweep_duration = 1.7;
  const PolarScan b = render_scan(world, Pose2(1.0, 2.0, 0.3), Velocity2::zero(), cfg);
  CHECK(a.intensities == b.intensities);
}

TEST_CASE("zero-noise detections match the ray-cast oracle") {
  const World world = crossroad_world();
  const SimConfig cfg = quiet_config();
  const Pose2 pose(2.0, -1.0, 0.2);
  const double step = 2.0 * M_PI / cfg.na;
  const PolarScan scan = render_scan(world, pose, Velocity2::zero(), cfg);
  const auto detections = k_strongest(scan, {4, 1.0});
  REQUIRE(!detections.empty());

  // True landmark ranges along one azimuth: the first wall hit plus every
  // unoccluded reflector falling in that bin (reflectors do not occlude walls).
  auto truth_ranges = [&](int a) {
    std::vector<double> out;
    const double angle = pose.theta + a * step;
    const double wall = cast_ray(world, pose.translation(), angle);
    if (wall > 0.0) out.push_back(wall);
    for (const PointReflector& p : world.point_reflectors) {
      const Eigen::Vector2d d = p.pos - pose.translation();
      const double bearing = std::atan2(d.y(), d.x()) - pose.theta;
      if (std::abs(wrap_angle(bearing - a * step)) > 0.5 * step) continue;
      const double wall_block = cast_ray(world, pose.translation(), std::atan2(d.y(), d.x()));
      if (wall_block > 0.0 && wall_block < d.norm() - 1e-9) continue;
      out.push_back(d.norm());
    }
    return out;
  };

  // Every detection corresponds to real geometry within one range bin,
  // allowing one azimuth bin of slack.
  for (const Detection& det : detections) {
    bool explained = false;
    for (int da = -1; da <= 1 && !explained; ++da) {
      for (double truth : truth_ranges((det.azimuth + da + cfg.na) % cfg.na))
        if (std::abs(det.range_bin * cfg.gamma - truth) <= 1.5 * cfg.gamma) {
          explained = true;
          break;
        }
    }
    CHECK(explained);
  }

  // And the first hit of every azimuth is among its detections.
  for (int a = 0; a < cfg.na; ++a) {
    const auto truths = truth_ranges(a);
    if (truths.empty()) continue;
    const double first = *std::min_element(truths.begin(), truths.end());
    if (first > scan.max_range() - 1.0) continue;
    bool found = false;
    for (const Detection& det : detections)
      if (det.azimuth == a && std::abs(det.range_bin * cfg.gamma - first) <= 1.5 * cfg.gamma)
        found = true;
    CHECK(found);
  }
}

TEST_CASE("motion distortion is exactly inverted by compensation") {
  World world;
  world.segments.push_back({{20.0, -100.0}, {20.0, 100.0}, 1.0});
  world.bounds = {-50, -150, 50, 150};
  const SimConfig cfg = quiet_config();
  const Velocity2 v(10.0, 0.0, 0.0);
  const PolarScan scan = render_scan(world, Pose2::identity(), v, cfg);
  const PointCloud raw = to_cartesian(scan, k_strongest(scan, {1, 1.0}));
  REQUIRE(raw.size() > 50);

  auto rms_off_wall = [](const PointCloud& cloud) {
    double sum = 0.0;
    for (const RadarPoint& p : cloud.points) {
      const double d = p.pos.x() - 20.0;
      sum += d * d;
    }
    return std::sqrt(sum / cloud.size());
  };
  const PointCloud fixed = compensate(raw, {v, cfg.sweep_duration});
  const double rms_raw = rms_off_wall(raw);
  const double rms_fixed = rms_off_wall(fixed);
  CHECK(rms_fixed < cfg.gamma);           // within one range bin
  CHECK(rms_fixed < 0.1 * rms_raw);       // at least a 90% reduction
}

TEST_CASE("multipath ghosts mirror about the wall") {
  World world;
  world.segments.push_back({{10.0, -50.0}, {10.0, 50.0}, 1.0});
  world.point_reflectors.push_back({{-5.0, 0.0}, 2.0});
  world.bounds = {-60, -60, 60, 60};
  SimConfig cfg = quiet_config();
  cfg.multipath_gain = 0.5;
  const PolarScan scan = render_scan(world, Pose2::identity(), Velocity2::zero(), cfg);
  // Reflector at (-5,0) mirrored about x=10 appears at path length 10+15=25 on azimuth 0.
  const int ghost_bin = static_cast<int>(std::lround(25.0 / cfg.gamma));
  CHECK(scan.intensity(0, ghost_bin) > 0);

  cfg.multipath_gain = 0.0;
  const PolarScan clean = render_scan(world, Pose2::identity(), Velocity2::zero(), cfg);
  CHECK(clean.intensity(0, ghost_bin) == 0);
}

TEST_CASE("beam spread leaks attenuated returns into adjacent azimuths") {
  World world;
  world.point_reflectors.push_back({{15.0, 0.0}, 1.0});
  world.bounds = {-50, -50, 50, 50};
  SimConfig cfg = quiet_config();
  cfg.beam_width = 2.0 * (2.0 * M_PI / cfg.na);
  const PolarScan scan = render_scan(world, Pose2::identity(), Velocity2::zero(), cfg);
  const int bin = static_cast<int>(std::lround(15.0 / cfg.gamma));
  CHECK(scan.intensity(0, bin) > scan.intensity(1, bin));
  CHECK(scan.intensity(1, bin) > 0);
  CHECK(scan.intensity(scan.na - 1, bin) > 0);
}

TEST_CASE("trajectory generation examples") {
  const World world = crossroad_world();
  const SimConfig cfg = quiet_config();

  SUBCASE("stationary trajectory produces identical ground truth") {
    SimTrajectory traj;
    traj.hold(2.5);
    const SimSequence seq = generate_sequence(world, traj, cfg);
    REQUIRE(seq.scans.size() == 10);
    REQUIRE(seq.ground_truth.size() == 10);
    for (const TimedPose& tp : seq.ground_truth) {
      CHECK(tp.pose.x == 0.0);
      CHECK(tp.pose.y == 0.0);
      CHECK(tp.pose.theta == 0.0);
    }
    CHECK(seq.scans[0].intensities == seq.scans[9].intensities);  // zero noise
  }
  SUBCASE("straight line spacing") {
    SimTrajectory traj;
    traj.line(100.0, 5.0);
    World big = world;
    big.bounds = {-10, -10, 200, 10};
    const SimSequence seq = generate_sequence(big, traj, cfg);
    REQUIRE(seq.scans.size() == 80);
    for (size_t i = 1; i < seq.ground_truth.size(); ++i) {
      const double gap = (seq.ground_truth[i].pose.translation() -
                          seq.ground_truth[i - 1].pose.translation())
                             .norm();
      CHECK(gap == doctest::Approx(1.25).epsilon(1e-12));
    }
  }
  SUBCASE("closed rectangle returns to the start") {
    SimTrajectory traj;
    for (int side = 0; side < 4; ++side) {
      traj.line(40.0, 5.0);
      traj.turn(90.0 * M_PI / 180, 30.0 * M_PI / 180);
    }
    traj.hold(0.25);
    const Pose2 end = traj.pose_at(traj.duration());
    CHECK(end.translation().norm() < 1e-9);
    CHECK(std::abs(end.theta) < 1e-9);

    World big = world;
    big.bounds = {-100, -100, 100, 100};
    const SimSequence seq = generate_sequence(big, traj, cfg);
    const Pose2 last = seq.ground_truth.back().pose;
    const Pose2 first = seq.ground_truth.front().pose;
    CHECK((last.translation() - first.translation()).norm() < 1e-9);
    CHECK(std::abs(wrap_angle(last.theta - first.theta)) < 1e-9);
  }
  SUBCASE("leaving the bounds raises an error with the timestamp") {
    SimTrajectory traj;
    traj.line(1000.0, 5.0);
    try {
      generate_sequence(world, traj, cfg);
      FAIL("expected InputError");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("t=") != std::string::npos);
    }
  }
}

TEST_CASE("render_scan rejects poses outside the bounds") {
  World world = crossroad_world();
  CHECK_THROWS_AS(render_scan(world, Pose2(500.0, 0.0, 0.0), Velocity2::zero(), quiet_config()),
                  InputError);
}

TEST_CASE("arc integration closes a full circle") {
  SimTrajectory traj;
  const double radius = 20.0, speed = 5.0;
  traj.arc(2.0 * M_PI * radius, speed, speed / radius);
  const Pose2 end = traj.pose_at(traj.duration());
  CHECK(end.translation().norm() < 1e-6);
  CHECK(std::abs(end.theta) < 1e-9);
}

TEST_CASE("world files round trip and report parse errors") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "cfear_world_test.txt").string();
  const World world = crossroad_world();
  write_world(world, path);
  const World back = read_world(path);
  REQUIRE(back.segments.size() == world.segments.size());
  REQUIRE(back.point_reflectors.size() == world.point_reflectors.size());
  CHECK(back.bounds.xmin == world.bounds.xmin);
  for (size_t i = 0; i < world.segments.size(); ++i) {
    CHECK((back.segments[i].a - world.segments[i].a).norm() == 0.0);
    CHECK(back.segments[i].reflectivity == world.segments[i].reflectivity);
  }

  std::ofstream os(path);
  os << "# fine\nSEG 0 0 1 1 1.0\nPT broken\n";
  os.close();
  try {
    read_world(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line_number == 3);
  }
  std::remove(path.c_str());
}
