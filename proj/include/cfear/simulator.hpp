#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfear/geometry.hpp"
#include "cfear/radar_io.hpp"

namespace cfear {

struct WallSegment {
  Point2 a{0.0, 0.0};
  Point2 b{0.0, 0.0};
  double reflectivity = 1.0;
};

struct PointReflector {
  Point2 pos{0.0, 0.0};
  double reflectivity = 1.0;
};

struct Bounds {
  double xmin = -1000.0, ymin = -1000.0, xmax = 1000.0, ymax = 1000.0;
  bool contains(const Point2& p) const {
    return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax;
  }
};

/// Landmark world the synthetic radar observes: line-segment walls and
/// isolated point reflectors.
struct World {
  std::vector<WallSegment> segments;
  std::vector<PointReflector> point_reflectors;
  Bounds bounds;
};

/// Plain-text world file: `SEG x1 y1 x2 y2 refl`, `PT x y refl`, optional
/// `BOUNDS xmin ymin xmax ymax`, '#' comments.
World read_world(const std::string& path);
void write_world(const World& world, const std::string& path);

struct SimConfig {
  int na = 400;
  int nr = 1000;
  double gamma = 0.1;               // meters per range bin
  double sweep_duration = 0.25;     // seconds
  double base_intensity = 4000.0;   // peak at 1 m for reflectivity 1
  double range_falloff_exponent = 0.7;
  double speckle_sigma = 0.0;       // 1-sigma multiplicative deviation at base intensity
  double noise_floor_mean = 0.0;    // mean of the additive exponential floor
  double multipath_gain = 0.0;      // [0,1]; 0 disables ghost echoes
  double beam_width = 0.0;          // radians; 0 renders pencil beams
  uint64_t seed = 0;
};

/// Renders one polar sweep from `pose_at_center` while moving with `velocity`.
/// Each azimuth is ray-cast from the pose the sensor occupies at that
/// azimuth's sample time, so a scan taken in motion is distorted exactly as
/// the constant-velocity correction in compensate() assumes.
/// Throws InputError when the pose is outside the world bounds.
PolarScan render_scan(const World& world, const Pose2& pose_at_center,
                      const Velocity2& velocity, const SimConfig& cfg);

/// Piecewise-constant-twist path: each segment holds one body velocity for a
/// duration. Poses integrate the twist exactly, so arcs and closed loops are
/// exact.
class SimTrajectory {
 public:
  explicit SimTrajectory(const Pose2& start = Pose2::identity()) : start_(start) {}

  SimTrajectory& line(double length, double speed);
  SimTrajectory& arc(double length, double speed, double omega);
  SimTrajectory& turn(double angle, double rate);
  SimTrajectory& hold(double duration);

  double duration() const;
  Pose2 pose_at(double t) const;
  Velocity2 velocity_at(double t) const;
  const Pose2& start() const { return start_; }

 private:
  struct Segment {
    double duration;
    Velocity2 twist;
  };
  Pose2 start_;
  std::vector<Segment> segments_;
};

/// Exact pose advance under a constant body twist for time h.
Pose2 integrate_twist(const Pose2& pose, const Velocity2& twist, double h);

struct SimSequence {
  std::vector<PolarScan> scans;
  Trajectory ground_truth;
};

/// One scan per sweep_duration tick starting at t = 0, with the ground-truth
/// pose recorded at each sweep center. Deterministic for a fixed seed.
/// Throws InputError (with the offending timestamp) if the path leaves the
/// world bounds.
SimSequence generate_sequence(const World& world, const SimTrajectory& traj,
                              const SimConfig& cfg);

/// First wall or reflector hit along a ray; used by tests as a geometric
/// oracle. Returns a negative range when nothing is hit.
double cast_ray(const World& world, const Point2& origin, double angle);

/// Plain-text path spec, one directive per line:
///   START x y theta_deg
///   LINE length speed
///   ARC length speed omega_deg_per_s
///   TURN angle_deg rate_deg_per_s
///   HOLD seconds
SimTrajectory read_trajectory_spec(const std::string& path);

}  // namespace cfear
