#include "cfear/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "cfear/errors.hpp"
#include "cfear/motion.hpp"
#include "cfear/parallel.hpp"

namespace cfear {

namespace {

struct RayHit {
  double range = -1.0;
  double reflectivity = 0.0;
  int segment = -1;  // index of the wall hit, -1 for reflectors
  bool valid() const { return range > 0.0; }
};

// Nearest intersection of ray origin + t*dir with a segment, t > 1e-9.
double ray_segment(const Point2& origin, const Eigen::Vector2d& dir, const WallSegment& seg) {
  const Eigen::Vector2d v = seg.b - seg.a;
  const Eigen::Vector2d w = origin - seg.a;
  const double denom = dir.x() * v.y() - dir.y() * v.x();
  if (std::abs(denom) < 1e-12) return -1.0;  // parallel
  const double t = (v.x() * w.y() - v.y() * w.x()) / denom;
  const double u = (dir.x() * w.y() - dir.y() * w.x()) / denom;
  if (t <= 1e-9 || u < 0.0 || u > 1.0) return -1.0;
  return t;
}

RayHit first_wall_hit(const World& world, const Point2& origin, const Eigen::Vector2d& dir) {
  RayHit hit;
  for (int s = 0; s < static_cast<int>(world.segments.size()); ++s) {
    const double t = ray_segment(origin, dir, world.segments[s]);
    if (t > 0.0 && (!hit.valid() || t < hit.range)) {
      hit.range = t;
      hit.reflectivity = world.segments[s].reflectivity;
      hit.segment = s;
    }
  }
  return hit;
}

// Point reflectors within capture_radius of the ray count as hits.
RayHit first_hit(const World& world, const Point2& origin, const Eigen::Vector2d& dir,
                 double capture_radius) {
  RayHit hit = first_wall_hit(world, origin, dir);
  for (const PointReflector& p : world.point_reflectors) {
    const Eigen::Vector2d d = p.pos - origin;
    const double along = d.dot(dir);
    if (along <= 1e-9) continue;
    const double perp = std::abs(d.x() * dir.y() - d.y() * dir.x());
    if (perp > capture_radius) continue;
    if (!hit.valid() || along < hit.range) {
      hit.range = along;
      hit.reflectivity = p.reflectivity;
      hit.segment = -1;
    }
  }
  return hit;
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class RowBuffer {
 public:
  explicit RowBuffer(int nr) : row_(nr, 0.0) {}

  // Max-combine deposit at `range`, spread over the two adjacent range bins.
  void splat(double range, double intensity, int nr, double gamma) {
    const int d0 = static_cast<int>(std::lround(range / gamma));
    for (int off = -1; off <= 1; ++off) {
      const int d = d0 + off;
      if (d < 1 || d > nr) continue;
      const double v = intensity * (off == 0 ? 1.0 : 0.5);
      row_[d - 1] = std::max(row_[d - 1], v);
    }
  }

  double& operator[](int c) { return row_[c]; }
  const std::vector<double>& values() const { return row_; }

 private:
  std::vector<double> row_;
};

}  // namespace

Pose2 integrate_twist(const Pose2& pose, const Velocity2& twist, double h) {
  const double theta = twist.omega * h;
  double tx, ty;
  if (std::abs(theta) < 1e-9) {
    tx = twist.vx * h;
    ty = twist.vy * h;
  } else {
    const double s = std::sin(theta), c = 1.0 - std::cos(theta);
    tx = (s * twist.vx - c * twist.vy) / twist.omega;
    ty = (c * twist.vx + s * twist.vy) / twist.omega;
  }
  return compose(pose, Pose2(tx, ty, theta));
}

PolarScan render_scan(const World& world, const Pose2& pose_at_center,
                      const Velocity2& velocity, const SimConfig& cfg) {
  if (!world.bounds.contains(pose_at_center.translation()))
    throw InputError("sensor pose outside world bounds");

  PolarScan scan(cfg.na, cfg.nr, cfg.gamma, cfg.sweep_duration, 0.0);
  const double step = 2.0 * M_PI / cfg.na;
  const double max_range = cfg.nr * cfg.gamma;
  const int spread = cfg.beam_width > 0.0
                         ? std::min(cfg.na / 2, static_cast<int>(std::ceil(cfg.beam_width / step)))
                         : 0;
  const double sigma = cfg.beam_width > 0.0 ? 0.5 * cfg.beam_width : 0.0;

  // Per-azimuth sensor poses. The sweep spins so that azimuth a is sampled at
  // stamp - time_offset(a): rendering then inverts exactly under compensate()
  // with the true velocity.
  std::vector<Pose2> poses(cfg.na);
  std::vector<Point2> origins(cfg.na);
  for (int a = 0; a < cfg.na; ++a) {
    const double dt = -time_offset(a, cfg.na, cfg.sweep_duration);
    poses[a] = compose(pose_at_center,
                       Pose2(dt * velocity.vx, dt * velocity.vy, dt * velocity.omega));
    origins[a] = poses[a].translation();
  }

  auto peak = [&](double reflectivity, double range) {
    return reflectivity * cfg.base_intensity / std::pow(std::max(range, 1.0), cfg.range_falloff_exponent);
  };

  std::vector<RowBuffer> rows(cfg.na, RowBuffer(cfg.nr));

  // Geometry pass. Each azimuth row collects its own ray's hits plus the
  // beam-spread leakage of neighboring rays, all rendered from the poses the
  // sensor occupies at the respective sample times.
  parallel_for(cfg.na, [&](size_t ai) {
    const int a = static_cast<int>(ai);
    RowBuffer& row = rows[a];
    const double ray_angle_local = a * step;

    for (int off = -spread; off <= spread; ++off) {
      const int src = ((a + off) % cfg.na + cfg.na) % cfg.na;
      const double gain = off == 0 ? 1.0 : std::exp(-0.5 * (off * step) * (off * step) / (sigma * sigma));
      const double world_angle = poses[src].theta + src * step;
      const Eigen::Vector2d dir(std::cos(world_angle), std::sin(world_angle));

      const RayHit hit = first_wall_hit(world, origins[src], dir);
      if (hit.valid() && hit.range <= max_range)
        row.splat(hit.range, gain * peak(hit.reflectivity, hit.range), cfg.nr, cfg.gamma);

      // Single-bounce ghost: mirror the ray off the first wall hit.
      if (hit.valid() && hit.segment >= 0 && cfg.multipath_gain > 0.0) {
        const WallSegment& seg = world.segments[hit.segment];
        Eigen::Vector2d wall = (seg.b - seg.a).normalized();
        const Eigen::Vector2d reflected = 2.0 * dir.dot(wall) * wall - dir;
        const Point2 origin2 = origins[src] + hit.range * dir;
        const RayHit second = first_hit(world, origin2, reflected.normalized(), 0.5);
        if (second.valid()) {
          const double total = hit.range + second.range;
          if (total <= max_range)
            row.splat(total, gain * cfg.multipath_gain * peak(second.reflectivity, total),
                      cfg.nr, cfg.gamma);
        }
      }
    }

    // Point reflectors splat into whichever azimuth bin they fall in, plus
    // beam-spread neighbors evaluated against this azimuth's own pose.
    for (const PointReflector& p : world.point_reflectors) {
      const Eigen::Vector2d d = p.pos - origins[a];
      const double range = d.norm();
      if (range < 1e-9 || range > max_range) continue;
      const double bearing = std::atan2(d.y(), d.x()) - poses[a].theta;
      const double diff = wrap_angle(bearing - ray_angle_local);
      const double reach = std::max(0.5 * step, cfg.beam_width);
      if (std::abs(diff) > reach) continue;
      const RayHit blocker = first_wall_hit(world, origins[a], d / range);
      if (blocker.valid() && blocker.range < range - 1e-9) continue;  // occluded
      const double gain =
          sigma > 0.0 ? std::exp(-0.5 * diff * diff / (sigma * sigma)) : 1.0;
      row.splat(range, gain * peak(p.reflectivity, range), cfg.nr, cfg.gamma);
    }
  });

  // Noise pass, one RNG stream per azimuth so rendering stays deterministic
  // under any thread count.
  parallel_for(cfg.na, [&](size_t ai) {
    const int a = static_cast<int>(ai);
    RowBuffer& row = rows[a];
    std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(static_cast<uint64_t>(a) + 1)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    const double speckle_rel = cfg.speckle_sigma / cfg.base_intensity;
    for (int c = 0; c < cfg.nr; ++c) {
      double v = row[c];
      if (cfg.speckle_sigma > 0.0 && v > 0.0)
        v *= std::max(0.0, 1.0 + speckle_rel * gauss(rng));
      if (cfg.noise_floor_mean > 0.0) v += cfg.noise_floor_mean * expo(rng);
      const double clamped = std::clamp(v, 0.0, 65535.0);
      scan.at(a, c) = static_cast<uint16_t>(std::lround(clamped));
    }
  });

  return scan;
}

SimTrajectory& SimTrajectory::line(double length, double speed) {
  segments_.push_back({length / speed, Velocity2(speed, 0.0, 0.0)});
  return *this;
}

SimTrajectory& SimTrajectory::arc(double length, double speed, double omega) {
  segments_.push_back({length / speed, Velocity2(speed, 0.0, omega)});
  return *this;
}

SimTrajectory& SimTrajectory::turn(double angle, double rate) {
  segments_.push_back({std::abs(angle) / rate, Velocity2(0.0, 0.0, angle >= 0.0 ? rate : -rate)});
  return *this;
}

SimTrajectory& SimTrajectory::hold(double duration) {
  segments_.push_back({duration, Velocity2::zero()});
  return *this;
}

double SimTrajectory::duration() const {
  double total = 0.0;
  for (const Segment& s : segments_) total += s.duration;
  return total;
}

Pose2 SimTrajectory::pose_at(double t) const {
  Pose2 pose = start_;
  double remaining = t;
  for (const Segment& s : segments_) {
    if (remaining <= 0.0) break;
    const double h = std::min(remaining, s.duration);
    pose = integrate_twist(pose, s.twist, h);
    remaining -= h;
  }
  return pose;
}

Velocity2 SimTrajectory::velocity_at(double t) const {
  double begin = 0.0;
  for (const Segment& s : segments_) {
    if (t < begin + s.duration) return s.twist;
    begin += s.duration;
  }
  return segments_.empty() ? Velocity2::zero() : segments_.back().twist;
}

SimSequence generate_sequence(const World& world, const SimTrajectory& traj,
                              const SimConfig& cfg) {
  SimSequence out;
  const int ticks = static_cast<int>(std::floor(traj.duration() / cfg.sweep_duration + 1e-9));
  out.scans.reserve(ticks);
  out.ground_truth.reserve(ticks);
  for (int i = 0; i < ticks; ++i) {
    const double t = i * cfg.sweep_duration;
    const Pose2 pose = traj.pose_at(t);
    if (!world.bounds.contains(pose.translation()))
      throw InputError("trajectory leaves world bounds at t=" + std::to_string(t));
    SimConfig scan_cfg = cfg;
    scan_cfg.seed = splitmix64(cfg.seed ^ splitmix64(static_cast<uint64_t>(i) + 0x5151ull));
    PolarScan scan = render_scan(world, pose, traj.velocity_at(t), scan_cfg);
    scan.stamp = t;
    out.scans.push_back(std::move(scan));
    out.ground_truth.push_back(TimedPose{t, pose, std::nullopt});
  }
  return out;
}

double cast_ray(const World& world, const Point2& origin, double angle) {
  const Eigen::Vector2d dir(std::cos(angle), std::sin(angle));
  const RayHit hit = first_hit(world, origin, dir, 1e-6);
  return hit.valid() ? hit.range : -1.0;
}

World read_world(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  World world;
  bool explicit_bounds = false;
  std::string line;
  int line_number = 0;
  double lo_x = 1e30, lo_y = 1e30, hi_x = -1e30, hi_y = -1e30;
  auto grow = [&](const Point2& p) {
    lo_x = std::min(lo_x, p.x());
    lo_y = std::min(lo_y, p.y());
    hi_x = std::max(hi_x, p.x());
    hi_y = std::max(hi_y, p.y());
  };
  while (std::getline(is, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "SEG") {
      WallSegment seg;
      if (!(ls >> seg.a.x() >> seg.a.y() >> seg.b.x() >> seg.b.y() >> seg.reflectivity))
        throw ParseError("expected `SEG x1 y1 x2 y2 refl`", line_number);
      if (!(seg.reflectivity > 0.0)) throw ParseError("reflectivity must be positive", line_number);
      world.segments.push_back(seg);
      grow(seg.a);
      grow(seg.b);
    } else if (tag == "PT") {
      PointReflector p;
      if (!(ls >> p.pos.x() >> p.pos.y() >> p.reflectivity))
        throw ParseError("expected `PT x y refl`", line_number);
      if (!(p.reflectivity > 0.0)) throw ParseError("reflectivity must be positive", line_number);
      world.point_reflectors.push_back(p);
      grow(p.pos);
    } else if (tag == "BOUNDS") {
      if (!(ls >> world.bounds.xmin >> world.bounds.ymin >> world.bounds.xmax >> world.bounds.ymax))
        throw ParseError("expected `BOUNDS xmin ymin xmax ymax`", line_number);
      explicit_bounds = true;
    } else {
      throw ParseError("unknown directive `" + tag + "`", line_number);
    }
  }
  if (!explicit_bounds && lo_x <= hi_x) {
    const double margin = 20.0;
    world.bounds = Bounds{lo_x - margin, lo_y - margin, hi_x + margin, hi_y + margin};
  }
  return world;
}

SimTrajectory read_trajectory_spec(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  constexpr double kDeg = M_PI / 180.0;
  SimTrajectory traj;
  std::string line;
  int line_number = 0;
  while (std::getline(is, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "START") {
      double x, y, theta_deg;
      if (!(ls >> x >> y >> theta_deg)) throw ParseError("expected `START x y theta_deg`", line_number);
      traj = SimTrajectory(Pose2(x, y, theta_deg * kDeg));
    } else if (tag == "LINE") {
      double length, speed;
      if (!(ls >> length >> speed) || speed <= 0.0)
        throw ParseError("expected `LINE length speed`", line_number);
      traj.line(length, speed);
    } else if (tag == "ARC") {
      double length, speed, omega_deg;
      if (!(ls >> length >> speed >> omega_deg) || speed <= 0.0)
        throw ParseError("expected `ARC length speed omega_deg_per_s`", line_number);
      traj.arc(length, speed, omega_deg * kDeg);
    } else if (tag == "TURN") {
      double angle_deg, rate_deg;
      if (!(ls >> angle_deg >> rate_deg) || rate_deg <= 0.0)
        throw ParseError("expected `TURN angle_deg rate_deg_per_s`", line_number);
      traj.turn(angle_deg * kDeg, rate_deg * kDeg);
    } else if (tag == "HOLD") {
      double duration;
      if (!(ls >> duration) || duration < 0.0) throw ParseError("expected `HOLD seconds`", line_number);
      traj.hold(duration);
    } else {
      throw ParseError("unknown directive `" + tag + "`", line_number);
    }
  }
  return traj;
}

void write_world(const World& world, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.precision(17);
  os << "BOUNDS " << world.bounds.xmin << ' ' << world.bounds.ymin << ' ' << world.bounds.xmax
     << ' ' << world.bounds.ymax << '\n';
  for (const WallSegment& s : world.segments)
    os << "SEG " << s.a.x() << ' ' << s.a.y() << ' ' << s.b.x() << ' ' << s.b.y() << ' '
       << s.reflectivity << '\n';
  for (const PointReflector& p : world.point_reflectors)
    os << "PT " << p.pos.x() << ' ' << p.pos.y() << ' ' << p.reflectivity << '\n';
}

}  // namespace cfear
