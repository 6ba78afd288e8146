#include "cfear/radar_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "cfear/errors.hpp"
#include "cfear/motion.hpp"

namespace cfear {

PointCloud to_cartesian(const PolarScan& scan, const std::vector<Detection>& detections) {
  PointCloud cloud;
  cloud.stamp = scan.stamp;
  cloud.points.reserve(detections.size());
  const double azimuth_step = 2.0 * M_PI / scan.na;
  for (const Detection& det : detections) {
    if (det.azimuth < 0 || det.azimuth >= scan.na)
      throw InputError("azimuth index " + std::to_string(det.azimuth) + " outside [0, " + std::to_string(scan.na) + ")");
    if (det.range_bin < 1 || det.range_bin > scan.nr)
      throw InputError("range bin " + std::to_string(det.range_bin) + " outside [1, " + std::to_string(scan.nr) + "]");
    const double theta = det.azimuth * azimuth_step;
    const double range = det.range_bin * scan.gamma;
    RadarPoint p;
    p.pos = Point2(range * std::cos(theta), range * std::sin(theta));
    p.intensity = scan.intensity(det.azimuth, det.range_bin);
    p.azimuth_index = det.azimuth;
    p.time_offset = time_offset(det.azimuth, scan.na, scan.sweep_duration);
    cloud.points.push_back(p);
  }
  return cloud;
}

namespace {

constexpr uint32_t kScanMagic = 0x44524643;  // "CFRD"
constexpr uint32_t kScanVersion = 1;

template <typename T>
void put(std::ostream& os, T value) {
  // Little-endian hosts only (x86/arm64); asserted at build time.
  static_assert(sizeof(T) <= 8);
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is, const char* what) {
  T value{};
  if (!is.read(reinterpret_cast<char*>(&value), sizeof(T)))
    throw TruncationError(std::string("scan file truncated while reading ") + what);
  return value;
}

}  // namespace

void write_scan(const PolarScan& scan, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  put<uint32_t>(os, kScanMagic);
  put<uint32_t>(os, kScanVersion);
  put<uint32_t>(os, static_cast<uint32_t>(scan.na));
  put<uint32_t>(os, static_cast<uint32_t>(scan.nr));
  put<double>(os, scan.gamma);
  put<double>(os, scan.sweep_duration);
  put<double>(os, scan.stamp);
  os.write(reinterpret_cast<const char*>(scan.intensities.data()),
           static_cast<std::streamsize>(scan.intensities.size() * sizeof(uint16_t)));
  if (!os) throw std::runtime_error("write failed: " + path);
}

PolarScan read_scan(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  const auto magic = get<uint32_t>(is, "magic");
  if (magic != kScanMagic) throw FormatError("not a radar scan file: " + path);
  const auto version = get<uint32_t>(is, "version");
  if (version != kScanVersion)
    throw FormatError("unsupported scan file version " + std::to_string(version));
  const auto na = get<uint32_t>(is, "na");
  const auto nr = get<uint32_t>(is, "nr");
  const auto gamma = get<double>(is, "gamma");
  const auto sweep_duration = get<double>(is, "sweep_duration");
  const auto stamp = get<double>(is, "stamp");
  if (na < 1 || nr < 1 || na > (1u << 20) || nr > (1u << 20))
    throw DimensionError("bad scan dimensions " + std::to_string(na) + "x" + std::to_string(nr));
  if (!(gamma > 0.0) || !(sweep_duration > 0.0))
    throw DimensionError("non-positive range resolution or sweep duration");
  PolarScan scan(static_cast<int>(na), static_cast<int>(nr), gamma, sweep_duration, stamp);
  const std::streamsize payload = static_cast<std::streamsize>(scan.intensities.size() * sizeof(uint16_t));
  if (!is.read(reinterpret_cast<char*>(scan.intensities.data()), payload))
    throw TruncationError("scan file truncated: expected " + std::to_string(payload) + " payload bytes");
  return scan;
}

void write_trajectory(const Trajectory& traj, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.precision(17);
  for (const TimedPose& tp : traj)
    os << tp.stamp << ' ' << tp.pose.x << ' ' << tp.pose.y << ' ' << tp.pose.theta << '\n';
  if (!os) throw std::runtime_error("write failed: " + path);
}

Trajectory read_trajectory(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  Trajectory traj;
  std::string line;
  int line_number = 0;
  while (std::getline(is, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    TimedPose tp;
    double theta;
    if (!(ls >> tp.stamp >> tp.pose.x >> tp.pose.y >> theta))
      throw ParseError("expected `stamp x y theta`", line_number);
    tp.pose.theta = wrap_angle(theta);
    traj.push_back(tp);
  }
  return traj;
}

void write_covariances(const Trajectory& traj, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.precision(17);
  for (const TimedPose& tp : traj) {
    const Eigen::Matrix3d c = tp.covariance.value_or(Eigen::Matrix3d::Zero());
    os << tp.stamp << ' ' << c(0, 0) << ' ' << c(0, 1) << ' ' << c(0, 2) << ' '
       << c(1, 1) << ' ' << c(1, 2) << ' ' << c(2, 2) << '\n';
  }
}

void write_kitti_poses(const Trajectory& traj, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.precision(17);
  for (const TimedPose& tp : traj) {
    const double c = std::cos(tp.pose.theta), s = std::sin(tp.pose.theta);
    os << c << ' ' << -s << " 0 " << tp.pose.x << ' '
       << s << ' ' << c << " 0 " << tp.pose.y << ' '
       << "0 0 1 0\n";
  }
}

}  // namespace cfear
