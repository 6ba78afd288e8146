#include "cfear/motion.hpp"

namespace cfear {

PointCloud compensate(const PointCloud& cloud, const DistortionModel& model) {
  PointCloud out;
  out.stamp = cloud.stamp;
  out.points.reserve(cloud.points.size());
  for (const RadarPoint& p : cloud.points) {
    const double dt = p.time_offset;
    const double ang = -dt * model.velocity.omega;
    const double c = std::cos(ang), s = std::sin(ang);
    RadarPoint q = p;
    q.pos = Point2(c * p.pos.x() - s * p.pos.y() - dt * model.velocity.vx,
                   s * p.pos.x() + c * p.pos.y() - dt * model.velocity.vy);
    out.points.push_back(q);
  }
  return out;
}

}  // namespace cfear
