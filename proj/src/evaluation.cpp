#include "cfear/evaluation.hpp"

#include <cmath>
#include <sstream>

#include "cfear/errors.hpp"

namespace cfear {

namespace {

// E_i over an index pair: (gt relative)^-1 * (est relative).
Pose2 pair_error(const Trajectory& est, const Trajectory& gt, size_t i, size_t j) {
  const Pose2 gt_rel = relative(gt[i].pose, gt[j].pose);
  const Pose2 est_rel = relative(est[i].pose, est[j].pose);
  return compose(inverse(gt_rel), est_rel);
}

std::vector<double> cumulative_path_length(const Trajectory& gt) {
  std::vector<double> acc(gt.size(), 0.0);
  for (size_t i = 1; i < gt.size(); ++i)
    acc[i] = acc[i - 1] + (gt[i].pose.translation() - gt[i - 1].pose.translation()).norm();
  return acc;
}

}  // namespace

DriftReport kitti_drift(const Trajectory& est, const Trajectory& gt,
                        const std::vector<double>& segment_lengths, int stride) {
  if (est.size() != gt.size())
    throw InputError("trajectory length mismatch: " + std::to_string(est.size()) + " vs " +
                     std::to_string(gt.size()));
  DriftReport report;
  const auto acc = cumulative_path_length(gt);

  double sum_t = 0.0, sum_r = 0.0;
  for (double length : segment_lengths) {
    SegmentDrift bucket;
    bucket.length = length;
    double bucket_t = 0.0, bucket_r = 0.0;
    for (size_t i = 0; i + 1 < gt.size(); i += std::max(stride, 1)) {
      // First index whose accumulated gt path from i exceeds the segment length.
      size_t j = i + 1;
      while (j < gt.size() && acc[j] - acc[i] < length) ++j;
      if (j >= gt.size()) break;
      const double len = acc[j] - acc[i];
      const Pose2 err = pair_error(est, gt, i, j);
      bucket_t += err.translation().norm() / len * 100.0;
      bucket_r += std::abs(err.theta) * 180.0 / M_PI / len;
      ++bucket.count;
    }
    if (bucket.count > 0) {
      bucket.translation_error = bucket_t / bucket.count;
      bucket.rotation_error = bucket_r / bucket.count;
      sum_t += bucket_t;
      sum_r += bucket_r;
      report.segment_count += bucket.count;
    }
    report.per_length.push_back(bucket);
  }
  if (report.segment_count > 0) {
    report.translation_error = sum_t / report.segment_count;
    report.rotation_error = sum_r / report.segment_count;
  } else {
    report.empty = true;
  }
  return report;
}

RpeReport rpe(const Trajectory& est, const Trajectory& gt) {
  if (est.size() != gt.size())
    throw InputError("trajectory length mismatch: " + std::to_string(est.size()) + " vs " +
                     std::to_string(gt.size()));
  if (est.size() < 2) throw InputError("need at least 2 poses for RPE");
  RpeReport report;
  const size_t n = est.size();
  for (size_t i = 0; i + 1 < n; ++i) {
    const Pose2 err = pair_error(est, gt, i, i + 1);
    report.rpe_mean += err.translation().norm();
    report.bias += err.translation();
    report.rotation_bias += err.theta;
  }
  report.rpe_mean /= static_cast<double>(n - 1);
  report.bias /= static_cast<double>(n - 1);
  report.rotation_bias /= static_cast<double>(n - 1);
  return report;
}

Pose2 align_trajectories(const Trajectory& est, const Trajectory& gt) {
  if (est.size() != gt.size())
    throw InputError("trajectory length mismatch: " + std::to_string(est.size()) + " vs " +
                     std::to_string(gt.size()));
  if (est.size() < 2) throw InputError("need at least 2 poses to align");
  Eigen::Vector2d est_mean = Eigen::Vector2d::Zero(), gt_mean = Eigen::Vector2d::Zero();
  for (size_t i = 0; i < est.size(); ++i) {
    est_mean += est[i].pose.translation();
    gt_mean += gt[i].pose.translation();
  }
  est_mean /= static_cast<double>(est.size());
  gt_mean /= static_cast<double>(gt.size());

  double dot = 0.0, cross = 0.0;
  for (size_t i = 0; i < est.size(); ++i) {
    const Eigen::Vector2d e = est[i].pose.translation() - est_mean;
    const Eigen::Vector2d g = gt[i].pose.translation() - gt_mean;
    dot += e.dot(g);
    cross += e.x() * g.y() - e.y() * g.x();
  }
  // Degenerate (all points coincident): atan2(0,0) = 0, identity rotation.
  const double theta = std::atan2(cross, dot);
  const double c = std::cos(theta), s = std::sin(theta);
  const Eigen::Vector2d t = gt_mean - Eigen::Vector2d(c * est_mean.x() - s * est_mean.y(),
                                                      s * est_mean.x() + c * est_mean.y());
  return Pose2(t.x(), t.y(), theta);
}

double ate(const Trajectory& est, const Trajectory& gt) {
  const Pose2 alignment = align_trajectories(est, gt);
  double sum = 0.0;
  for (size_t i = 0; i < est.size(); ++i) {
    const Point2 aligned = transform_point(alignment, est[i].pose.translation());
    sum += (gt[i].pose.translation() - aligned).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(est.size()));
}

std::string format_report(const DriftReport& drift, const RpeReport& rpe_report,
                          double ate_value) {
  std::ostringstream os;
  os.precision(6);
  os << "drift: translation " << drift.translation_error << " %  rotation "
     << drift.rotation_error << " deg/m  (" << drift.segment_count << " segments)\n";
  for (const SegmentDrift& b : drift.per_length) {
    os << "  " << b.length << " m: ";
    if (b.count == 0)
      os << "no valid segments\n";
    else
      os << b.translation_error << " %  " << b.rotation_error << " deg/m  (" << b.count << ")\n";
  }
  os << "rpe: mean " << rpe_report.rpe_mean << " m  bias [" << rpe_report.bias.x() << ", "
     << rpe_report.bias.y() << "] m  rotation bias " << rpe_report.rotation_bias << " rad\n";
  os << "ate: " << ate_value << " m\n";
  return os.str();
}

std::string format_report_csv(const DriftReport& drift, const RpeReport& rpe_report,
                              double ate_value) {
  std::ostringstream os;
  os.precision(12);
  os << "metric,name,value\n";
  os << "drift,translation_percent," << drift.translation_error << "\n";
  os << "drift,rotation_deg_per_m," << drift.rotation_error << "\n";
  os << "drift,segment_count," << drift.segment_count << "\n";
  for (const SegmentDrift& b : drift.per_length) {
    os << "drift,translation_percent_" << b.length << "m," << b.translation_error << "\n";
    os << "drift,rotation_deg_per_m_" << b.length << "m," << b.rotation_error << "\n";
    os << "drift,segments_" << b.length << "m," << b.count << "\n";
  }
  os << "rpe,mean_m," << rpe_report.rpe_mean << "\n";
  os << "rpe,bias_longitudinal_m," << rpe_report.bias.x() << "\n";
  os << "rpe,bias_lateral_m," << rpe_report.bias.y() << "\n";
  os << "rpe,bias_rotation_rad," << rpe_report.rotation_bias << "\n";
  os << "ate,rmse_m," << ate_value << "\n";
  return os.str();
}

}  // namespace cfear
