#pragma once

#include <vector>

#include <Eigen/Core>

#include "cfear/features.hpp"
#include "cfear/geometry.hpp"

namespace cfear {

enum class CostMetric { P2P, P2L, P2D };
enum class LossKind { Squared, Huber, PseudoHuber, Cauchy, Tukey };
enum class WeightScheme { Uniform, Plan, Det, Dir, Combined };

struct RegistrationConfig {
  CostMetric cost = CostMetric::P2L;
  LossKind loss = LossKind::Huber;
  double loss_delta = 0.1;
  double assoc_radius = 3.5;                    // reuses the surface-point resolution
  double normal_tolerance = 30.0 * M_PI / 180;  // max angle between matched normals
  WeightScheme weight_scheme = WeightScheme::Combined;
  double covariance_dampening = 0.1;            // lambda added to target covariances
  int max_iterations = 8;                       // outer associate/minimize rounds
  double rel_decrease_eps = 1e-7;
};

/// A matched pair between the current set and one keyframe set.
struct Correspondence {
  int keyframe_id = 0;   // index into the target list
  int target_index = 0;  // j, in the keyframe set
  int source_index = 0;  // i, in the current set
  double weight = 1.0;   // w_ij
};

struct RegistrationResult {
  Pose2 pose;
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  bool covariance_valid = false;
  int iterations = 0;
  double final_cost = 0.0;
  bool converged = false;
  int correspondence_count = 0;
  std::vector<double> cost_trace;  // objective after each accepted inner step
};

/// Robust loss in objective form, applied to the scalar cost metric h >= 0.
///   Squared:      h^2 / 2
///   Huber:        h^2/2 for |h| <= delta, else delta*(|h| - delta/2)
///   PseudoHuber:  delta^2 * (sqrt(1 + (h/delta)^2) - 1)
///   Cauchy:       (delta^2/2) * log(1 + (h/delta)^2)
///   Tukey:        (delta^2/6) * (1 - (1 - (h/delta)^2)^3), saturating at delta^2/6
double robust_loss(double h, LossKind kind, double delta);
double robust_loss_derivative(double h, LossKind kind, double delta);

/// Similarity of two positive scalars: 2*min(a,b)/(a+b), in [0,1], 1 iff equal.
inline double similarity(double a, double b) { return 2.0 * std::min(a, b) / (a + b); }

/// Residual weight between a source surface point (already in the target frame)
/// and its matched target point. Combined sums the planarity, support and
/// normal-direction similarities.
double residual_weight(const SurfacePoint& a, const SurfacePoint& b, WeightScheme scheme);

/// Scalar cost metric g for a matched pair under `pose`, with
/// e = target.mean - (R * source.mean + t):
///   P2P: |e|^2    P2L: (n_target . e)^2    P2D: e^T (Sigma_target + lambda I)^-1 e
double cost_residual(const SurfacePoint& target, const SurfacePoint& source, CostMetric metric,
                     const Pose2& pose, double dampening);

/// Per keyframe independently: the nearest target mean within assoc_radius whose
/// normal is within normal_tolerance of the transformed source normal.
std::vector<Correspondence> find_correspondences(const SurfacePointSet& source,
                                                 const std::vector<SurfacePointSet>& targets,
                                                 const Pose2& pose,
                                                 const RegistrationConfig& cfg);

/// Weighted robust sum over a fixed correspondence set.
double objective(const SurfacePointSet& source, const std::vector<SurfacePointSet>& targets,
                 const std::vector<Correspondence>& corrs, const Pose2& pose,
                 const RegistrationConfig& cfg);

/// Associates at `pose`, then sums.
double objective(const SurfacePointSet& source, const std::vector<SurfacePointSet>& targets,
                 const Pose2& pose, const RegistrationConfig& cfg);

/// Analytic gradient of the fixed-correspondence objective w.r.t. [x y theta].
Eigen::Vector3d objective_gradient(const SurfacePointSet& source,
                                   const std::vector<SurfacePointSet>& targets,
                                   const std::vector<Correspondence>& corrs, const Pose2& pose,
                                   const RegistrationConfig& cfg);

/// Aligns `source` against the keyframe sets by alternating association and a
/// damped Gauss-Newton solve, starting from `initial_pose`. Terminates when the
/// cost is minimized in a single step, the relative decrease falls below
/// rel_decrease_eps, or max_iterations is reached. The pose covariance is
/// (J^T J)^-1 of the stacked weighted robust residuals; covariance_valid is
/// false when J^T J is conditioned worse than 1e12.
RegistrationResult register_scan(const SurfacePointSet& source,
                                 const std::vector<SurfacePointSet>& targets,
                                 const Pose2& initial_pose, const RegistrationConfig& cfg);

}  // namespace cfear
