#include "cfear/registration.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "cfear/grid_index.hpp"
#include "cfear/parallel.hpp"

namespace cfear {

double robust_loss(double h, LossKind kind, double delta) {
  const double a = std::abs(h);
  switch (kind) {
    case LossKind::Squared:
      return 0.5 * h * h;
    case LossKind::Huber:
      return a <= delta ? 0.5 * h * h : delta * (a - 0.5 * delta);
    case LossKind::PseudoHuber: {
      const double r = h / delta;
      return delta * delta * (std::sqrt(1.0 + r * r) - 1.0);
    }
    case LossKind::Cauchy: {
      const double r = h / delta;
      return 0.5 * delta * delta * std::log1p(r * r);
    }
    case LossKind::Tukey: {
      if (a >= delta) return delta * delta / 6.0;
      const double q = 1.0 - (h / delta) * (h / delta);
      return delta * delta / 6.0 * (1.0 - q * q * q);
    }
  }
  return 0.0;
}

double robust_loss_derivative(double h, LossKind kind, double delta) {
  const double a = std::abs(h);
  switch (kind) {
    case LossKind::Squared:
      return h;
    case LossKind::Huber:
      return a <= delta ? h : (h > 0 ? delta : -delta);
    case LossKind::PseudoHuber: {
      const double r = h / delta;
      return h / std::sqrt(1.0 + r * r);
    }
    case LossKind::Cauchy: {
      const double r = h / delta;
      return h / (1.0 + r * r);
    }
    case LossKind::Tukey: {
      if (a >= delta) return 0.0;
      const double q = 1.0 - (h / delta) * (h / delta);
      return h * q * q;
    }
  }
  return 0.0;
}

double residual_weight(const SurfacePoint& a, const SurfacePoint& b, WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::Uniform:
      return 1.0;
    case WeightScheme::Plan:
      return similarity(a.planarity, b.planarity);
    case WeightScheme::Det:
      return similarity(static_cast<double>(a.support), static_cast<double>(b.support));
    case WeightScheme::Dir:
      return std::max(a.normal.dot(b.normal), 0.0);
    case WeightScheme::Combined:
      return similarity(a.planarity, b.planarity) +
             similarity(static_cast<double>(a.support), static_cast<double>(b.support)) +
             std::max(a.normal.dot(b.normal), 0.0);
  }
  return 1.0;
}

double cost_residual(const SurfacePoint& target, const SurfacePoint& source, CostMetric metric,
                     const Pose2& pose, double dampening) {
  const Eigen::Vector2d e = target.mean - transform_point(pose, source.mean);
  switch (metric) {
    case CostMetric::P2P:
      return e.squaredNorm();
    case CostMetric::P2L: {
      const double u = target.normal.dot(e);
      return u * u;
    }
    case CostMetric::P2D: {
      const Eigen::Matrix2d damped = target.covariance + dampening * Eigen::Matrix2d::Identity();
      return e.dot(damped.inverse() * e);
    }
  }
  return 0.0;
}

namespace {

struct Pair {
  const SurfacePoint* target;
  const SurfacePoint* source;
  double weight;
  Eigen::Matrix2d info;  // (Sigma + lambda I)^-1, P2D only
};

// Flattened correspondence view used by the solver; rebuilt on association.
struct Problem {
  const SurfacePointSet& source;
  const std::vector<SurfacePointSet>& targets;
  const RegistrationConfig& cfg;
  std::vector<GridIndex> indexes;
  std::vector<Correspondence> corrs;
  std::vector<Pair> pairs;

  Problem(const SurfacePointSet& src, const std::vector<SurfacePointSet>& tgts,
          const RegistrationConfig& c)
      : source(src), targets(tgts), cfg(c) {
    indexes.reserve(targets.size());
    for (const SurfacePointSet& t : targets) {
      std::vector<Point2> means;
      means.reserve(t.size());
      for (const SurfacePoint& sp : t.points) means.push_back(sp.mean);
      indexes.emplace_back(means, cfg.assoc_radius);
    }
  }

  void associate(const Pose2& pose) {
    corrs.clear();
    const double cos_tol = std::cos(cfg.normal_tolerance);
    const Eigen::Matrix2d rot = pose.rotation();
    // One slot per (keyframe, source point); -1 marks no match.
    for (int k = 0; k < static_cast<int>(targets.size()); ++k) {
      const SurfacePointSet& target = targets[k];
      std::vector<int> match(source.size(), -1);
      parallel_for(source.size(), [&](size_t i) {
        const Point2 m = transform_point(pose, source.points[i].mean);
        const Eigen::Vector2d n = rot * source.points[i].normal;
        const auto cand = indexes[k].radius_neighbors(m, cfg.assoc_radius);
        int best = -1;
        double best_d2 = 0.0;
        for (int j : cand) {
          if (n.dot(target.points[j].normal) <= cos_tol) continue;
          const double d2 = (target.points[j].mean - m).squaredNorm();
          if (best < 0 || d2 < best_d2) {
            best = j;
            best_d2 = d2;
          }
        }
        match[i] = best;
      });
      for (int i = 0; i < static_cast<int>(source.size()); ++i) {
        if (match[i] < 0) continue;
        SurfacePoint moved = source.points[i];
        moved.mean = transform_point(pose, moved.mean);
        moved.normal = rot * moved.normal;
        const double w = residual_weight(moved, target.points[match[i]], cfg.weight_scheme);
        corrs.push_back(Correspondence{k, match[i], i, w});
      }
    }
    rebuild_pairs();
  }

  void rebuild_pairs() {
    pairs.clear();
    pairs.reserve(corrs.size());
    for (const Correspondence& c : corrs) {
      Pair p;
      p.target = &targets[c.keyframe_id].points[c.target_index];
      p.source = &source.points[c.source_index];
      p.weight = c.weight;
      if (cfg.cost == CostMetric::P2D) {
        const Eigen::Matrix2d damped =
            p.target->covariance + cfg.covariance_dampening * Eigen::Matrix2d::Identity();
        p.info = damped.inverse();
      }
      pairs.push_back(p);
    }
  }

  double metric(const Pair& p, const Eigen::Vector2d& e) const {
    switch (cfg.cost) {
      case CostMetric::P2P:
        return e.squaredNorm();
      case CostMetric::P2L: {
        const double u = p.target->normal.dot(e);
        return u * u;
      }
      case CostMetric::P2D:
        return e.dot(p.info * e);
    }
    return 0.0;
  }

  Eigen::Vector3d metric_gradient(const Pair& p, const Pose2& pose,
                                  const Eigen::Vector2d& e) const {
    // e = mu_j - (R mu_i + t); columns of de/dx for x = [tx ty theta].
    const double c = std::cos(pose.theta), s = std::sin(pose.theta);
    const Eigen::Vector2d mu = p.source->mean;
    const Eigen::Vector2d de_dtheta(s * mu.x() + c * mu.y(), -c * mu.x() + s * mu.y());
    Eigen::Vector2d v;  // dg/de
    switch (cfg.cost) {
      case CostMetric::P2P:
        v = 2.0 * e;
        break;
      case CostMetric::P2L:
        v = 2.0 * p.target->normal.dot(e) * p.target->normal;
        break;
      case CostMetric::P2D:
        v = 2.0 * (p.info * e);
        break;
    }
    return {-v.x(), -v.y(), v.dot(de_dtheta)};
  }

  double cost(const Pose2& pose) const {
    double total = 0.0;
    for (const Pair& p : pairs) {
      const Eigen::Vector2d e = p.target->mean - transform_point(pose, p.source->mean);
      total += p.weight * robust_loss(metric(p, e), cfg.loss, cfg.loss_delta);
    }
    return total;
  }

  Eigen::Vector3d gradient(const Pose2& pose) const {
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (const Pair& p : pairs) {
      const Eigen::Vector2d e = p.target->mean - transform_point(pose, p.source->mean);
      const double h = metric(p, e);
      g += p.weight * robust_loss_derivative(h, cfg.loss, cfg.loss_delta) *
           metric_gradient(p, pose, e);
    }
    return g;
  }

  // Scalar residual sqrt(w * L(g)) per correspondence and its Jacobian row.
  void residuals_and_jacobian(const Pose2& pose, Eigen::VectorXd& r, Eigen::MatrixXd& jac) const {
    const int n = static_cast<int>(pairs.size());
    r.resize(n);
    jac.resize(n, 3);
    for (int i = 0; i < n; ++i) {
      const Pair& p = pairs[i];
      const Eigen::Vector2d e = p.target->mean - transform_point(pose, p.source->mean);
      const double h = metric(p, e);
      const double loss = robust_loss(h, cfg.loss, cfg.loss_delta);
      const double rho = std::sqrt(p.weight * loss);
      r(i) = rho;
      // d rho / d h; every loss behaves like h^2/2 near zero.
      const double scale = rho > 1e-12
                               ? 0.5 * p.weight * robust_loss_derivative(h, cfg.loss, cfg.loss_delta) / rho
                               : std::sqrt(0.5 * p.weight);
      jac.row(i) = scale * metric_gradient(p, pose, e).transpose();
    }
  }
};

Pose2 apply_step(const Pose2& pose, const Eigen::Vector3d& dx) {
  return Pose2(pose.x + dx(0), pose.y + dx(1), pose.theta + dx(2));
}

struct InnerOutcome {
  Pose2 pose;
  double cost = 0.0;
  int accepted_steps = 0;
  double last_step_norm = 0.0;
};

// Damped Gauss-Newton over the fixed correspondence set.
InnerOutcome minimize_fixed(const Problem& problem, const Pose2& start,
                            std::vector<double>& cost_trace) {
  constexpr int kMaxInner = 50;
  constexpr double kStepTol = 1e-6;
  InnerOutcome out;
  out.pose = start;
  out.cost = problem.cost(start);

  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  problem.residuals_and_jacobian(out.pose, r, jac);
  double damping = 1e-4;
  for (int it = 0; it < kMaxInner; ++it) {
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    const Eigen::Vector3d jtr = jac.transpose() * r;
    const Eigen::Matrix3d lhs = jtj + damping * Eigen::Matrix3d::Identity();
    const Eigen::Vector3d dx = lhs.ldlt().solve(-jtr);
    if (!dx.allFinite()) break;
    out.last_step_norm = dx.norm();
    if (out.last_step_norm < kStepTol) break;  // already at a stationary point
    const Pose2 trial = apply_step(out.pose, dx);
    const double trial_cost = problem.cost(trial);
    if (trial_cost < out.cost) {
      out.pose = trial;
      out.cost = trial_cost;
      ++out.accepted_steps;
      cost_trace.push_back(trial_cost);
      damping = std::max(damping * 0.1, 1e-12);
      problem.residuals_and_jacobian(out.pose, r, jac);
    } else {
      damping *= 10.0;
      if (damping > 1e8) break;
    }
  }
  return out;
}

}  // namespace

std::vector<Correspondence> find_correspondences(const SurfacePointSet& source,
                                                 const std::vector<SurfacePointSet>& targets,
                                                 const Pose2& pose,
                                                 const RegistrationConfig& cfg) {
  Problem problem(source, targets, cfg);
  problem.associate(pose);
  return problem.corrs;
}

double objective(const SurfacePointSet& source, const std::vector<SurfacePointSet>& targets,
                 const std::vector<Correspondence>& corrs, const Pose2& pose,
                 const RegistrationConfig& cfg) {
  Problem problem(source, targets, cfg);
  problem.corrs = corrs;
  problem.rebuild_pairs();
  return problem.cost(pose);
}

double objective(const SurfacePointSet& source, const std::vector<SurfacePointSet>& targets,
                 const Pose2& pose, const RegistrationConfig& cfg) {
  Problem problem(source, targets, cfg);
  problem.associate(pose);
  return problem.cost(pose);
}

Eigen::Vector3d objective_gradient(const SurfacePointSet& source,
                                   const std::vector<SurfacePointSet>& targets,
                                   const std::vector<Correspondence>& corrs, const Pose2& pose,
                                   const RegistrationConfig& cfg) {
  Problem problem(source, targets, cfg);
  problem.corrs = corrs;
  problem.rebuild_pairs();
  return problem.gradient(pose);
}

RegistrationResult register_scan(const SurfacePointSet& source,
                                 const std::vector<SurfacePointSet>& targets,
                                 const Pose2& initial_pose, const RegistrationConfig& cfg) {
  RegistrationResult result;
  result.pose = initial_pose;

  Problem problem(source, targets, cfg);
  problem.associate(initial_pose);
  if (problem.corrs.empty()) return result;  // nothing to align against

  constexpr double kStepTol = 1e-6;
  Pose2 pose = initial_pose;
  double prev_cost = problem.cost(pose);
  bool terminated = false;
  for (int outer = 0; outer < cfg.max_iterations && !terminated; ++outer) {
    const InnerOutcome inner = minimize_fixed(problem, pose, result.cost_trace);
    pose = inner.pose;
    result.iterations = outer + 1;

    // Solved in a single step (or none): the linearization is already exact.
    if (inner.accepted_steps <= 1 && inner.last_step_norm < kStepTol) terminated = true;
    if (prev_cost > 0.0 && (prev_cost - inner.cost) / prev_cost < cfg.rel_decrease_eps)
      terminated = true;
    prev_cost = inner.cost;

    problem.associate(pose);
    if (problem.corrs.empty()) {
      result.pose = pose;
      return result;
    }
  }

  result.pose = pose;
  result.correspondence_count = static_cast<int>(problem.corrs.size());
  result.final_cost = problem.cost(pose);
  // Divergence check on a common correspondence set.
  result.converged = result.final_cost <= problem.cost(initial_pose) * (1.0 + 1e-9) + 1e-12;

  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  problem.residuals_and_jacobian(pose, r, jac);
  const Eigen::Matrix3d jtj = jac.transpose() * jac;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(jtj);
  const double lo = eig.eigenvalues()(0), hi = eig.eigenvalues()(2);
  if (lo > 0.0 && hi / lo < 1e12) {
    result.covariance = jtj.inverse();
    result.covariance_valid = true;
  }
  return result;
}

}  // namespace cfear
