#include "softmanip/kinematics.hpp"

#include <cmath>
#include <functional>

namespace softmanip {

namespace {

Eigen::Vector4d clamp_box(const Eigen::Vector4d& v, double lo, double hi) {
  return v.cwiseMax(lo).cwiseMin(hi);
}

// Damped least squares on 0.5*||tip(i) - target||^2 + 0.5*lambda*||i||^2
// with box projection after every accepted step.
struct LmResult {
  Eigen::Vector4d i;
  double tip_residual;
  double objective;
  bool stalled;  // step size collapsed (local optimum on the box)
};

LmResult lm_solve(const KinematicCoefficients& coeffs, const Vec3& target,
                  const Eigen::Vector4d& start, const IkOptions& opts) {
  const auto tip_a = coeffs.a.bottomRows<3>();
  const Vec3 tip_b = coeffs.b.tail<3>();
  auto tip_of = [&](const Eigen::Vector4d& x) -> Vec3 {
    Vec8 v;
    v << x, x.cwiseProduct(x);
    return tip_a * v + tip_b;
  };
  auto objective = [&](const Eigen::Vector4d& x) {
    return (tip_of(x) - target).squaredNorm() + opts.lambda * x.squaredNorm();
  };

  Eigen::Vector4d x = clamp_box(start, opts.lo, opts.hi);
  double f = objective(x);
  double mu = 1e-3;
  bool stalled = false;
  for (int it = 0; it < opts.max_iters; ++it) {
    Eigen::Matrix<double, 3, 4> j;
    for (int c = 0; c < 4; ++c)
      j.col(c) = tip_a.col(c) + 2.0 * x[c] * tip_a.col(c + 4);
    const Vec3 r = tip_of(x) - target;
    const Eigen::Vector4d grad = j.transpose() * r + opts.lambda * x;
    if (grad.norm() < 1e-14) break;

    bool accepted = false;
    for (int tries = 0; tries < 40; ++tries) {
      const Eigen::Matrix4d h = j.transpose() * j +
                                (opts.lambda + mu) * Eigen::Matrix4d::Identity();
      const Eigen::Vector4d x_new =
          clamp_box(x - h.ldlt().solve(grad), opts.lo, opts.hi);
      const double f_new = objective(x_new);
      if (f_new < f - 1e-16) {
        const double step = (x_new - x).norm();
        x = x_new;
        f = f_new;
        mu = std::max(mu * 0.3, 1e-9);
        accepted = true;
        if (step < 1e-12) stalled = true;
        break;
      }
      mu *= 4.0;
      if (mu > 1e14) break;
    }
    if (!accepted || stalled) {
      stalled = true;
      break;
    }
  }
  return {x, (tip_of(x) - target).norm(), f, stalled};
}

void fill_angles(WorkspacePoint& p, const Vec6& x) {
  const Vec3 p_p = x.head<3>();
  const Vec3 p_n = x.tail<3>();
  p.tip = p_n;
  const Vec3 d = p_n - p_p;
  const double nrm = d.norm();
  if (nrm > kDirectionEpsilonMm) {
    const Vec3 ang = rotation_from_direction(d / nrm);
    p.alpha = ang[0];
    p.beta = ang[1];
    p.gamma = ang[2];
  } else {
    p.alpha = p.beta = p.gamma = 90.0;
  }
}

WorkspaceReport workspace_impl(const std::function<Vec6(const CurrentVector&)>& eval,
                               MorphState morph, int levels, double lo,
                               double hi) {
  if (levels < 2) throw InvalidInputError("workspace: need at least 2 levels");
  WorkspaceReport rep;
  rep.morph = morph;
  rep.levels = levels;
  rep.lo = lo;
  rep.hi = hi;
  auto level = [&](int q) { return lo + (hi - lo) * q / double(levels - 1); };
  for (int a = 0; a < levels; ++a)
    for (int b = 0; b < levels; ++b)
      for (int c = 0; c < levels; ++c)
        for (int e = 0; e < levels; ++e) {
          WorkspacePoint p;
          fill_angles(p, eval({level(a), level(b), level(c), level(e)}));
          rep.cloud.push_back(p);
        }

  Vec3 lo3 = rep.cloud[0].tip, hi3 = rep.cloud[0].tip;
  double a_lo = rep.cloud[0].alpha, a_hi = a_lo;
  double b_lo = rep.cloud[0].beta, b_hi = b_lo;
  std::vector<Vec3> tips;
  std::vector<Eigen::Vector2d> tips_xy;
  tips.reserve(rep.cloud.size());
  for (const auto& p : rep.cloud) {
    lo3 = lo3.cwiseMin(p.tip);
    hi3 = hi3.cwiseMax(p.tip);
    a_lo = std::min(a_lo, p.alpha);
    a_hi = std::max(a_hi, p.alpha);
    b_lo = std::min(b_lo, p.beta);
    b_hi = std::max(b_hi, p.beta);
    tips.push_back(p.tip);
    tips_xy.emplace_back(p.tip.x(), p.tip.y());
  }
  rep.extents = hi3 - lo3;
  rep.alpha_range = a_hi - a_lo;
  rep.beta_range = b_hi - b_lo;
  rep.hull_volume = convex_hull_volume(tips);
  rep.projected_area = convex_hull_2d(tips_xy).area;
  return rep;
}

}  // namespace

Vec6 forward(const KinematicCoefficients& coeffs, const CurrentVector& i) {
  return coeffs.a * augment(i).v + coeffs.b;
}

Vec3 forward_tip(const KinematicCoefficients& coeffs, const CurrentVector& i) {
  return forward(coeffs, i).tail<3>();
}

CurrentVector inverse_from(const KinematicCoefficients& coeffs,
                           const Vec3& target_tip, const CurrentVector& start,
                           const IkOptions& opts) {
  if (!target_tip.allFinite())
    throw InvalidInputError("inverse: non-finite target");
  const LmResult r = lm_solve(coeffs, target_tip, start.vec(), opts);
  if (r.tip_residual > opts.tol_mm)
    throw UnreachableError("inverse: best tip residual " +
                               std::to_string(r.tip_residual) +
                               " mm exceeds tolerance",
                           r.tip_residual,
                           {r.i[0], r.i[1], r.i[2], r.i[3]});
  return {r.i[0], r.i[1], r.i[2], r.i[3]};
}

CurrentVector inverse(const KinematicCoefficients& coeffs,
                      const Vec3& target_tip, const IkOptions& opts) {
  if (!target_tip.allFinite())
    throw InvalidInputError("inverse: non-finite target");
  const int n = std::max(1, opts.starts_per_coil);
  auto level = [&](int q) {
    return n == 1 ? 0.5 * (opts.lo + opts.hi)
                  : opts.lo + (opts.hi - opts.lo) * q / double(n - 1);
  };
  LmResult best{Eigen::Vector4d::Zero(),
                std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity(), true};
  // Deterministic start order: zero first, then the coarse grid.
  const LmResult zero = lm_solve(coeffs, target_tip, Eigen::Vector4d::Zero(), opts);
  best = zero;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e) {
          const Eigen::Vector4d s(level(a), level(b), level(c), level(e));
          const LmResult r = lm_solve(coeffs, target_tip, s, opts);
          if (r.objective < best.objective - 1e-15) best = r;
        }
  if (best.tip_residual > opts.tol_mm)
    throw UnreachableError("inverse: best tip residual " +
                               std::to_string(best.tip_residual) +
                               " mm exceeds tolerance",
                           best.tip_residual,
                           {best.i[0], best.i[1], best.i[2], best.i[3]});
  return {best.i[0], best.i[1], best.i[2], best.i[3]};
}

WorkspaceReport workspace(const KinematicCoefficients& coeffs, int levels,
                          double lo, double hi) {
  return workspace_impl(
      [&](const CurrentVector& i) { return forward(coeffs, i); }, coeffs.morph,
      levels, lo, hi);
}

WorkspaceReport workspace(const PlantConfig& cfg, MorphState morph, int levels,
                          double lo, double hi) {
  return workspace_impl(
      [&](const CurrentVector& i) { return static_response(i, morph, cfg); },
      morph, levels, lo, hi);
}

MorphWorkspaces morph_workspaces(const PlantConfig& cfg, int levels) {
  MorphWorkspaces mw;
  Vec3 lo3 = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi3 = -lo3;
  for (int m = 0; m < kMorphCount; ++m) {
    mw.per_morph[m] = workspace(cfg, static_cast<MorphState>(m), levels);
    for (const auto& p : mw.per_morph[m].cloud) {
      lo3 = lo3.cwiseMin(p.tip);
      hi3 = hi3.cwiseMax(p.tip);
    }
  }
  mw.composite_extents = hi3 - lo3;
  return mw;
}

}  // namespace softmanip
