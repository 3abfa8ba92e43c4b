#pragma once

#include <optional>
#include <vector>

#include "softmanip/hull.hpp"
#include "softmanip/plant.hpp"

namespace softmanip {

struct IkOptions {
  double lo = kMainSafeMinA;
  double hi = kMainSafeMaxA;
  double lambda = 1e-4;      // current-norm regularization, A^-2 scale
  double tol_mm = 1e-3;      // success threshold on tip residual
  int starts_per_coil = 3;   // multi-start grid resolution
  int max_iters = 100;
};

struct WorkspacePoint {
  Vec3 tip;      // mm
  double alpha;  // deg
  double beta;   // deg
  double gamma;  // deg
};

struct WorkspaceReport {
  MorphState morph = MorphState::Main;
  std::vector<WorkspacePoint> cloud;
  double hull_volume = 0.0;      // mm^3
  double projected_area = 0.0;   // mm^2, XY hull
  Vec3 extents = Vec3::Zero();   // mm, per axis max - min
  double alpha_range = 0.0;      // deg
  double beta_range = 0.0;       // deg
  int levels = 0;
  double lo = kMainSafeMinA, hi = kMainSafeMaxA;
};

struct MorphWorkspaces {
  std::array<WorkspaceReport, kMorphCount> per_morph;
  Vec3 composite_extents = Vec3::Zero();
};

// X = A v + B, the fitted quadratic model.
Vec6 forward(const KinematicCoefficients& coeffs, const CurrentVector& i);

// Tip rows of the forward map.
Vec3 forward_tip(const KinematicCoefficients& coeffs, const CurrentVector& i);

// Bounded damped least squares with Tikhonov current regularization and
// a deterministic multi-start grid. Throws UnreachableError when the
// best residual exceeds opts.tol_mm.
CurrentVector inverse(const KinematicCoefficients& coeffs,
                      const Vec3& target_tip, const IkOptions& opts = {});

// Warm-started variant used by the trajectory follower.
CurrentVector inverse_from(const KinematicCoefficients& coeffs,
                           const Vec3& target_tip, const CurrentVector& start,
                           const IkOptions& opts = {});

WorkspaceReport workspace(const KinematicCoefficients& coeffs, int levels,
                          double lo = kMainSafeMinA,
                          double hi = kMainSafeMaxA);

// Workspace of the simulated plant (includes mismatch perturbation).
WorkspaceReport workspace(const PlantConfig& cfg, MorphState morph, int levels,
                          double lo = kMainSafeMinA,
                          double hi = kMainSafeMaxA);

MorphWorkspaces morph_workspaces(const PlantConfig& cfg, int levels);

}  // namespace softmanip
