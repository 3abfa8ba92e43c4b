#pragma once

#include <vector>

#include "softmanip/plant.hpp"

namespace softmanip {

// One calibration record: commanded currents plus the two tracked
// needle points, exactly what the camera pipeline delivers.
struct CalibrationSample {
  double t = 0.0;
  CurrentVector i;
  Vec3 p_m = Vec3::Zero();
  Vec3 p_n = Vec3::Zero();
};

struct CalibrationDataset {
  MorphState morph = MorphState::Main;
  NeedleSpec needle;
  std::vector<CalibrationSample> samples;
};

struct FitDiagnostics {
  int n_samples = 0;
  int rank = 0;            // of the 9-column design matrix
  double condition = 0.0;  // singular value ratio
  double rms_residual_mm = 0.0;
  double max_residual_mm = 0.0;
};

struct FitResult {
  KinematicCoefficients coeffs;
  FitDiagnostics diag;
};

// Run a quasi-static grid excitation against the simulated plant and
// record the tracked points. levels_per_coil levels spanning [lo, hi]
// on every coil; marker_len_mm is the distance from the tip to the
// second tracked marker along the needle. Bounds outside the safe range
// are refused unless allow_unsafe is set.
CalibrationDataset generate_dataset(const PlantConfig& cfg, MorphState morph,
                                    int levels_per_coil,
                                    double lo = kMainSafeMinA,
                                    double hi = kMainSafeMaxA,
                                    bool allow_unsafe = false,
                                    double marker_len_mm = 20.0);

// Ordinary least squares over the regressors [I, I^2, 1] for all six
// output rows. Throws SingularDesignError when the currents do not span
// the quadratic model (fewer than 9 affinely independent rows).
FitResult fit(const CalibrationDataset& data);

}  // namespace softmanip
