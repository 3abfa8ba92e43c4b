#pragma once

#include <optional>
#include <vector>

#include "softmanip/kinematics.hpp"

namespace softmanip {

enum class PathShape { Circle, Square };

struct PathSpec {
  PathShape shape = PathShape::Circle;
  double size_mm = 0.64;  // diameter (circle) or side (square)
  double freq_hz = 1.0;   // cycles per second
  int cycles = 5;
  std::optional<Vec3> center;  // default: zero-current tip position
  int samples_per_cycle = 360;
};

struct RefPoint {
  double t = 0.0;
  double phase = 0.0;  // [0, 1) within the cycle
  Vec3 target = Vec3::Zero();
};

struct Trajectory {
  double dt = 1e-3;
  std::vector<double> t;
  std::vector<CurrentVector> i;
  std::vector<Vec6> x;  // measured [P_p; P_n]
};

struct PathMetrics {
  double mean_speed_mm_s = 0.0;
  std::optional<double> rms_precision_um;  // absent below 2 cycles
  double rms_accuracy_um = 0.0;
  std::optional<double> mean_radius_mm;  // circles only
  std::optional<double> amplitude_db;    // circles only
};

struct BodePoint {
  double freq_hz;
  double amp_db;
  double mean_radius_mm;
};

struct ChirpPoint {
  double freq_hz;
  Vec3 mag;  // response / quasi-static response, per tip axis
};

struct SpeedMetrics {
  Vec3 max_linear_m_s = Vec3::Zero();  // per tip axis
  double max_alpha_deg_s = 0.0;
  double max_beta_deg_s = 0.0;
};

// Continuous reference position at cycle phase in [0, 1). Squares are
// parameterized by arc length with corners hit exactly at phases k/4.
Vec3 path_point(const PathSpec& spec, const Vec3& center, double phase);

// Uniformly phased reference samples (corner samples included for
// squares when samples_per_cycle is a multiple of 4).
std::vector<RefPoint> gen_path(const PathSpec& spec, const Vec3& center);

// Open-loop following: IK currents per reference sample, held while the
// plant steps at its own dt. No feedback correction.
Trajectory follow(const PlantConfig& cfg, const KinematicCoefficients& coeffs,
                  const PathSpec& spec);

// Phase-binned cross-cycle precision vs phase-matched accuracy, plus
// mean speed and (for circles) mean radius / amplitude. skip_cycles
// initial cycles are excluded from the statistics.
PathMetrics metrics(const Trajectory& traj, const PathSpec& spec,
                    const Vec3& center, int skip_cycles = 0);

Vec3 default_center(const KinematicCoefficients& coeffs);

std::vector<BodePoint> amplitude_sweep(const PlantConfig& cfg,
                                       const KinematicCoefficients& coeffs,
                                       const PathSpec& tmpl,
                                       const std::vector<double>& freqs);

// Single-coil linear chirp; magnitude by short-time sinusoid fitting at
// the instantaneous chirp phase.
std::vector<ChirpPoint> chirp_response(const PlantConfig& cfg, int coil,
                                       double f_lo, double f_hi,
                                       double duration_s,
                                       double amplitude_a = 0.05);

// Central-difference velocities with a 5-sample moving average.
SpeedMetrics speed_metrics(const Trajectory& traj, const NeedleSpec& needle);

}  // namespace softmanip
