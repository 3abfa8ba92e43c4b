#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <random>

#include "softmanip/model_core.hpp"

namespace softmanip {

// Parameters of the elastic / magnetic force model around the central
// coil and its stacked top magnets. Forces in mN, distances in mm.
// z is the gap between the coil core top and the magnet stack.
struct ForceCurveParams {
  double k_e = 9.8667;    // elastic stiffness of the deformed film, mN/mm
  double z0 = 1.5;        // magnetic offset distance, mm
  double a0 = 888.0;      // permanent attraction scale per magnet, mN*mm^2
  double a1 = 2368.0;     // coil force scale, mN*mm^2/A
  double p = 2.0;         // decay exponent
  int m = 2;              // stacked top magnets
  double d = 10.5;        // coil-to-magnet rest separation, mm
  double h = 2.5;         // cap height (minimum achievable gap), mm
  double i_max_drive = 0.5;  // A

  // Leg joints bend rather than stretch, so a latched leg sees a much
  // softer restoring force than the central stack.
  double side_stiffness_scale = 0.3;
  // Calibrated gaps between a leg magnet and its coil core in the two
  // blocked-force configurations.
  double side_gap_main = 8.81296;  // mm
  double side_gap_b4 = 5.44347;    // mm
  // Torque-arm calibration for lateral blocked force at the needle tip.
  double lateral_lever = 0.554373;
  double y_geometry = 0.82407;
};

enum class ForceMode { Attract, Repel };

struct ForcePoint {
  double f_e;  // elastic restoring force, mN
  double f_m;  // magnetic force, mN (positive = attraction)
};

// Two lightly damped resonant modes separated by an anti-resonance,
// applied identically to every output channel.
struct DynamicsParams {
  double f1 = 30.0;   // Hz
  double f2 = 50.0;   // Hz
  double f_z = 40.0;  // Hz, anti-resonance
  double zeta1 = 0.05;
  double zeta2 = 0.05;
  double zeta_z = 0.05;
  double dt = 1e-3;  // s
  bool bypass = false;
};

struct PlantConfig {
  std::array<KinematicCoefficients, kMorphCount> morphs;
  double mismatch = 0.0;  // bounded non-quadratic perturbation amplitude, mm
  ForceCurveParams force;
  DynamicsParams dyn;
  bool remanence_enabled = false;
  double b_r = 0.05;   // remanent offset as equivalent coil current, A
  double i_sat = 0.45; // excitation magnitude that latches the remanence, A
  double noise_sigma = 0.0;  // measurement noise std, mm
  std::uint64_t seed = 0;
  NeedleSpec needle;

  const KinematicCoefficients& coeffs(MorphState m) const {
    return morphs[morph_index(m)];
  }
  ReferenceState reference() const {
    return {morphs[morph_index(MorphState::Main)].b.template head<3>()};
  }
};

// Benchmark plant: same structure as the calibrated preset but with a
// rigid upright needle (P_n = P_p + n1*z), so Eq.-style platform
// reconstruction from two tracked points is exact and identification can
// be checked against the generating coefficients to machine precision.
PlantConfig default_config();

// Plant calibrated to the published workspace, force and frequency
// response figures. Loaded by `preset = paper`.
PlantConfig calibrated_config();

void validate(const PlantConfig& cfg);  // throws ConfigError

// ZOH discretization of the two-mode filter (shared by all channels).
struct FilterDiscretization {
  Eigen::Matrix4d ad;
  Eigen::Vector4d bd;
  Eigen::RowVector4d c;
  double dt;
};
FilterDiscretization discretize(const DynamicsParams& dyn);

// Closed-form magnitude of the mode filter at frequency f (Hz).
double filter_magnitude(const DynamicsParams& dyn, double f_hz);

struct PlantState {
  MorphState morph = MorphState::Main;
  Vec6 x = Vec6::Zero();  // last reported pose [P_p; P_n], mm
  Eigen::Matrix<double, 4, 6> modes = Eigen::Matrix<double, 4, 6>::Zero();
  std::array<int, 4> remanence = {0, 0, 0, 0};  // sign per coil
  double t = 0.0;
  std::array<double, 4> overdrive_s = {0, 0, 0, 0};  // latch dwell timers
  std::mt19937_64 rng;
  FilterDiscretization disc;
};

// State at rest: main morph, filters settled at the zero-current pose.
PlantState init_state(const PlantConfig& cfg);

// Quasi-static pose for a current vector in a given morph. Includes the
// mismatch perturbation; remanence_signs shift the effective currents.
Vec6 static_response(const CurrentVector& i, MorphState morph,
                     const PlantConfig& cfg,
                     const std::array<int, 4>& remanence_signs = {0, 0, 0, 0});

// Elastic and magnetic force at gap z (mm) and drive current i (A).
ForcePoint force_curves(double z, double i, ForceMode mode,
                        const ForceCurveParams& fp);

struct LatchReport {
  bool pull_in;
  bool release;
};
// pull_in: attraction beats the elastic force along the whole approach
// path at full drive. release: reversed full drive (helped by the film)
// beats the permanent attraction at the cap gap.
LatchReport latch_predicates(const ForceCurveParams& fp);

// Force parameters seen by a single leg magnet against its own coil.
ForceCurveParams side_leg_params(const ForceCurveParams& fp);

// Latch the remanence sign of any coil whose drive reaches i_sat.
void remanence_update(PlantState& state, const CurrentVector& i,
                      const PlantConfig& cfg);

// Advance the plant by one dt step under the commanded currents.
void step(PlantState& state, const CurrentVector& i, const PlantConfig& cfg);

enum class Direction { X, Y, Z };
enum class MorphRegion { Main, B4ToMain };

// Modeled maximum static force at the end effector, mN.
double blocked_force(Direction dir, MorphRegion region,
                     const PlantConfig& cfg);

enum class MorphPulse {
  EnterSide1,
  EnterSide2,
  EnterSide3,
  DrawCenter,
  ExitToMain,
};

// Run the scripted switching pulse (+/-0.5 A, 0.05 s) through the
// simulation. The morph changes only if the latch predicates allow it.
void morph_transition(PlantState& state, MorphPulse pulse,
                      const PlantConfig& cfg);

}  // namespace softmanip
