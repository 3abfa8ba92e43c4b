#pragma once

#include <Eigen/Dense>
#include <string>

#include "softmanip/errors.hpp"

namespace softmanip {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat68 = Eigen::Matrix<double, 6, 8>;

// Safe drive range for the main morph; beyond it a magnet may be drawn in.
inline constexpr double kMainSafeMinA = -0.5;
inline constexpr double kMainSafeMaxA = 0.4;

// Coil currents [I1 I2 I3 I4] in amperes. Coils 1-3 sit under the three
// legs, coil 4 is the central one under the top platform.
struct CurrentVector {
  double i1 = 0.0, i2 = 0.0, i3 = 0.0, i4 = 0.0;

  double operator[](int k) const {
    switch (k) {
      case 0: return i1;
      case 1: return i2;
      case 2: return i3;
      default: return i4;
    }
  }
  double& operator[](int k) {
    switch (k) {
      case 0: return i1;
      case 1: return i2;
      case 2: return i3;
      default: return i4;
    }
  }
  bool finite() const;
  bool main_morph_safe(double lo = kMainSafeMinA,
                       double hi = kMainSafeMaxA) const;
  Eigen::Vector4d vec() const { return {i1, i2, i3, i4}; }
};

// [I1..I4, I1^2..I4^2]: the regressor vector of the quadratic static map.
struct AugmentedInput {
  Vec8 v;
};

// Needle geometry: n1 is the distance between the two tracked points used
// for platform reconstruction; lever is the effective pivot-to-tip arm for
// converting angular rates to tip speed (slightly longer than n1 because
// the pivot sits below the platform).
struct NeedleSpec {
  double n1 = 40.0;     // mm
  double lever = 43.6;  // mm
};

// Platform position at zero current.
struct ReferenceState {
  Vec3 p_p0 = Vec3::Zero();
};

enum class MorphState {
  Main = 0,
  Leg1Latched = 1,
  Leg2Latched = 2,
  Leg3Latched = 3,
  CenterLatched = 4,
};
inline constexpr int kMorphCount = 5;

const char* to_string(MorphState m);
MorphState morph_from_string(const std::string& s);
inline int morph_index(MorphState m) { return static_cast<int>(m); }

// Fitted quadratic map X = A v + B with X = [P_p; P_n] (mm) and
// v = [I; I^2].
struct KinematicCoefficients {
  Mat68 a = Mat68::Zero();
  Vec6 b = Vec6::Zero();
  MorphState morph = MorphState::Main;
  NeedleSpec needle;
};

// One tracked measurement: two needle points plus the derived quantities.
struct PoseSample {
  double t = 0.0;                // s
  Vec3 p_m = Vec3::Zero();       // mm, lower tracked point
  Vec3 p_n = Vec3::Zero();       // mm, needle tip
  Vec3 p_p = Vec3::Zero();       // mm, reconstructed platform position
  Vec3 u_hat = Vec3::UnitZ();    // needle direction, unit
  Vec3 r = Vec3::Zero();         // alpha, beta, gamma in degrees
  Vec3 tr = Vec3::Zero();        // T_x, T_y, T_z in mm
};

// Tolerance below which two tracked points are treated as coincident.
// Far below the ~6 um camera resolution, so real samples never trip it.
inline constexpr double kDirectionEpsilonMm = 1e-6;

AugmentedInput augment(const CurrentVector& i);

// P_p = P_n - n1 * u_hat, u_hat = (P_n - P_m)/|P_n - P_m|.
Vec3 platform_from_needle(const Vec3& p_n, const Vec3& p_m, double n1);

// Direction cosines of the needle axis, in degrees, each in [0, 180].
// Note gamma is a direction cosine, not spin about the needle axis.
Vec3 rotation_from_direction(const Vec3& u_hat);

// T = P_p0 - P_p (sign convention kept as-is).
Vec3 translation(const Vec3& p_p, const ReferenceState& ref);

// Tip speed in m/s for an angular rate in deg/s about a lever in mm.
double tip_speed(double omega_deg_per_s, double lever_mm);

// Assemble the derived fields of a pose sample from raw tracked points.
PoseSample make_pose_sample(double t, const Vec3& p_m, const Vec3& p_n,
                            const NeedleSpec& needle,
                            const ReferenceState& ref);

}  // namespace softmanip
