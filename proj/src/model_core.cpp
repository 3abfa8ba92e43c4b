#include "softmanip/model_core.hpp"

#include <cmath>

namespace softmanip {

namespace {
constexpr double kRadToDeg = 180.0 / M_PI;
}

bool CurrentVector::finite() const {
  return std::isfinite(i1) && std::isfinite(i2) && std::isfinite(i3) &&
         std::isfinite(i4);
}

bool CurrentVector::main_morph_safe(double lo, double hi) const {
  for (int k = 0; k < 4; ++k) {
    if ((*this)[k] < lo || (*this)[k] > hi) return false;
  }
  return true;
}

const char* to_string(MorphState m) {
  switch (m) {
    case MorphState::Main: return "main";
    case MorphState::Leg1Latched: return "leg1";
    case MorphState::Leg2Latched: return "leg2";
    case MorphState::Leg3Latched: return "leg3";
    case MorphState::CenterLatched: return "center";
  }
  return "?";
}

MorphState morph_from_string(const std::string& s) {
  for (int k = 0; k < kMorphCount; ++k) {
    auto m = static_cast<MorphState>(k);
    if (s == to_string(m)) return m;
  }
  throw InvalidInputError("unknown morph name: " + s);
}

AugmentedInput augment(const CurrentVector& i) {
  if (!i.finite()) throw InvalidInputError("augment: non-finite current");
  AugmentedInput a;
  for (int k = 0; k < 4; ++k) {
    a.v[k] = i[k];
    a.v[k + 4] = i[k] * i[k];
  }
  return a;
}

Vec3 platform_from_needle(const Vec3& p_n, const Vec3& p_m, double n1) {
  if (!(n1 > 0.0)) throw InvalidInputError("needle length must be positive");
  if (!p_n.allFinite() || !p_m.allFinite())
    throw InvalidInputError("platform_from_needle: non-finite point");
  const Vec3 d = p_n - p_m;
  const double norm = d.norm();
  if (norm <= kDirectionEpsilonMm)
    throw DegenerateDirectionError("tracked needle points coincide");
  return p_n - n1 * (d / norm);
}

Vec3 rotation_from_direction(const Vec3& u_hat) {
  if (std::abs(u_hat.norm() - 1.0) > 1e-6)
    throw InvalidInputError("rotation_from_direction: input is not unit");
  return {std::acos(std::clamp(u_hat.x(), -1.0, 1.0)) * kRadToDeg,
          std::acos(std::clamp(u_hat.y(), -1.0, 1.0)) * kRadToDeg,
          std::acos(std::clamp(u_hat.z(), -1.0, 1.0)) * kRadToDeg};
}

Vec3 translation(const Vec3& p_p, const ReferenceState& ref) {
  if (!p_p.allFinite() || !ref.p_p0.allFinite())
    throw InvalidInputError("translation: non-finite input");
  return ref.p_p0 - p_p;
}

double tip_speed(double omega_deg_per_s, double lever_mm) {
  if (!(lever_mm > 0.0)) throw InvalidInputError("lever must be positive");
  return omega_deg_per_s * (M_PI / 180.0) * lever_mm * 1e-3;
}

PoseSample make_pose_sample(double t, const Vec3& p_m, const Vec3& p_n,
                            const NeedleSpec& needle,
                            const ReferenceState& ref) {
  PoseSample s;
  s.t = t;
  s.p_m = p_m;
  s.p_n = p_n;
  s.p_p = platform_from_needle(p_n, p_m, needle.n1);
  s.u_hat = (p_n - p_m).normalized();
  s.r = rotation_from_direction(s.u_hat);
  s.tr = translation(s.p_p, ref);
  return s;
}

}  // namespace softmanip
