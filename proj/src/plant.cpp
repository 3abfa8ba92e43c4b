#include "softmanip/plant.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace softmanip {

namespace {

constexpr double kLatchDwellS = 0.05;
constexpr double kPathScanStepMm = 0.01;

// Leg axis directions in the XY plane (leg 1 along +X).
const Eigen::Matrix<double, 3, 2> kLegDirs = [] {
  Eigen::Matrix<double, 3, 2> e;
  const double s3 = std::sqrt(3.0) / 2.0;
  e << 1.0, 0.0, -0.5, s3, -0.5, -s3;
  return e;
}();

void rotate_xy_rows(Eigen::Ref<Mat68> a, Eigen::Ref<Vec6> b, int row_x,
                    int row_y, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  const Eigen::RowVector<double, 8> ax = a.row(row_x), ay = a.row(row_y);
  a.row(row_x) = c * ax - s * ay;
  a.row(row_y) = s * ax + c * ay;
  const double bx = b[row_x], by = b[row_y];
  b[row_x] = c * bx - s * by;
  b[row_y] = s * bx + c * by;
}

// Main-morph coefficients of the calibrated plant. Rows [P_p; P_n].
KinematicCoefficients calibrated_main(const NeedleSpec& needle) {
  KinematicCoefficients k;
  k.morph = MorphState::Main;
  k.needle = needle;

  const double g_tip = 14.97 / 1.8;  // mm/A along each leg axis at the tip
  const double g_plat_x = 1.078;     // platform moves far less than the tip
  const double g_plat_y = 0.0039;
  for (int leg = 0; leg < 3; ++leg) {
    k.a(3, leg) = g_tip * kLegDirs(leg, 0);
    k.a(4, leg) = g_tip * kLegDirs(leg, 1);
    k.a(0, leg) = g_plat_x * kLegDirs(leg, 0);
    k.a(1, leg) = g_plat_y * kLegDirs(leg, 1);
    // All coils pull the structure down when attracting.
    k.a(2, leg) = -0.3;
    k.a(2, leg + 4) = -0.1;
  }
  k.a(2, 3) = -3.04;
  k.a(2, 7) = -0.5;
  k.a.row(5) = k.a.row(2);  // rigid platform: tip z tracks platform z
  k.b << 0.0, 0.0, 30.0, 0.0, 0.0, 70.0;
  return k;
}

// Side-morph template for leg 1 latched (wing along +X), rotated into
// place for legs 2 and 3. The two free leg coils are taken in cyclic
// order so the three wings are exact 120-degree copies of each other.
KinematicCoefficients calibrated_side(int latched_leg,
                                      const NeedleSpec& needle) {
  KinematicCoefficients k;
  k.morph = static_cast<MorphState>(latched_leg + 1);
  k.needle = needle;

  const int ca = (latched_leg + 1) % 3;  // first free coil
  const int cb = (latched_leg + 2) % 3;  // second free coil
  const double wing_r = 26.2663;  // mm, radial offset of the wing center
  const double g_rad = 2.667 / 2.0;
  const double g_tan = 5.389 * std::sqrt(3.0) / 2.0;

  // Tip rows, local frame (x radial, y tangential).
  k.a(3, ca) = g_rad;
  k.a(3, cb) = g_rad;
  k.a(4, ca) = g_tan;
  k.a(4, cb) = -g_tan;
  k.a(5, 3) = -3.0;
  k.a(5, 7) = -0.5;
  k.b[3] = wing_r;
  k.b[4] = 0.0;
  k.b[5] = 61.2;

  // Platform rows: needle tilted ~20 degrees outward, smaller local
  // excursion than the tip.
  const double tilt = 20.0 * M_PI / 180.0;
  k.a.row(0) = 0.3 * k.a.row(3);
  k.a.row(1) = 0.3 * k.a.row(4);
  k.a.row(2) = 0.3 * k.a.row(5);
  k.b[0] = wing_r - needle.n1 * std::sin(tilt);
  k.b[1] = 0.0;
  k.b[2] = 61.2 - needle.n1 * std::cos(tilt);

  const double theta = latched_leg * 2.0 * M_PI / 3.0;
  rotate_xy_rows(k.a, k.b, 0, 1, theta);
  rotate_xy_rows(k.a, k.b, 3, 4, theta);
  return k;
}

KinematicCoefficients calibrated_center(const NeedleSpec& needle) {
  KinematicCoefficients k;
  k.morph = MorphState::CenterLatched;
  k.needle = needle;
  k.b << 0.0, 0.0, 21.5, 0.0, 0.0, 61.5;
  return k;
}

// Smooth bounded perturbation used to dial model mismatch into the
// plant: a sum of three sinusoids of the currents per output row, with
// fixed incommensurate weights. |value| <= eps.
double mismatch_term(int row, const Eigen::Vector4d& i, double eps) {
  double s = 0.0;
  for (int j = 0; j < 3; ++j) {
    double arg = 0.7 * row + 1.3 * j;
    for (int c = 0; c < 4; ++c)
      arg += (1.0 + 0.3 * ((row * 7 + j * 3 + c * 5) % 11)) * i[c];
    s += std::sin(arg);
  }
  return eps * s / 3.0;
}

int latched_coil(MorphState m) {
  switch (m) {
    case MorphState::Leg1Latched: return 0;
    case MorphState::Leg2Latched: return 1;
    case MorphState::Leg3Latched: return 2;
    case MorphState::CenterLatched: return 3;
    default: return -1;
  }
}

Eigen::Vector4d equilibrium_modes(const FilterDiscretization& d, double u) {
  return (Eigen::Matrix4d::Identity() - d.ad)
      .colPivHouseholderQr()
      .solve(d.bd * u);
}

double main_tip_z_travel(const PlantConfig& cfg) {
  // Tip z extent of the main morph over the safe current box.
  const auto& k = cfg.coeffs(MorphState::Main);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  const int n = 8;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e) {
          auto lv = [n](int q) {
            return kMainSafeMinA +
                   (kMainSafeMaxA - kMainSafeMinA) * q / double(n - 1);
          };
          CurrentVector i{lv(a), lv(b), lv(c), lv(e)};
          const double z = (k.a.row(5) * augment(i).v)(0) + k.b[5];
          lo = std::min(lo, z);
          hi = std::max(hi, z);
        }
  return hi - lo;
}

}  // namespace

PlantConfig calibrated_config() {
  PlantConfig cfg;
  cfg.morphs[morph_index(MorphState::Main)] = calibrated_main(cfg.needle);
  for (int leg = 0; leg < 3; ++leg)
    cfg.morphs[leg + 1] = calibrated_side(leg, cfg.needle);
  cfg.morphs[morph_index(MorphState::CenterLatched)] =
      calibrated_center(cfg.needle);
  return cfg;
}

PlantConfig default_config() {
  PlantConfig cfg = calibrated_config();
  // Force P_n = P_p + n1*z so two-point platform reconstruction is exact.
  for (auto& k : cfg.morphs) {
    k.a.row(0) = k.a.row(3);
    k.a.row(1) = k.a.row(4);
    k.a.row(2) = k.a.row(5);
    k.b[0] = k.b[3];
    k.b[1] = k.b[4];
    k.b[2] = k.b[5] - cfg.needle.n1;
  }
  return cfg;
}

void validate(const PlantConfig& cfg) {
  const auto& f = cfg.force;
  if (!(f.k_e > 0 && f.a0 > 0 && f.a1 > 0 && f.z0 > 0))
    throw ConfigError("force: k_e, a0, a1, z0 must be positive");
  if (f.m != 1 && f.m != 2) throw ConfigError("force.m must be 1 or 2");
  if (f.h < 0) throw ConfigError("force.h must be >= 0");
  if (!(f.d > 0)) throw ConfigError("force.d must be positive");
  const auto& d = cfg.dyn;
  if (!(d.f1 > 0)) throw ConfigError("dyn.f1 must be positive (f1 > 0)");
  if (!(d.f1 < d.f_z && d.f_z < d.f2))
    throw ConfigError("dyn: need 0 < f1 < f_z < f2");
  if (!(d.zeta1 > 0 && d.zeta1 < 1 && d.zeta2 > 0 && d.zeta2 < 1 &&
        d.zeta_z > 0 && d.zeta_z < 1))
    throw ConfigError("dyn: damping ratios must lie in (0, 1)");
  if (!(d.dt > 0)) throw ConfigError("dyn.dt must be positive");
  if (cfg.mismatch < 0) throw ConfigError("mismatch must be >= 0");
  if (cfg.noise_sigma < 0) throw ConfigError("noise_sigma must be >= 0");
  if (!(cfg.needle.n1 > 0)) throw ConfigError("needle.n1 must be positive");
  if (cfg.needle.lever < cfg.needle.n1)
    throw ConfigError("needle.lever must be >= needle.n1");
  for (const auto& k : cfg.morphs) {
    if (!k.a.allFinite() || !k.b.allFinite())
      throw ConfigError("morph coefficients must be finite");
  }
  if (!cfg.coeffs(MorphState::CenterLatched).a.isZero(1e-9))
    throw ConfigError(
        "center-latched morph must map all currents to a single point");
}

FilterDiscretization discretize(const DynamicsParams& dyn) {
  const double w1 = 2 * M_PI * dyn.f1, w2 = 2 * M_PI * dyn.f2,
               wz = 2 * M_PI * dyn.f_z;
  // H(s) = (w1^2/wz^2)(s^2+2 zz wz s+wz^2)/(s^2+2 z1 w1 s+w1^2)
  //        * w2^2/(s^2+2 z2 w2 s+w2^2),   unity DC gain.
  const double n2 = w1 * w1 * w2 * w2 / (wz * wz);
  const double n1 = n2 * 2 * dyn.zeta_z * wz;
  const double n0 = w1 * w1 * w2 * w2;
  // den = (s^2+2 z1 w1 s+w1^2)(s^2+2 z2 w2 s+w2^2), monic.
  const double p1 = 2 * dyn.zeta1 * w1, p2 = 2 * dyn.zeta2 * w2;
  const double d3 = p1 + p2;
  const double d2 = w1 * w1 + w2 * w2 + p1 * p2;
  const double d1 = p1 * w2 * w2 + p2 * w1 * w1;
  const double d0 = w1 * w1 * w2 * w2;

  Eigen::Matrix<double, 5, 5> m = Eigen::Matrix<double, 5, 5>::Zero();
  m(0, 1) = m(1, 2) = m(2, 3) = 1.0;
  m(3, 0) = -d0;
  m(3, 1) = -d1;
  m(3, 2) = -d2;
  m(3, 3) = -d3;
  m(3, 4) = 1.0;  // input column
  const Eigen::Matrix<double, 5, 5> md = (m * dyn.dt).exp();

  FilterDiscretization disc;
  disc.ad = md.topLeftCorner<4, 4>();
  disc.bd = md.topRightCorner<4, 1>();
  disc.c << n0, n1, n2, 0.0;
  disc.dt = dyn.dt;
  return disc;
}

double filter_magnitude(const DynamicsParams& dyn, double f_hz) {
  const double w1 = 2 * M_PI * dyn.f1, w2 = 2 * M_PI * dyn.f2,
               wz = 2 * M_PI * dyn.f_z;
  const std::complex<double> s(0.0, 2 * M_PI * f_hz);
  const auto sos = [&](double w, double z) {
    return s * s + 2.0 * z * w * s + w * w;
  };
  const std::complex<double> h = (w1 * w1 / (wz * wz)) * sos(wz, dyn.zeta_z) /
                                 sos(w1, dyn.zeta1) * (w2 * w2) /
                                 sos(w2, dyn.zeta2);
  return std::abs(h);
}

PlantState init_state(const PlantConfig& cfg) {
  PlantState st;
  st.disc = discretize(cfg.dyn);
  st.rng.seed(cfg.seed);
  const Vec6 x0 = static_response({}, MorphState::Main, cfg);
  for (int ch = 0; ch < 6; ++ch) {
    st.modes.col(ch) = equilibrium_modes(st.disc, x0[ch]);
    st.x[ch] = st.disc.c * st.modes.col(ch);
  }
  return st;
}

Vec6 static_response(const CurrentVector& i, MorphState morph,
                     const PlantConfig& cfg,
                     const std::array<int, 4>& remanence_signs) {
  if (!i.finite())
    throw InvalidInputError("static_response: non-finite current");
  CurrentVector eff = i;
  if (cfg.remanence_enabled) {
    for (int k = 0; k < 4; ++k) eff[k] += cfg.b_r * remanence_signs[k];
  }
  const auto& k = cfg.coeffs(morph);
  Vec6 x = k.a * augment(eff).v + k.b;
  // A fully latched-down platform is held rigidly by the magnets, so the
  // unmodeled-compliance perturbation does not apply there.
  if (cfg.mismatch > 0.0 && morph != MorphState::CenterLatched) {
    for (int row = 0; row < 6; ++row)
      x[row] += mismatch_term(row, eff.vec(), cfg.mismatch);
  }
  return x;
}

ForcePoint force_curves(double z, double i, ForceMode mode,
                        const ForceCurveParams& fp) {
  if (z < 0.0) throw InvalidInputError("force_curves: gap must be >= 0");
  const double sign = (mode == ForceMode::Attract) ? 1.0 : -1.0;
  ForcePoint f;
  f.f_e = std::max(0.0, fp.k_e * (fp.d - z));
  f.f_m = (fp.m * fp.a0 + sign * fp.a1 * i) / std::pow(z + fp.z0, fp.p);
  return f;
}

LatchReport latch_predicates(const ForceCurveParams& fp) {
  LatchReport r{true, false};
  for (double z = 0.0; z <= fp.d + 1e-12; z += kPathScanStepMm) {
    const ForcePoint f = force_curves(z, fp.i_max_drive, ForceMode::Attract, fp);
    if (!(f.f_m > f.f_e)) {
      r.pull_in = false;
      break;
    }
  }
  // At the cap gap, reversed full drive plus the film's restoring force
  // must beat the permanent attraction.
  const double net_mag = (fp.a1 * fp.i_max_drive - fp.m * fp.a0) /
                         std::pow(fp.h + fp.z0, fp.p);
  const double assist = std::max(0.0, fp.k_e * (fp.d - fp.h));
  r.release = net_mag + assist > 0.0;
  return r;
}

ForceCurveParams side_leg_params(const ForceCurveParams& fp) {
  ForceCurveParams s = fp;
  s.m = 1;
  s.h = 0.0;  // no cap on the leg coils
  s.k_e = fp.k_e * fp.side_stiffness_scale;
  return s;
}

void remanence_update(PlantState& state, const CurrentVector& i,
                      const PlantConfig& cfg) {
  if (!cfg.remanence_enabled) return;
  for (int k = 0; k < 4; ++k) {
    if (i[k] >= cfg.i_sat)
      state.remanence[k] = 1;
    else if (i[k] <= -cfg.i_sat)
      state.remanence[k] = -1;
  }
}

void step(PlantState& state, const CurrentVector& i, const PlantConfig& cfg) {
  if (!i.finite()) throw InvalidInputError("step: non-finite current");
  const double dt = cfg.dyn.dt;
  remanence_update(state, i, cfg);

  const double thr = 0.98 * cfg.force.i_max_drive;
  if (state.morph == MorphState::Main) {
    for (int k = 0; k < 4; ++k) {
      if (i[k] >= thr)
        state.overdrive_s[k] += dt;
      else
        state.overdrive_s[k] = 0.0;
      if (state.overdrive_s[k] >= kLatchDwellS) {
        const bool can_latch =
            (k < 3) ? latch_predicates(side_leg_params(cfg.force)).pull_in
                    : latch_predicates(cfg.force).pull_in;
        if (can_latch) {
          state.morph = (k < 3) ? static_cast<MorphState>(k + 1)
                                : MorphState::CenterLatched;
          state.overdrive_s = {0, 0, 0, 0};
          break;
        }
      }
    }
  } else {
    const int k = latched_coil(state.morph);
    if (i[k] <= -thr) {
      const bool can_release =
          (k < 3) ? latch_predicates(side_leg_params(cfg.force)).release
                  : latch_predicates(cfg.force).release;
      if (can_release) {
        state.morph = MorphState::Main;
        state.overdrive_s = {0, 0, 0, 0};
      }
    }
  }

  const Vec6 x_ss = static_response(i, state.morph, cfg, state.remanence);
  if (cfg.dyn.bypass) {
    for (int ch = 0; ch < 6; ++ch)
      state.modes.col(ch) = equilibrium_modes(state.disc, x_ss[ch]);
    state.x = x_ss;
  } else {
    for (int ch = 0; ch < 6; ++ch) {
      state.modes.col(ch) =
          state.disc.ad * state.modes.col(ch) + state.disc.bd * x_ss[ch];
      state.x[ch] = state.disc.c * state.modes.col(ch);
    }
  }
  if (cfg.noise_sigma > 0.0) {
    std::normal_distribution<double> n(0.0, cfg.noise_sigma);
    for (int ch = 0; ch < 6; ++ch) state.x[ch] += n(state.rng);
  }
  state.t += dt;
}

double blocked_force(Direction dir, MorphRegion region,
                     const PlantConfig& cfg) {
  const auto& fp = cfg.force;
  const auto side = side_leg_params(fp);
  const double side_gap = (region == MorphRegion::B4ToMain)
                              ? fp.side_gap_b4
                              : fp.side_gap_main;
  const double f_side =
      force_curves(side_gap, fp.i_max_drive, ForceMode::Attract, side).f_m;

  if (dir == Direction::X || dir == Direction::Y) {
    const double fx = f_side * fp.lateral_lever;
    return (dir == Direction::X) ? fx : fx * fp.y_geometry;
  }

  const double z_lo = (region == MorphRegion::B4ToMain)
                          ? fp.h
                          : fp.d - main_tip_z_travel(cfg);
  double best = 0.0;
  const int n_scan = std::max(1, (int)std::lround((fp.d - z_lo) / 0.001));
  for (int j = 0; j <= n_scan; ++j) {
    const double z = z_lo + (fp.d - z_lo) * j / n_scan;
    const ForcePoint f = force_curves(z, fp.i_max_drive, ForceMode::Attract, fp);
    best = std::max(best, f.f_m - f.f_e);
  }
  return best + 3.0 * f_side;
}

void morph_transition(PlantState& state, MorphPulse pulse,
                      const PlantConfig& cfg) {
  int coil = -1;
  double amp = cfg.force.i_max_drive;
  switch (pulse) {
    case MorphPulse::EnterSide1:
    case MorphPulse::EnterSide2:
    case MorphPulse::EnterSide3:
      if (state.morph != MorphState::Main)
        throw MorphTransitionError("side morphs are entered from main only");
      coil = static_cast<int>(pulse) - static_cast<int>(MorphPulse::EnterSide1);
      break;
    case MorphPulse::DrawCenter:
      if (state.morph != MorphState::Main)
        throw MorphTransitionError("center latch is entered from main only");
      coil = 3;
      break;
    case MorphPulse::ExitToMain:
      if (state.morph == MorphState::Main)
        throw MorphTransitionError("already in the main morph");
      coil = latched_coil(state.morph);
      amp = -amp;
      break;
  }
  CurrentVector drive;
  drive[coil] = amp;
  const int pulse_steps =
      static_cast<int>(std::ceil((kLatchDwellS + 0.01) / cfg.dyn.dt));
  const int settle_steps = static_cast<int>(std::ceil(0.1 / cfg.dyn.dt));
  for (int k = 0; k < pulse_steps; ++k) step(state, drive, cfg);
  for (int k = 0; k < settle_steps; ++k) step(state, {}, cfg);
}

}  // namespace softmanip
