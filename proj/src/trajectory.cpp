#include "softmanip/trajectory.hpp"

#include <cmath>

namespace softmanip {

namespace {

void check_spec(const PathSpec& spec) {
  if (!(spec.size_mm > 0)) throw InvalidInputError("path size must be > 0");
  if (!(spec.freq_hz > 0))
    throw InvalidInputError("path frequency must be > 0");
  if (spec.cycles < 1) throw InvalidInputError("need at least one cycle");
  if (spec.samples_per_cycle < 4)
    throw InvalidInputError("need at least 4 samples per cycle");
}

// 5-sample centered moving average, window truncated at the ends.
std::vector<double> smooth5(const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    int cnt = 0;
    for (int k = j - 2; k <= j + 2; ++k) {
      if (k < 0 || k >= n) continue;
      s += v[k];
      ++cnt;
    }
    out[j] = s / cnt;
  }
  return out;
}

}  // namespace

Vec3 default_center(const KinematicCoefficients& coeffs) {
  return coeffs.b.tail<3>();
}

Vec3 path_point(const PathSpec& spec, const Vec3& center, double phase) {
  const double u = phase - std::floor(phase);
  if (spec.shape == PathShape::Circle) {
    const double r = spec.size_mm / 2.0;
    const double a = 2.0 * M_PI * u;
    return center + Vec3(r * std::cos(a), r * std::sin(a), 0.0);
  }
  // Square traversed counter-clockwise by arc length, corners at k/4.
  const double s = spec.size_mm, hs = s / 2.0;
  const Vec3 corners[4] = {center + Vec3(hs, hs, 0), center + Vec3(-hs, hs, 0),
                           center + Vec3(-hs, -hs, 0),
                           center + Vec3(hs, -hs, 0)};
  const double w = u * 4.0;
  const int edge = std::min(3, static_cast<int>(w));
  const double f = w - edge;
  return corners[edge] + f * (corners[(edge + 1) % 4] - corners[edge]);
}

std::vector<RefPoint> gen_path(const PathSpec& spec, const Vec3& center) {
  check_spec(spec);
  std::vector<RefPoint> out;
  const int n = spec.cycles * spec.samples_per_cycle;
  out.reserve(n);
  for (int j = 0; j < n; ++j) {
    RefPoint r;
    r.phase = double(j % spec.samples_per_cycle) / spec.samples_per_cycle;
    r.t = j / (spec.freq_hz * spec.samples_per_cycle);
    r.target = path_point(spec, center, r.phase);
    out.push_back(r);
  }
  return out;
}

Trajectory follow(const PlantConfig& cfg, const KinematicCoefficients& coeffs,
                  const PathSpec& spec) {
  check_spec(spec);
  const Vec3 center = spec.center.value_or(default_center(coeffs));

  // One IK solve per unique phase sample, warm-started around the path.
  const int spc = spec.samples_per_cycle;
  std::vector<CurrentVector> cmd(spc);
  CurrentVector prev;
  for (int j = 0; j < spc; ++j) {
    const Vec3 target = path_point(spec, center, double(j) / spc);
    try {
      cmd[j] = inverse_from(coeffs, target, prev);
    } catch (const UnreachableError& e) {
      throw UnreachableError("follow: sample " + std::to_string(j) + ": " +
                                 e.what(),
                             e.best_residual_mm, e.best_currents);
    }
    prev = cmd[j];
  }

  PlantState state = init_state(cfg);
  if (coeffs.morph != state.morph) {
    // Start already latched in the path's morph, settled at rest.
    state.morph = coeffs.morph;
    for (int k = 0; k < 500; ++k) step(state, {}, cfg);
  }
  const MorphState morph0 = state.morph;

  Trajectory traj;
  traj.dt = cfg.dyn.dt;
  const double duration = spec.cycles / spec.freq_hz;
  const int steps = static_cast<int>(std::llround(duration / cfg.dyn.dt));
  traj.t.reserve(steps);
  traj.i.reserve(steps);
  traj.x.reserve(steps);
  for (int k = 0; k < steps; ++k) {
    const double t = k * cfg.dyn.dt;
    int idx = static_cast<int>(std::floor(t * spec.freq_hz * spc)) % spc;
    if (idx < 0) idx = 0;
    step(state, cmd[idx], cfg);
    if (state.morph != morph0)
      throw MorphTransitionError("follow: morph changed mid-path at t = " +
                                 std::to_string(state.t));
    traj.t.push_back(state.t);
    traj.i.push_back(cmd[idx]);
    traj.x.push_back(state.x);
  }
  return traj;
}

PathMetrics metrics(const Trajectory& traj, const PathSpec& spec,
                    const Vec3& center, int skip_cycles) {
  check_spec(spec);
  if (traj.t.size() < 2) throw InvalidInputError("metrics: empty trajectory");
  const double t_begin = skip_cycles / spec.freq_hz + traj.t.front();
  // each sample represents one dt of coverage
  const double covered = traj.t.back() - traj.t.front() + traj.dt;
  if (covered + 1e-9 < (skip_cycles + 1) / spec.freq_hz)
    throw InvalidInputError("metrics: trajectory covers less than one cycle");

  std::size_t j0 = 0;
  while (j0 < traj.t.size() && traj.t[j0] < t_begin) ++j0;

  PathMetrics pm;
  // Mean tip speed over the analysis window.
  double len = 0.0;
  for (std::size_t j = j0 + 1; j < traj.t.size(); ++j)
    len += (traj.x[j].tail<3>() - traj.x[j - 1].tail<3>()).norm();
  pm.mean_speed_mm_s = len / (traj.t.back() - traj.t[j0]);

  // Accuracy: phase-matched distance to the continuous reference.
  double acc2 = 0.0;
  std::size_t n_acc = 0;
  constexpr int kBins = 360;
  std::vector<std::vector<Vec3>> bins(kBins);
  for (std::size_t j = j0; j < traj.t.size(); ++j) {
    const double phase = traj.t[j] * spec.freq_hz;
    const Vec3 tip = traj.x[j].tail<3>();
    acc2 += (tip - path_point(spec, center, phase)).squaredNorm();
    ++n_acc;
    const double u = phase - std::floor(phase);
    // half-bin offset: samples that land exactly on k/kBins sit at the
    // center of bin k instead of straddling a boundary
    const int bin = static_cast<int>(u * kBins + 0.5) % kBins;
    bins[bin].push_back(tip);
  }
  pm.rms_accuracy_um = std::sqrt(acc2 / n_acc) * 1000.0;

  // Precision: spread about the per-phase-bin cross-cycle mean.
  const double cycles_seen =
      (traj.t.back() - traj.t[j0] + traj.dt) * spec.freq_hz;
  if (cycles_seen >= 2.0 - 1e-9) {
    double prec2 = 0.0;
    std::size_t n_prec = 0;
    for (const auto& bin : bins) {
      if (bin.size() < 2) continue;
      Vec3 mean = Vec3::Zero();
      for (const auto& p : bin) mean += p;
      mean /= double(bin.size());
      for (const auto& p : bin) prec2 += (p - mean).squaredNorm();
      n_prec += bin.size();
    }
    if (n_prec > 0)
      pm.rms_precision_um = std::sqrt(prec2 / n_prec) * 1000.0;
  }

  if (spec.shape == PathShape::Circle) {
    double rsum = 0.0;
    for (std::size_t j = j0; j < traj.t.size(); ++j)
      rsum += (traj.x[j].tail<3>().head<2>() - center.head<2>()).norm();
    const double mean_r = rsum / (traj.t.size() - j0);
    pm.mean_radius_mm = mean_r;
    pm.amplitude_db = 20.0 * std::log10(mean_r / (spec.size_mm / 2.0));
  }
  return pm;
}

std::vector<BodePoint> amplitude_sweep(const PlantConfig& cfg,
                                       const KinematicCoefficients& coeffs,
                                       const PathSpec& tmpl,
                                       const std::vector<double>& freqs) {
  const double nyquist = 0.5 / cfg.dyn.dt;
  std::vector<BodePoint> out;
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    const double f = freqs[k];
    if (!(f > 0.0) || f >= nyquist)
      throw InvalidInputError("sweep: frequency out of (0, Nyquist)");
    if (k > 0 && freqs[k] <= freqs[k - 1])
      throw InvalidInputError("sweep: frequencies must be strictly sorted");
    PathSpec spec = tmpl;
    spec.freq_hz = f;
    // Let the resonant transient die out before measuring.
    const int warmup = std::max(1, static_cast<int>(std::ceil(0.2 * f)));
    spec.cycles = warmup + 3;
    const Vec3 center = spec.center.value_or(default_center(coeffs));
    const Trajectory traj = follow(cfg, coeffs, spec);
    const PathMetrics pm = metrics(traj, spec, center, warmup);
    out.push_back({f, pm.amplitude_db.value_or(0.0),
                   pm.mean_radius_mm.value_or(0.0)});
  }
  return out;
}

std::vector<ChirpPoint> chirp_response(const PlantConfig& cfg, int coil,
                                       double f_lo, double f_hi,
                                       double duration_s, double amplitude_a) {
  if (coil < 0 || coil > 3) throw InvalidInputError("chirp: coil 0..3");
  if (!(f_lo > 0 && f_hi > f_lo)) throw InvalidInputError("chirp: bad range");
  if (!(duration_s * f_lo >= 3.0))
    throw InvalidInputError("chirp: need >= 3 cycles at the low end");

  const double dt = cfg.dyn.dt;
  const double rate = (f_hi - f_lo) / duration_s;
  auto chirp_phase = [&](double t) {
    return 2.0 * M_PI * (f_lo * t + 0.5 * rate * t * t);
  };

  const int n = static_cast<int>(std::llround(duration_s / dt));
  PlantState state = init_state(cfg);
  std::vector<Vec3> tip(n);
  std::vector<double> ts(n);
  for (int k = 0; k < n; ++k) {
    const double t = k * dt;
    CurrentVector i;
    i[coil] = amplitude_a * std::sin(chirp_phase(t));
    step(state, i, cfg);
    ts[k] = t;  // phase of the command applied over this step
    tip[k] = state.x.tail<3>();
  }

  // Quasi-static fundamental amplitude per axis: the linear coefficient
  // of the driven coil (the quadratic term only feeds DC + 2nd harmonic).
  const auto& a = cfg.coeffs(MorphState::Main).a;
  Vec3 stat;
  for (int ax = 0; ax < 3; ++ax) stat[ax] = std::abs(a(3 + ax, coil)) * amplitude_a;

  std::vector<ChirpPoint> out;
  for (double f = std::ceil(f_lo); f <= std::floor(f_hi); f += 1.0) {
    const double t_c = (f - f_lo) / rate;
    const double half = 1.5 / f;  // three cycles total
    const int k_lo = std::max(0, static_cast<int>((t_c - half) / dt));
    const int k_hi = std::min(n - 1, static_cast<int>((t_c + half) / dt));
    if (k_hi - k_lo < 8) continue;
    Eigen::MatrixXd m(k_hi - k_lo + 1, 3);
    Eigen::MatrixXd y(k_hi - k_lo + 1, 3);
    for (int k = k_lo; k <= k_hi; ++k) {
      const double ph = chirp_phase(ts[k]);
      m(k - k_lo, 0) = std::sin(ph);
      m(k - k_lo, 1) = std::cos(ph);
      m(k - k_lo, 2) = 1.0;
      y.row(k - k_lo) = tip[k].transpose();
    }
    const Eigen::MatrixXd sol = m.colPivHouseholderQr().solve(y);
    ChirpPoint cp;
    cp.freq_hz = f;
    for (int ax = 0; ax < 3; ++ax) {
      const double amp = std::hypot(sol(0, ax), sol(1, ax));
      cp.mag[ax] = stat[ax] > 1e-12 ? amp / stat[ax] : 0.0;
    }
    out.push_back(cp);
  }
  return out;
}

SpeedMetrics speed_metrics(const Trajectory& traj, const NeedleSpec& needle) {
  const int n = static_cast<int>(traj.t.size());
  if (n < 3) throw InvalidInputError("speed_metrics: need >= 3 samples");
  SpeedMetrics sm;
  const double dt = traj.dt;

  for (int ax = 0; ax < 3; ++ax) {
    std::vector<double> v(n, 0.0);
    for (int j = 1; j + 1 < n; ++j)
      v[j] = (traj.x[j + 1][3 + ax] - traj.x[j - 1][3 + ax]) / (2.0 * dt);
    v[0] = v[1];
    v[n - 1] = v[n - 2];
    const auto vs = smooth5(v);
    double best = 0.0;
    for (double q : vs) best = std::max(best, std::abs(q));
    sm.max_linear_m_s[ax] = best / 1000.0;  // mm/s -> m/s
  }

  std::vector<double> alpha(n), beta(n);
  for (int j = 0; j < n; ++j) {
    const Vec3 d = traj.x[j].tail<3>() - traj.x[j].head<3>();
    const double nrm = d.norm();
    if (nrm <= kDirectionEpsilonMm) {
      alpha[j] = beta[j] = 90.0;
      continue;
    }
    const Vec3 ang = rotation_from_direction(d / nrm);
    alpha[j] = ang[0];
    beta[j] = ang[1];
  }
  auto max_rate = [&](const std::vector<double>& series) {
    std::vector<double> w(n, 0.0);
    for (int j = 1; j + 1 < n; ++j)
      w[j] = (series[j + 1] - series[j - 1]) / (2.0 * dt);
    w[0] = w[1];
    w[n - 1] = w[n - 2];
    const auto ws = smooth5(w);
    double best = 0.0;
    for (double q : ws) best = std::max(best, std::abs(q));
    return best;
  };
  sm.max_alpha_deg_s = max_rate(alpha);
  sm.max_beta_deg_s = max_rate(beta);
  (void)needle;
  return sm;
}

}  // namespace softmanip
