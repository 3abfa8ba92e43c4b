#include "softmanip/identification.hpp"

#include <random>

namespace softmanip {

CalibrationDataset generate_dataset(const PlantConfig& cfg, MorphState morph,
                                    int levels_per_coil, double lo, double hi,
                                    bool allow_unsafe, double marker_len_mm) {
  if (levels_per_coil < 2)
    throw InvalidInputError("generate_dataset: need at least 2 levels");
  if (!(lo < hi))
    throw InvalidInputError("generate_dataset: bounds must satisfy lo < hi");
  if ((lo < kMainSafeMinA || hi > kMainSafeMaxA) && !allow_unsafe)
    throw InvalidInputError(
        "generate_dataset: bounds exceed the main-morph-safe range; pass the "
        "unsafe override to proceed");
  if (!(marker_len_mm > 0.0))
    throw InvalidInputError("generate_dataset: marker length must be > 0");

  CalibrationDataset data;
  data.morph = morph;
  data.needle = cfg.needle;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, cfg.noise_sigma);

  const int n = levels_per_coil;
  auto level = [n, lo, hi](int q) { return lo + (hi - lo) * q / double(n - 1); };
  int idx = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e) {
          CalibrationSample s;
          s.t = 0.01 * idx++;
          s.i = {level(a), level(b), level(c), level(e)};
          const Vec6 x = static_response(s.i, morph, cfg);
          const Vec3 p_p = x.head<3>();
          const Vec3 p_n = x.tail<3>();
          const Vec3 dir = p_n - p_p;
          const double len = dir.norm();
          if (len <= kDirectionEpsilonMm)
            throw DegenerateDirectionError(
                "generate_dataset: zero-length needle direction");
          s.p_n = p_n;
          s.p_m = p_n - marker_len_mm * (dir / len);
          if (cfg.noise_sigma > 0.0) {
            for (int r = 0; r < 3; ++r) s.p_m[r] += noise(rng);
            for (int r = 0; r < 3; ++r) s.p_n[r] += noise(rng);
          }
          data.samples.push_back(s);
        }
  return data;
}

FitResult fit(const CalibrationDataset& data) {
  const int n = static_cast<int>(data.samples.size());
  if (n < 9)
    throw SingularDesignError(
        "fit: at least 9 samples are needed for 9 regressors");

  Eigen::MatrixXd m(n, 9);
  Eigen::MatrixXd y(n, 6);
  for (int r = 0; r < n; ++r) {
    const auto& s = data.samples[r];
    m.row(r).head<8>() = augment(s.i).v.transpose();
    m(r, 8) = 1.0;
    Vec3 p_p;
    try {
      p_p = platform_from_needle(s.p_n, s.p_m, data.needle.n1);
    } catch (const DegenerateDirectionError& e) {
      throw DegenerateDirectionError("fit: row " + std::to_string(r) + ": " +
                                     e.what());
    }
    y.row(r).head<3>() = p_p.transpose();
    y.row(r).tail<3>() = s.p_n.transpose();
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  qr.setThreshold(1e-10);
  FitDiagnostics diag;
  diag.n_samples = n;
  diag.rank = static_cast<int>(qr.rank());
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  diag.condition = sv(sv.size() - 1) > 0.0
                       ? sv(0) / sv(sv.size() - 1)
                       : std::numeric_limits<double>::infinity();
  if (diag.rank < 9)
    throw SingularDesignError(
        "fit: design matrix rank " + std::to_string(diag.rank) +
        " < 9; excitation does not span the quadratic model");

  const Eigen::MatrixXd theta = qr.solve(y);  // 9 x 6
  const Eigen::MatrixXd resid = m * theta - y;
  diag.rms_residual_mm = std::sqrt(resid.squaredNorm() / resid.size());
  diag.max_residual_mm = resid.cwiseAbs().maxCoeff();

  FitResult res;
  res.coeffs.morph = data.morph;
  res.coeffs.needle = data.needle;
  res.coeffs.a = theta.topRows<8>().transpose();
  res.coeffs.b = theta.row(8).transpose();
  res.diag = diag;
  return res;
}

}  // namespace softmanip
