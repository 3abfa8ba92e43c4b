#include <doctest.h>

#include <algorithm>
#include <random>

#include "softmanip/identification.hpp"

using namespace softmanip;

namespace {

double rel_err(const KinematicCoefficients& got,
               const KinematicCoefficients& want) {
  const double num = (got.a - want.a).norm() + (got.b - want.b).norm();
  const double den = want.a.norm() + want.b.norm();
  return num / den;
}

}  // namespace

TEST_CASE("noiseless grid recovers the generating coefficients") {
  const PlantConfig cfg = default_config();
  const auto data = generate_dataset(cfg, MorphState::Main, 8);
  CHECK(data.samples.size() == 4096);

  const FitResult res = fit(data);
  CHECK(res.diag.rank == 9);
  CHECK(rel_err(res.coeffs, cfg.coeffs(MorphState::Main)) < 1e-6);
  CHECK(res.diag.rms_residual_mm < 1e-9);
}

TEST_CASE("noiseless rows equal the static response exactly") {
  const PlantConfig cfg = default_config();
  const auto data = generate_dataset(cfg, MorphState::Main, 3);
  for (const auto& s : data.samples) {
    const Vec6 x = static_response(s.i, MorphState::Main, cfg);
    CHECK(s.p_n == x.tail<3>());
  }
}

TEST_CASE("nine affinely independent rows interpolate exactly") {
  const PlantConfig cfg = default_config();
  CalibrationDataset data;
  data.needle = cfg.needle;
  std::vector<CurrentVector> probes = {{0, 0, 0, 0}};
  for (int c = 0; c < 4; ++c) {
    CurrentVector a, b;
    a[c] = 0.3;
    b[c] = -0.4;
    probes.push_back(a);
    probes.push_back(b);
  }
  double t = 0.0;
  for (const auto& i : probes) {
    CalibrationSample s;
    s.t = t++;
    s.i = i;
    const Vec6 x = static_response(i, MorphState::Main, cfg);
    s.p_n = x.tail<3>();
    const Vec3 dir = (x.tail<3>() - x.head<3>()).normalized();
    s.p_m = s.p_n - 20.0 * dir;
    data.samples.push_back(s);
  }
  const FitResult res = fit(data);
  CHECK(res.diag.n_samples == 9);
  CHECK(res.diag.rank == 9);
  CHECK(res.diag.max_residual_mm < 1e-9);
}

TEST_CASE("degenerate designs are rejected") {
  const PlantConfig cfg = default_config();
  CalibrationDataset data;
  data.needle = cfg.needle;
  // 20 copies of the same row: rank 1
  for (int k = 0; k < 20; ++k) {
    CalibrationSample s;
    s.t = k;
    s.i = {0.1, 0.1, 0.1, 0.1};
    const Vec6 x = static_response(s.i, MorphState::Main, cfg);
    s.p_n = x.tail<3>();
    s.p_m = s.p_n - Vec3(0, 0, 20);
    data.samples.push_back(s);
  }
  CHECK_THROWS_AS(fit(data), SingularDesignError);

  data.samples.resize(5);
  CHECK_THROWS_AS(fit(data), SingularDesignError);
}

TEST_CASE("degenerate needle points abort the fit with the row index") {
  const PlantConfig cfg = default_config();
  auto data = generate_dataset(cfg, MorphState::Main, 2);
  data.samples[7].p_m = data.samples[7].p_n;
  try {
    fit(data);
    FAIL("expected DegenerateDirectionError");
  } catch (const DegenerateDirectionError& e) {
    CHECK(std::string(e.what()).find("row 7") != std::string::npos);
  }
}

TEST_CASE("zero-current row pins the fitted offset") {
  const PlantConfig cfg = default_config();
  const auto data = generate_dataset(cfg, MorphState::Main, 3);
  // levels = 3 over [-0.5, 0.4] does not include 0, so add it explicitly
  CalibrationDataset with_zero = data;
  CalibrationSample z;
  z.i = {};
  const Vec6 x0 = static_response({}, MorphState::Main, cfg);
  z.p_n = x0.tail<3>();
  z.p_m = z.p_n - 20.0 * (x0.tail<3>() - x0.head<3>()).normalized();
  with_zero.samples.push_back(z);
  const FitResult res = fit(with_zero);
  CHECK((res.coeffs.b.tail<3>() - x0.tail<3>()).norm() < 1e-9);
}

TEST_CASE("fit is equivariant under output translation") {
  const PlantConfig cfg = default_config();
  const auto data = generate_dataset(cfg, MorphState::Main, 4);
  const Vec3 d(1.5, -2.0, 3.25);
  CalibrationDataset shifted = data;
  for (auto& s : shifted.samples) {
    s.p_m += d;
    s.p_n += d;
  }
  const FitResult a = fit(data);
  const FitResult b = fit(shifted);
  CHECK((a.coeffs.a - b.coeffs.a).norm() < 1e-9);
  Vec6 dd;
  dd << d, d;
  CHECK((b.coeffs.b - a.coeffs.b - dd).norm() < 1e-9);
}

TEST_CASE("fit is invariant under row permutation") {
  const PlantConfig cfg = default_config();
  auto data = generate_dataset(cfg, MorphState::Main, 4);
  auto shuffled = data;
  std::mt19937 rng(9);
  std::shuffle(shuffled.samples.begin(), shuffled.samples.end(), rng);
  const FitResult a = fit(data);
  const FitResult b = fit(shuffled);
  CHECK((a.coeffs.a - b.coeffs.a).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((a.coeffs.b - b.coeffs.b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("coefficient error shrinks with sample count under noise") {
  // 3 levels is the smallest grid that identifies the quadratic terms
  // (2 levels make I^2 affine in I, a singular design)
  std::array<int, 3> levels = {3, 4, 8};  // 81, 256, 4096 rows
  std::array<std::vector<double>, 3> errs;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PlantConfig cfg = default_config();
    cfg.noise_sigma = 0.02;
    cfg.seed = seed;
    for (int li = 0; li < 3; ++li) {
      const auto data = generate_dataset(cfg, MorphState::Main, levels[li]);
      errs[li].push_back(
          rel_err(fit(data).coeffs, cfg.coeffs(MorphState::Main)));
    }
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  CHECK(median(errs[0]) > median(errs[1]));
  CHECK(median(errs[1]) > median(errs[2]));
}

TEST_CASE("unsafe excitation bounds require the override") {
  const PlantConfig cfg = default_config();
  CHECK_THROWS_AS(generate_dataset(cfg, MorphState::Main, 3, -0.6, 0.4),
                  InvalidInputError);
  CHECK_NOTHROW(generate_dataset(cfg, MorphState::Main, 3, -0.6, 0.4, true));
  CHECK_THROWS_AS(generate_dataset(cfg, MorphState::Main, 1), InvalidInputError);
}
