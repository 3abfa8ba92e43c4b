#include <doctest.h>

#include <random>

#include "softmanip/hull.hpp"
#include "softmanip/kinematics.hpp"

using namespace softmanip;

TEST_CASE("convex hull primitives") {
  // unit cube, volume 1
  std::vector<Vec3> cube;
  for (int k = 0; k < 8; ++k)
    cube.emplace_back(k & 1 ? 1.0 : 0.0, k & 2 ? 1.0 : 0.0, k & 4 ? 1.0 : 0.0);
  CHECK(convex_hull_volume(cube) == doctest::Approx(1.0).epsilon(1e-12));

  // interior points do not change the hull
  auto cube2 = cube;
  cube2.emplace_back(0.5, 0.5, 0.5);
  cube2.emplace_back(0.25, 0.5, 0.75);
  CHECK(convex_hull_volume(cube2) == doctest::Approx(1.0).epsilon(1e-12));

  // unit tetrahedron
  std::vector<Vec3> tet = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  CHECK(convex_hull_volume(tet) == doctest::Approx(1.0 / 6).epsilon(1e-12));

  // coplanar cloud is degenerate
  std::vector<Vec3> flat = {{0, 0, 2}, {1, 0, 2}, {0, 1, 2}, {1, 1, 2},
                            {0.3, 0.4, 2}};
  CHECK(convex_hull_volume(flat) == 0.0);

  // 2D: unit square, plus collinear degenerate case
  std::vector<Eigen::Vector2d> sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  const Hull2D h = convex_hull_2d(sq);
  CHECK(h.area == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h.vertices.size() == 4);
  std::vector<Eigen::Vector2d> line = {{0, 0}, {1, 1}, {2, 2}};
  CHECK(convex_hull_2d(line).area == 0.0);
}

TEST_CASE("forward evaluation") {
  const PlantConfig cfg = default_config();
  const auto& co = cfg.coeffs(MorphState::Main);
  CHECK(forward(co, {}) == co.b);

  // quadratic along a single-coil sweep: constant second differences
  const double h = 0.05;
  for (int row = 0; row < 6; ++row) {
    double prev_dd = 0.0;
    bool first = true;
    for (double i = -0.4; i <= 0.2; i += h) {
      const double f0 = forward(co, {i, 0, 0, 0})[row];
      const double f1 = forward(co, {i + h, 0, 0, 0})[row];
      const double f2 = forward(co, {i + 2 * h, 0, 0, 0})[row];
      const double dd = f2 - 2 * f1 + f0;
      if (!first) CHECK(dd == doctest::Approx(prev_dd).epsilon(1e-9));
      prev_dd = dd;
      first = false;
    }
  }

  // matches the mismatch-free plant
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(kMainSafeMinA, kMainSafeMaxA);
  for (int k = 0; k < 100; ++k) {
    const CurrentVector i{u(rng), u(rng), u(rng), u(rng)};
    CHECK((forward(co, i) - static_response(i, MorphState::Main, cfg))
              .cwiseAbs()
              .maxCoeff() < 1e-9);
  }
}

TEST_CASE("inverse kinematics round trip") {
  const PlantConfig cfg = calibrated_config();
  const auto& co = cfg.coeffs(MorphState::Main);
  const IkOptions opts;

  // the rest pose is reached by zero current (regularized optimum)
  const CurrentVector z = inverse(co, co.b.tail<3>(), opts);
  CHECK(z.vec().norm() < 1e-9);

  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(kMainSafeMinA, kMainSafeMaxA);
  for (int k = 0; k < 100; ++k) {
    const CurrentVector want{u(rng), u(rng), u(rng), u(rng)};
    const Vec3 target = forward_tip(co, want);
    const CurrentVector got = inverse(co, target, opts);
    CHECK((forward_tip(co, got) - target).norm() < 1e-3);
    for (int c = 0; c < 4; ++c) {
      CHECK(got[c] >= opts.lo);
      CHECK(got[c] <= opts.hi);
    }
  }
}

TEST_CASE("unreachable targets report the best effort") {
  const PlantConfig cfg = calibrated_config();
  const auto& co = cfg.coeffs(MorphState::Main);
  try {
    inverse(co, co.b.tail<3>() + Vec3(100, 0, 0));
    FAIL("expected UnreachableError");
  } catch (const UnreachableError& e) {
    CHECK(e.best_residual_mm > 50.0);
    for (double c : e.best_currents) {
      CHECK(c >= kMainSafeMinA);
      CHECK(c <= kMainSafeMaxA);
    }
  }
  CHECK_THROWS_AS(inverse(co, Vec3(0, 0, std::nan(""))), InvalidInputError);
}

TEST_CASE("workspace reports are consistent with their cloud") {
  const PlantConfig cfg = calibrated_config();
  const WorkspaceReport rep = workspace(cfg, MorphState::Main, 6);
  CHECK(rep.cloud.size() == 6 * 6 * 6 * 6);

  Vec3 lo = rep.cloud[0].tip, hi = rep.cloud[0].tip;
  for (const auto& p : rep.cloud) {
    lo = lo.cwiseMin(p.tip);
    hi = hi.cwiseMax(p.tip);
  }
  CHECK((rep.extents - (hi - lo)).norm() < 1e-12);
  CHECK(rep.hull_volume >= 0.0);

  // enlarging the bounds cannot shrink the hull
  const auto& co = cfg.coeffs(MorphState::Main);
  const double small_v = workspace(co, 6, -0.3, 0.2).hull_volume;
  const double big_v = workspace(co, 6, -0.5, 0.4).hull_volume;
  CHECK(big_v >= small_v - 1e-9);
}

TEST_CASE("main-morph projected hull has 3-fold symmetry") {
  const PlantConfig cfg = calibrated_config();
  const WorkspaceReport rep = workspace(cfg, MorphState::Main, 6);
  std::vector<Eigen::Vector2d> xy;
  for (const auto& p : rep.cloud) xy.emplace_back(p.tip.x(), p.tip.y());
  const Hull2D h = convex_hull_2d(xy);
  const Eigen::Rotation2D<double> rot(2.0 * M_PI / 3.0);
  for (const auto& v : h.vertices) {
    const Eigen::Vector2d w = rot * v;
    double best = 1e18;
    for (const auto& q : h.vertices) best = std::min(best, (w - q).norm());
    CHECK(best < 1e-6);
  }
}

TEST_CASE("morph workspaces: side symmetry and composite extents") {
  const PlantConfig cfg = calibrated_config();
  const MorphWorkspaces mw = morph_workspaces(cfg, 6);

  CHECK(mw.composite_extents[0] == doctest::Approx(41.47).epsilon(0.10));
  CHECK(mw.composite_extents[1] == doctest::Approx(52.62).epsilon(0.10));
  CHECK(mw.composite_extents[2] == doctest::Approx(11.22).epsilon(0.10));

  // the three leg workspaces are 120-degree copies of each other
  auto centroid = [](const WorkspaceReport& r) {
    Vec3 c = Vec3::Zero();
    for (const auto& p : r.cloud) c += p.tip;
    return Vec3(c / double(r.cloud.size()));
  };
  const Vec3 c1 = centroid(mw.per_morph[1]);
  const Vec3 c2 = centroid(mw.per_morph[2]);
  const Vec3 c3 = centroid(mw.per_morph[3]);
  auto rot120 = [](const Vec3& v) {
    const double c = std::cos(2 * M_PI / 3), s = std::sin(2 * M_PI / 3);
    return Vec3(c * v.x() - s * v.y(), s * v.x() + c * v.y(), v.z());
  };
  CHECK((rot120(c1) - c2).norm() < 1e-6);
  CHECK((rot120(c2) - c3).norm() < 1e-6);
  CHECK(mw.per_morph[1].hull_volume ==
        doctest::Approx(mw.per_morph[2].hull_volume).epsilon(1e-6));
  CHECK(mw.per_morph[2].hull_volume ==
        doctest::Approx(mw.per_morph[3].hull_volume).epsilon(1e-6));

  // center latch collapses to a point
  CHECK(mw.per_morph[4].hull_volume < 1e-12);
  CHECK(mw.per_morph[4].extents.norm() < 1e-9);
}

TEST_CASE("round trip on random well-conditioned coefficient matrices") {
  std::mt19937 rng(17);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10; ++trial) {
    KinematicCoefficients co;
    for (int r = 3; r < 6; ++r) {
      for (int c = 0; c < 4; ++c) co.a(r, c) = 4.0 * g(rng);
      for (int c = 4; c < 8; ++c) co.a(r, c) = 0.5 * g(rng);
      co.b[r] = 10.0 * g(rng);
    }
    // keep only well-conditioned draws (bounded condition contract)
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        co.a.block<3, 4>(3, 0));
    if (svd.singularValues()(2) < 1.0) continue;
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    const CurrentVector want{u(rng), u(rng), u(rng), u(rng)};
    const Vec3 target = forward_tip(co, want);
    const CurrentVector got = inverse(co, target);
    CHECK((forward_tip(co, got) - target).norm() < 1e-3);
  }
}
