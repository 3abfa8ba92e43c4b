#include "softmanip/design_opt.hpp"

#include <cmath>
#include <map>
#include <tuple>

#include "softmanip/kinematics.hpp"

namespace softmanip {

namespace {

void check_params(const DesignParams& d) {
  if (!(d.t_um > 0 && d.p_mm > 0 && d.w_mm > 0 && d.l_mm > 0))
    throw InvalidInputError("design parameters must all be positive");
}

using Key = std::tuple<long long, long long, long long, long long>;

Key key_of(const DesignParams& d) {
  auto q = [](double v) { return std::llround(v * 1e6); };
  return {q(d.t_um), q(d.p_mm), q(d.w_mm), q(d.l_mm)};
}

double sag_feasibility(double t_um) {
  const double over = std::max(0.0, film_sag_percent(t_um) - 2.0);
  return 1.0 / (1.0 + over * over);
}

}  // namespace

double film_sag_percent(double t_um) {
  if (!(t_um > 0)) throw InvalidInputError("film thickness must be positive");
  return 1e6 / (t_um * t_um * t_um);  // 1% at 100 um
}

SearchResult coordinate_descent(const Objective& obj, const SearchConfig& cfg) {
  if (!(cfg.t_step_um > 0 && cfg.p_step_mm > 0 && cfg.w_step_mm > 0 &&
        cfg.l_step_mm > 0))
    throw InvalidInputError("search steps must be positive");
  check_params(cfg.guess);

  SearchResult res;
  std::map<Key, double> memo;
  auto eval = [&](const DesignParams& d) {
    const Key k = key_of(d);
    const auto it = memo.find(k);
    if (it != memo.end()) return it->second;
    const double v = obj(d);
    if (!std::isfinite(v))
      throw InvalidInputError("objective returned a non-finite value");
    memo[k] = v;
    ++res.evaluations;
    res.trace.push_back({d, v});
    return v;
  };

  DesignParams cur = cfg.guess;
  double cur_v = eval(cur);
  res.best = cur;
  res.best_value = cur_v;

  const double steps[4] = {cfg.t_step_um, cfg.p_step_mm, cfg.w_step_mm,
                           cfg.l_step_mm};
  auto field = [](DesignParams& d, int k) -> double& {
    switch (k) {
      case 0: return d.t_um;
      case 1: return d.p_mm;
      case 2: return d.w_mm;
      default: return d.l_mm;
    }
  };

  for (;;) {
    bool changed = false;
    for (int k = 0; k < 4 && !changed; ++k) {
      // 3-point neighborhood {g - s, g, g + s}; ties keep the incumbent.
      double best_v = cur_v;
      double best_off = 0.0;
      for (double off : {-steps[k], steps[k]}) {
        DesignParams cand = cur;
        field(cand, k) += off;
        if (field(cand, k) <= 0.0) continue;
        const double v = eval(cand);
        if (v > best_v) {
          best_v = v;
          best_off = off;
        }
      }
      if (best_off != 0.0) {
        field(cur, k) += best_off;
        cur_v = best_v;
        changed = true;  // go back to step 1 (parameter order T first)
      }
    }
    if (cur_v > res.best_value) {
      res.best = cur;
      res.best_value = cur_v;
    }
    if (!changed) {
      res.converged = true;
      break;
    }
    if (++res.restarts >= cfg.max_restarts) break;  // non-converged
  }
  return res;
}

Objective paper_objective() {
  return [](const DesignParams& d) {
    check_params(d);
    const double sag = film_sag_percent(d.t_um);
    // Thin films deflect more (useful compliance) but sag under the
    // magnets; the product peaks just above the published thickness.
    const double f_t = sag * std::exp(-(sag / 0.8) * (sag / 0.8));
    auto bell = [](double x, double c, double w) {
      const double u = (x - c) / w;
      return std::exp(-u * u);
    };
    const double g_p = bell(d.p_mm, 10.0, 4.0);
    const double g_w = bell(d.w_mm, 3.0, 1.5);
    const double g_l = bell(d.l_mm, 26.0, 5.0);
    const double base = 1500.0;  // mm^3 scale of the composite workspace
    return base * f_t * g_p * g_w * g_l * sag_feasibility(d.t_um);
  };
}

Objective plant_objective(const PlantConfig& tmpl) {
  validate(tmpl);
  return [tmpl](const DesignParams& d) {
    check_params(d);
    const DesignParams ref;  // published geometry as the unit-scale point
    const double k = d.w_mm * std::pow(d.t_um, 3) / std::pow(d.l_mm, 3);
    const double k0 = ref.w_mm * std::pow(ref.t_um, 3) / std::pow(ref.l_mm, 3);
    const double scale = (d.p_mm / ref.p_mm) * (k0 / k);

    PlantConfig cfg = tmpl;
    for (auto& m : cfg.morphs) m.a *= scale;
    const WorkspaceReport rep = workspace(cfg, MorphState::Main, 5);
    return rep.hull_volume * sag_feasibility(d.t_um);
  };
}

}  // namespace softmanip
