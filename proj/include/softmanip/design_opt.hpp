#pragma once

#include <functional>
#include <vector>

#include "softmanip/plant.hpp"

namespace softmanip {

// Structural design parameters: film thickness T, magnet position P,
// joint width W, leg length L.
struct DesignParams {
  double t_um = 110.0;
  double p_mm = 10.0;
  double w_mm = 3.0;
  double l_mm = 26.0;
};

struct SearchConfig {
  DesignParams guess;  // defaults are the published initial guesses
  double t_step_um = 10.0;
  double p_step_mm = 1.0;
  double w_step_mm = 1.0;
  double l_step_mm = 2.0;
  int max_restarts = 10;
};

using Objective = std::function<double(const DesignParams&)>;

struct SearchTraceEntry {
  DesignParams params;
  double value;
};

struct SearchResult {
  DesignParams best;
  double best_value = 0.0;
  bool converged = false;
  int evaluations = 0;  // unique objective evaluations (memoized)
  int restarts = 0;
  std::vector<SearchTraceEntry> trace;
};

// Center-deflection of the suspended film under the magnets' weight,
// in percent of the span. Cubic plate-stiffness scaling anchored at
// 1% for a 100 um film.
double film_sag_percent(double t_um);

// Restart-on-change coordinate descent over (T, P, W, L) with 3-point
// neighborhoods, memoized evaluations and a restart cap.
SearchResult coordinate_descent(const Objective& obj, const SearchConfig& cfg);

// Smooth synthetic workspace-measure objective whose argmax over the
// reachable grid equals the published final parameters. It validates
// the optimizer, not the physics.
Objective paper_objective();

// Maps design parameters into a scaled plant (stiffness ~ w t^3 / l^3,
// actuation gain ~ p) and scores the main-morph hull volume.
Objective plant_objective(const PlantConfig& tmpl);

}  // namespace softmanip
