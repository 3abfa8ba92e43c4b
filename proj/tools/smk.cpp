// Command-line front end for the soft-manipulator toolkit.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "softmanip/design_opt.hpp"
#include "softmanip/io.hpp"

namespace fs = std::filesystem;
using namespace softmanip;

namespace {

struct Common {
  std::string config_path;
  std::string preset = "benchmark";
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir = ".";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "plant config file");
  cmd->add_option("--preset", c.preset, "plant preset: benchmark | paper");
  cmd->add_option("--seed", c.seed, "PRNG seed (overrides config)")
      ->each([&c](const std::string&) { c.seed_set = true; });
  cmd->add_option("--out", c.out_dir, "output directory");
}

PlantConfig make_config(const Common& c, Provenance& prov) {
  PlantConfig cfg;
  std::string hashed;
  if (!c.config_path.empty()) {
    cfg = load_config(c.config_path);
    std::ifstream in(c.config_path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    hashed = ss.str();
  } else if (c.preset == "paper") {
    cfg = calibrated_config();
    hashed = "preset=paper";
  } else if (c.preset == "benchmark") {
    cfg = default_config();
    hashed = "preset=benchmark";
  } else {
    throw ConfigError("unknown preset: " + c.preset);
  }
  if (c.seed_set) cfg.seed = c.seed;
  prov.seed = cfg.seed;
  prov.config_hash = fnv1a(hashed + "|seed=" + std::to_string(cfg.seed));
  return cfg;
}

std::string out_path(const Common& c, const std::string& name) {
  fs::create_directories(c.out_dir);
  return (fs::path(c.out_dir) / name).string();
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw InvalidInputError("bad number: " + tok);
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"soft parallel micromanipulator toolkit"};
  app.require_subcommand(1);

  // ---- plant: synthetic calibration dataset ----
  Common c_plant;
  int plant_levels = 8;
  std::string plant_bounds, plant_morph = "main";
  bool plant_unsafe = false;
  auto* cmd_plant =
      app.add_subcommand("plant", "generate a synthetic calibration dataset");
  add_common(cmd_plant, c_plant);
  cmd_plant->add_option("--levels", plant_levels, "grid levels per coil");
  cmd_plant->add_option("--bounds", plant_bounds, "current bounds lo,hi (A)");
  cmd_plant->add_option("--morph", plant_morph, "morph to excite");
  cmd_plant->add_flag("--allow-unsafe-bounds", plant_unsafe,
                      "permit bounds beyond the safe range");

  // ---- fit ----
  Common c_fit;
  std::string fit_data;
  double fit_needle = 40.0;
  auto* cmd_fit = app.add_subcommand("fit", "fit kinematic coefficients");
  add_common(cmd_fit, c_fit);
  cmd_fit->add_option("--data", fit_data, "calibration CSV")->required();
  cmd_fit->add_option("--needle", fit_needle, "needle length N1 (mm)");

  // ---- fk ----
  Common c_fk;
  std::string fk_coeffs, fk_currents;
  auto* cmd_fk = app.add_subcommand("fk", "forward kinematics");
  add_common(cmd_fk, c_fk);
  cmd_fk->add_option("--coeffs", fk_coeffs, "coefficient document")->required();
  cmd_fk->add_option("--currents", fk_currents, "I1,I2,I3,I4 (A)")->required();

  // ---- ik ----
  Common c_ik;
  std::string ik_coeffs, ik_target;
  auto* cmd_ik = app.add_subcommand("ik", "bounded inverse kinematics");
  add_common(cmd_ik, c_ik);
  cmd_ik->add_option("--coeffs", ik_coeffs, "coefficient document")->required();
  cmd_ik->add_option("--target", ik_target, "x,y,z tip target (mm)")
      ->required();

  // ---- workspace ----
  Common c_ws;
  int ws_levels = 8;
  std::string ws_morph = "main";
  bool ws_all = false;
  auto* cmd_ws = app.add_subcommand("workspace", "workspace estimation");
  add_common(cmd_ws, c_ws);
  cmd_ws->add_option("--levels", ws_levels, "grid levels per coil");
  cmd_ws->add_option("--morph", ws_morph, "morph to sample");
  cmd_ws->add_flag("--all", ws_all, "all morphs + composite extents");

  // ---- design-search ----
  Common c_ds;
  std::string ds_objective = "paper";
  auto* cmd_ds =
      app.add_subcommand("design-search", "coordinate-descent design search");
  add_common(cmd_ds, c_ds);
  cmd_ds->add_option("--objective", ds_objective, "paper | plant");

  // ---- follow ----
  Common c_fo;
  std::string fo_coeffs, fo_shape = "circle";
  double fo_size = 0.64, fo_freq = 1.0;
  int fo_cycles = 5;
  auto* cmd_fo = app.add_subcommand("follow", "open-loop path following");
  add_common(cmd_fo, c_fo);
  cmd_fo->add_option("--coeffs", fo_coeffs,
                     "coefficient document (default: plant's own)");
  cmd_fo->add_option("--shape", fo_shape, "circle | square");
  cmd_fo->add_option("--size", fo_size, "diameter or side (mm)");
  cmd_fo->add_option("--freq", fo_freq, "cycles per second");
  cmd_fo->add_option("--cycles", fo_cycles, "number of cycles");

  // ---- sweep ----
  Common c_sw;
  std::string sw_freqs = "1,5,10,20,30,40,50,60,70", sw_coeffs;
  double sw_size = 0.64;
  auto* cmd_sw = app.add_subcommand("sweep", "amplitude (bode) sweep");
  add_common(cmd_sw, c_sw);
  cmd_sw->add_option("--freqs", sw_freqs, "comma-separated frequencies (Hz)");
  cmd_sw->add_option("--coeffs", sw_coeffs,
                     "coefficient document (default: plant's own)");
  cmd_sw->add_option("--size", sw_size, "reference circle diameter (mm)");

  // ---- chirp ----
  Common c_ch;
  int ch_coil = 1;
  double ch_fmin = 1.0, ch_fmax = 100.0, ch_dur = 120.0, ch_amp = 0.05;
  auto* cmd_ch = app.add_subcommand("chirp", "single-coil chirp response");
  add_common(cmd_ch, c_ch);
  cmd_ch->add_option("--coil", ch_coil, "coil index 1..4");
  cmd_ch->add_option("--fmin", ch_fmin, "start frequency (Hz)");
  cmd_ch->add_option("--fmax", ch_fmax, "end frequency (Hz)");
  cmd_ch->add_option("--duration", ch_dur, "sweep duration (s)");
  cmd_ch->add_option("--amplitude", ch_amp, "drive amplitude (A)");

  // ---- morph ----
  Common c_mo;
  std::string mo_pulses;
  auto* cmd_mo = app.add_subcommand("morph", "run switching pulse scripts");
  add_common(cmd_mo, c_mo);
  cmd_mo
      ->add_option("--pulses", mo_pulses,
                   "comma list of enter1|enter2|enter3|center|exit")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*cmd_plant) {
      Provenance prov{"plant"};
      PlantConfig cfg = make_config(c_plant, prov);
      double lo = kMainSafeMinA, hi = kMainSafeMaxA;
      if (!plant_bounds.empty()) {
        const auto b = parse_list(plant_bounds);
        if (b.size() != 2) throw InvalidInputError("--bounds wants lo,hi");
        lo = b[0];
        hi = b[1];
      }
      const auto data =
          generate_dataset(cfg, morph_from_string(plant_morph), plant_levels,
                           lo, hi, plant_unsafe);
      save_calibration_csv(out_path(c_plant, "cal.csv"), data, prov);
      std::cout << "plant: wrote " << data.samples.size() << " rows to "
                << out_path(c_plant, "cal.csv") << "\n";
    } else if (*cmd_fit) {
      Provenance prov{"fit"};
      {
        // hash the dataset bytes, not its path, so identical inputs give
        // identical artifacts regardless of where they live
        std::ifstream in(fit_data, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        prov.config_hash = fnv1a("fit|" + ss.str());
      }
      std::vector<std::string> warnings;
      CalibrationDataset data = load_calibration_csv(fit_data, &warnings);
      data.needle.n1 = fit_needle;
      for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      const FitResult res = fit(data);
      save_coeffs_json(out_path(c_fit, "coeffs.json"), res.coeffs, prov);
      save_metrics_json(out_path(c_fit, "metrics.json"),
                        {{"n_samples", double(res.diag.n_samples)},
                         {"rank", double(res.diag.rank)},
                         {"condition", res.diag.condition},
                         {"rms_residual_mm", res.diag.rms_residual_mm},
                         {"max_residual_mm", res.diag.max_residual_mm}},
                        prov);
      std::cout << "fit: rank " << res.diag.rank << ", rms residual "
                << format_double(res.diag.rms_residual_mm) << " mm\n";
    } else if (*cmd_fk) {
      const auto coeffs = load_coeffs_json(fk_coeffs);
      const auto iv = parse_list(fk_currents);
      if (iv.size() != 4) throw InvalidInputError("--currents wants 4 values");
      const Vec6 x = forward(coeffs, {iv[0], iv[1], iv[2], iv[3]});
      std::cout << "fk:";
      for (int k = 0; k < 6; ++k) std::cout << " " << format_double(x[k]);
      std::cout << "\n";
    } else if (*cmd_ik) {
      const auto coeffs = load_coeffs_json(ik_coeffs);
      const auto tv = parse_list(ik_target);
      if (tv.size() != 3) throw InvalidInputError("--target wants x,y,z");
      const CurrentVector i = inverse(coeffs, {tv[0], tv[1], tv[2]});
      std::cout << "ik:";
      for (int k = 0; k < 4; ++k) std::cout << " " << format_double(i[k]);
      std::cout << "\n";
    } else if (*cmd_ws) {
      Provenance prov{"workspace"};
      PlantConfig cfg = make_config(c_ws, prov);
      if (ws_all) {
        const MorphWorkspaces mw = morph_workspaces(cfg, ws_levels);
        save_workspace_csv(out_path(c_ws, "workspace.csv"),
                           mw.per_morph[0], prov);
        std::vector<std::pair<std::string, double>> kv = {
            {"composite_extent_x", mw.composite_extents[0]},
            {"composite_extent_y", mw.composite_extents[1]},
            {"composite_extent_z", mw.composite_extents[2]}};
        for (int m = 0; m < kMorphCount; ++m) {
          const auto& r = mw.per_morph[m];
          const std::string p = std::string(to_string(static_cast<MorphState>(m)));
          kv.push_back({p + "_hull_volume_mm3", r.hull_volume});
        }
        save_metrics_json(out_path(c_ws, "metrics.json"), kv, prov);
        std::cout << "workspace: composite extents "
                  << format_double(mw.composite_extents[0]) << " "
                  << format_double(mw.composite_extents[1]) << " "
                  << format_double(mw.composite_extents[2]) << " mm\n";
      } else {
        const WorkspaceReport rep =
            workspace(cfg, morph_from_string(ws_morph), ws_levels);
        save_workspace_csv(out_path(c_ws, "workspace.csv"), rep, prov);
        save_metrics_json(out_path(c_ws, "metrics.json"),
                          {{"extent_x", rep.extents[0]},
                           {"extent_y", rep.extents[1]},
                           {"extent_z", rep.extents[2]},
                           {"alpha_range_deg", rep.alpha_range},
                           {"beta_range_deg", rep.beta_range},
                           {"hull_volume_mm3", rep.hull_volume},
                           {"projected_area_mm2", rep.projected_area}},
                          prov);
        std::cout << "workspace: extents " << format_double(rep.extents[0])
                  << " " << format_double(rep.extents[1]) << " "
                  << format_double(rep.extents[2]) << " mm\n";
      }
    } else if (*cmd_ds) {
      Provenance prov{"design-search"};
      PlantConfig cfg = make_config(c_ds, prov);
      Objective obj;
      if (ds_objective == "paper")
        obj = paper_objective();
      else if (ds_objective == "plant")
        obj = plant_objective(cfg);
      else
        throw InvalidInputError("--objective must be paper or plant");
      const SearchResult res = coordinate_descent(obj, SearchConfig{});
      std::ostringstream trace;
      trace << prov.line() << "\n" << "t_um,p_mm,w_mm,l_mm,objective\n";
      for (const auto& e : res.trace) {
        trace << format_double(e.params.t_um) << ","
              << format_double(e.params.p_mm) << ","
              << format_double(e.params.w_mm) << ","
              << format_double(e.params.l_mm) << ","
              << format_double(e.value) << "\n";
      }
      std::ofstream(out_path(c_ds, "trace.csv"), std::ios::binary)
          << trace.str();
      save_metrics_json(out_path(c_ds, "metrics.json"),
                        {{"t_um", res.best.t_um},
                         {"p_mm", res.best.p_mm},
                         {"w_mm", res.best.w_mm},
                         {"l_mm", res.best.l_mm},
                         {"objective", res.best_value},
                         {"converged", res.converged ? 1.0 : 0.0},
                         {"evaluations", double(res.evaluations)}},
                        prov);
      std::cout << "design-search: T=" << format_double(res.best.t_um)
                << "um P=" << format_double(res.best.p_mm)
                << "mm W=" << format_double(res.best.w_mm)
                << "mm L=" << format_double(res.best.l_mm) << "mm"
                << (res.converged ? "" : " (restart cap hit)") << "\n";
    } else if (*cmd_fo) {
      Provenance prov{"follow"};
      PlantConfig cfg = make_config(c_fo, prov);
      const KinematicCoefficients coeffs =
          fo_coeffs.empty() ? cfg.coeffs(MorphState::Main)
                            : load_coeffs_json(fo_coeffs);
      PathSpec spec;
      if (fo_shape == "circle")
        spec.shape = PathShape::Circle;
      else if (fo_shape == "square")
        spec.shape = PathShape::Square;
      else
        throw InvalidInputError("--shape must be circle or square");
      spec.size_mm = fo_size;
      spec.freq_hz = fo_freq;
      spec.cycles = fo_cycles;
      const Vec3 center = default_center(coeffs);
      const Trajectory traj = follow(cfg, coeffs, spec);
      const PathMetrics pm = metrics(traj, spec, center, 1);
      save_trajectory_csv(out_path(c_fo, "trace.csv"), traj, prov);
      std::vector<std::pair<std::string, double>> kv = {
          {"mean_speed_mm_s", pm.mean_speed_mm_s},
          {"rms_accuracy_um", pm.rms_accuracy_um}};
      if (pm.rms_precision_um)
        kv.push_back({"rms_precision_um", *pm.rms_precision_um});
      if (pm.mean_radius_mm)
        kv.push_back({"mean_radius_mm", *pm.mean_radius_mm});
      if (pm.amplitude_db) kv.push_back({"amplitude_db", *pm.amplitude_db});
      save_metrics_json(out_path(c_fo, "metrics.json"), kv, prov);
      std::cout << "follow: mean speed " << format_double(pm.mean_speed_mm_s)
                << " mm/s, accuracy " << format_double(pm.rms_accuracy_um)
                << " um\n";
    } else if (*cmd_sw) {
      Provenance prov{"sweep"};
      PlantConfig cfg = make_config(c_sw, prov);
      const KinematicCoefficients coeffs =
          sw_coeffs.empty() ? cfg.coeffs(MorphState::Main)
                            : load_coeffs_json(sw_coeffs);
      PathSpec tmpl;
      tmpl.size_mm = sw_size;
      const auto rows = amplitude_sweep(cfg, coeffs, tmpl, parse_list(sw_freqs));
      save_bode_csv(out_path(c_sw, "bode.csv"), rows, prov);
      std::cout << "sweep: " << rows.size() << " rows written to "
                << out_path(c_sw, "bode.csv") << "\n";
    } else if (*cmd_ch) {
      Provenance prov{"chirp"};
      PlantConfig cfg = make_config(c_ch, prov);
      if (ch_coil < 1 || ch_coil > 4)
        throw InvalidInputError("--coil must be 1..4");
      const auto rows =
          chirp_response(cfg, ch_coil - 1, ch_fmin, ch_fmax, ch_dur, ch_amp);
      std::ostringstream ss;
      ss << prov.line() << "\n" << "freq_hz,mag_x,mag_y,mag_z\n";
      for (const auto& r : rows) {
        ss << format_double(r.freq_hz) << "," << format_double(r.mag[0])
           << "," << format_double(r.mag[1]) << ","
           << format_double(r.mag[2]) << "\n";
      }
      std::ofstream(out_path(c_ch, "chirp.csv"), std::ios::binary) << ss.str();
      std::cout << "chirp: " << rows.size() << " rows written to "
                << out_path(c_ch, "chirp.csv") << "\n";
    } else if (*cmd_mo) {
      Provenance prov{"morph"};
      PlantConfig cfg = make_config(c_mo, prov);
      PlantState state = init_state(cfg);
      std::stringstream ss(mo_pulses);
      std::string tok;
      std::string seq = to_string(state.morph);
      while (std::getline(ss, tok, ',')) {
        MorphPulse pulse;
        if (tok == "enter1") pulse = MorphPulse::EnterSide1;
        else if (tok == "enter2") pulse = MorphPulse::EnterSide2;
        else if (tok == "enter3") pulse = MorphPulse::EnterSide3;
        else if (tok == "center") pulse = MorphPulse::DrawCenter;
        else if (tok == "exit") pulse = MorphPulse::ExitToMain;
        else throw InvalidInputError("unknown pulse: " + tok);
        morph_transition(state, pulse, cfg);
        seq += std::string(" -> ") + to_string(state.morph);
      }
      save_metrics_json(out_path(c_mo, "metrics.json"),
                        {{"final_morph", double(morph_index(state.morph))},
                         {"t_s", state.t}},
                        prov);
      std::cout << "morph: " << seq << "\n";
    }
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
