#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "softmanip/identification.hpp"
#include "softmanip/kinematics.hpp"
#include "softmanip/trajectory.hpp"

namespace softmanip {

inline constexpr const char* kToolName = "smk";
inline constexpr const char* kToolVersion = "0.1.0";

// First line of every artifact: tool, version, subcommand, seed and a
// hash of the effective configuration.
struct Provenance {
  std::string command;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::string line() const;
};

// Shortest round-trip decimal representation (17 significant digits).
std::string format_double(double v);

// FNV-1a over the canonical config text.
std::uint64_t fnv1a(const std::string& s);

// --- calibration CSV: t,I1,I2,I3,I4,Pm_x,Pm_y,Pm_z,Pn_x,Pn_y,Pn_z ---
void save_calibration_csv(const std::string& path,
                          const CalibrationDataset& data,
                          const Provenance& prov);
// Out-of-range currents produce warnings (returned), not dropped rows.
CalibrationDataset load_calibration_csv(const std::string& path,
                                        std::vector<std::string>* warnings =
                                            nullptr);

// --- trajectory CSV: t,I1..I4,Pp_x..Pp_z,Pn_x..Pn_z ---
void save_trajectory_csv(const std::string& path, const Trajectory& traj,
                         const Provenance& prov);

// --- workspace CSV: x,y,z,alpha,beta,gamma ---
void save_workspace_csv(const std::string& path, const WorkspaceReport& rep,
                        const Provenance& prov);

// --- bode CSV: freq_hz,amp_db,mean_radius_mm ---
void save_bode_csv(const std::string& path, const std::vector<BodePoint>& rows,
                   const Provenance& prov);

// --- coefficient document (JSON: 6x8 nested arrays + offset) ---
void save_coeffs_json(const std::string& path,
                      const KinematicCoefficients& coeffs,
                      const Provenance& prov);
KinematicCoefficients load_coeffs_json(const std::string& path);

// --- generic metrics/summary document ---
void save_metrics_json(const std::string& path,
                       const std::vector<std::pair<std::string, double>>& kv,
                       const Provenance& prov);

// Line-oriented `key = value` configuration with dotted keys and `#`
// comments. Strict: unknown or duplicate keys are errors. `preset =
// paper` starts from the calibrated plant instead of the benchmark one.
PlantConfig parse_config_text(const std::string& text);
PlantConfig load_config(const std::string& path);

}  // namespace softmanip
