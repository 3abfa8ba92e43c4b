#include "softmanip/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace softmanip {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed for " + path);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_cell(const std::string& cell, int row, int col) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != cell.size() || cell.empty())
    throw IoError("non-numeric cell at row " + std::to_string(row) +
                  ", column " + std::to_string(col + 1) + ": '" + cell + "'");
  return v;
}

const char* kCalHeader = "t,I1,I2,I3,I4,Pm_x,Pm_y,Pm_z,Pn_x,Pn_y,Pn_z";
const char* kTrajHeader = "t,I1,I2,I3,I4,Pp_x,Pp_y,Pp_z,Pn_x,Pn_y,Pn_z";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string Provenance::line() const {
  std::ostringstream ss;
  ss << "# " << kToolName << " " << kToolVersion << " cmd=" << command
     << " seed=" << seed << " config_hash=" << std::hex << config_hash;
  return ss.str();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void save_calibration_csv(const std::string& path,
                          const CalibrationDataset& data,
                          const Provenance& prov) {
  std::ostringstream ss;
  ss << prov.line() << "\n";
  ss << "# morph=" << to_string(data.morph)
     << " n1=" << format_double(data.needle.n1) << "\n";
  ss << kCalHeader << "\n";
  for (const auto& s : data.samples) {
    ss << format_double(s.t);
    for (int k = 0; k < 4; ++k) ss << "," << format_double(s.i[k]);
    for (int k = 0; k < 3; ++k) ss << "," << format_double(s.p_m[k]);
    for (int k = 0; k < 3; ++k) ss << "," << format_double(s.p_n[k]);
    ss << "\n";
  }
  write_file(path, ss.str());
}

CalibrationDataset load_calibration_csv(const std::string& path,
                                        std::vector<std::string>* warnings) {
  std::istringstream in(read_file(path));
  CalibrationDataset data;
  std::string line;
  bool header_seen = false;
  int row = 0;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      // metadata comments: morph=... n1=...
      std::istringstream ms(t.substr(1));
      std::string tok;
      while (ms >> tok) {
        if (tok.rfind("morph=", 0) == 0)
          data.morph = morph_from_string(tok.substr(6));
        else if (tok.rfind("n1=", 0) == 0)
          data.needle.n1 = std::stod(tok.substr(3));
      }
      continue;
    }
    if (!header_seen) {
      const auto got = split_csv_line(t);
      const auto want = split_csv_line(kCalHeader);
      if (got.size() != want.size()) {
        throw IoError("calibration header has " + std::to_string(got.size()) +
                      " columns, expected " + std::to_string(want.size()));
      }
      for (std::size_t c = 0; c < want.size(); ++c) {
        if (trim(got[c]) != want[c])
          throw IoError("calibration header column " + std::to_string(c + 1) +
                        " is '" + trim(got[c]) + "', expected '" + want[c] +
                        "'");
      }
      header_seen = true;
      continue;
    }
    const auto cells = split_csv_line(t);
    if (cells.size() != 11)
      throw IoError("row " + std::to_string(row) + " has " +
                    std::to_string(cells.size()) + " columns, expected 11");
    CalibrationSample s;
    s.t = parse_cell(cells[0], row, 0);
    for (int k = 0; k < 4; ++k) s.i[k] = parse_cell(cells[1 + k], row, 1 + k);
    for (int k = 0; k < 3; ++k) s.p_m[k] = parse_cell(cells[5 + k], row, 5 + k);
    for (int k = 0; k < 3; ++k) s.p_n[k] = parse_cell(cells[8 + k], row, 8 + k);
    if (!s.i.main_morph_safe() && warnings)
      warnings->push_back("row " + std::to_string(row) +
                          ": current outside the recorded bounds (kept)");
    data.samples.push_back(s);
    ++row;
  }
  if (!header_seen) throw IoError("calibration file has no header: " + path);
  if (data.samples.empty())
    throw IoError("calibration file contains no data rows: " + path);
  return data;
}

void save_trajectory_csv(const std::string& path, const Trajectory& traj,
                         const Provenance& prov) {
  std::ostringstream ss;
  ss << prov.line() << "\n" << kTrajHeader << "\n";
  for (std::size_t j = 0; j < traj.t.size(); ++j) {
    ss << format_double(traj.t[j]);
    for (int k = 0; k < 4; ++k) ss << "," << format_double(traj.i[j][k]);
    for (int k = 0; k < 6; ++k) ss << "," << format_double(traj.x[j][k]);
    ss << "\n";
  }
  write_file(path, ss.str());
}

void save_workspace_csv(const std::string& path, const WorkspaceReport& rep,
                        const Provenance& prov) {
  std::ostringstream ss;
  ss << prov.line() << "\n" << "x,y,z,alpha,beta,gamma\n";
  for (const auto& p : rep.cloud) {
    ss << format_double(p.tip.x()) << "," << format_double(p.tip.y()) << ","
       << format_double(p.tip.z()) << "," << format_double(p.alpha) << ","
       << format_double(p.beta) << "," << format_double(p.gamma) << "\n";
  }
  write_file(path, ss.str());
}

void save_bode_csv(const std::string& path, const std::vector<BodePoint>& rows,
                   const Provenance& prov) {
  std::ostringstream ss;
  ss << prov.line() << "\n" << "freq_hz,amp_db,mean_radius_mm\n";
  for (const auto& r : rows) {
    ss << format_double(r.freq_hz) << "," << format_double(r.amp_db) << ","
       << format_double(r.mean_radius_mm) << "\n";
  }
  write_file(path, ss.str());
}

void save_coeffs_json(const std::string& path,
                      const KinematicCoefficients& coeffs,
                      const Provenance& prov) {
  json doc;
  doc["provenance"] = prov.line();
  doc["morph"] = to_string(coeffs.morph);
  doc["needle"] = {{"n1", coeffs.needle.n1}, {"lever", coeffs.needle.lever}};
  json a = json::array();
  for (int r = 0; r < 6; ++r) {
    json row = json::array();
    for (int c = 0; c < 8; ++c) row.push_back(coeffs.a(r, c));
    a.push_back(row);
  }
  doc["a"] = a;
  json b = json::array();
  for (int r = 0; r < 6; ++r) b.push_back(coeffs.b[r]);
  doc["b"] = b;
  write_file(path, doc.dump(2) + "\n");
}

KinematicCoefficients load_coeffs_json(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw IoError("cannot parse " + path + ": " + e.what());
  }
  KinematicCoefficients k;
  try {
    k.morph = morph_from_string(doc.at("morph").get<std::string>());
    k.needle.n1 = doc.at("needle").at("n1").get<double>();
    k.needle.lever = doc.at("needle").at("lever").get<double>();
    const auto& a = doc.at("a");
    if (a.size() != 6) throw IoError("coefficient matrix must have 6 rows");
    for (int r = 0; r < 6; ++r) {
      if (a[r].size() != 8)
        throw IoError("coefficient matrix row must have 8 entries");
      for (int c = 0; c < 8; ++c) k.a(r, c) = a[r][c].get<double>();
    }
    const auto& b = doc.at("b");
    if (b.size() != 6) throw IoError("offset vector must have 6 entries");
    for (int r = 0; r < 6; ++r) k.b[r] = b[r].get<double>();
  } catch (const json::exception& e) {
    throw IoError("malformed coefficient document " + path + ": " + e.what());
  }
  return k;
}

void save_metrics_json(const std::string& path,
                       const std::vector<std::pair<std::string, double>>& kv,
                       const Provenance& prov) {
  json doc;
  doc["provenance"] = prov.line();
  for (const auto& [k, v] : kv) doc[k] = v;
  write_file(path, doc.dump(2) + "\n");
}

PlantConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::map<std::string, std::string> kv;
  std::vector<std::string> order;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    const auto hash = t.find('#');
    if (hash != std::string::npos) t = trim(t.substr(0, hash));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("line " + std::to_string(lineno) +
                        ": empty key or value");
    if (kv.count(key)) throw ConfigError("duplicate key: " + key);
    kv[key] = val;
    order.push_back(key);
  }

  PlantConfig cfg;
  if (kv.count("preset")) {
    const std::string p = kv["preset"];
    if (p == "paper")
      cfg = calibrated_config();
    else if (p == "benchmark")
      cfg = default_config();
    else
      throw ConfigError("unknown preset: " + p);
  } else {
    cfg = default_config();
  }

  auto as_double = [&](const std::string& key) {
    const std::string& v = kv[key];
    std::size_t pos = 0;
    double d = 0.0;
    try {
      d = std::stod(v, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != v.size())
      throw ConfigError("key " + key + ": expected a number, got '" + v + "'");
    return d;
  };
  auto as_bool = [&](const std::string& key) {
    const std::string& v = kv[key];
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("key " + key + ": expected a boolean, got '" + v + "'");
  };
  auto as_u64 = [&](const std::string& key) {
    const double d = as_double(key);
    if (d < 0 || d != std::floor(d))
      throw ConfigError("key " + key + ": expected a non-negative integer");
    return static_cast<std::uint64_t>(d);
  };

  const std::map<std::string, std::function<void()>> setters = {
      {"preset", [] {}},
      {"mismatch", [&] { cfg.mismatch = as_double("mismatch"); }},
      {"noise_sigma", [&] { cfg.noise_sigma = as_double("noise_sigma"); }},
      {"seed", [&] { cfg.seed = as_u64("seed"); }},
      {"remanence_enabled",
       [&] { cfg.remanence_enabled = as_bool("remanence_enabled"); }},
      {"b_r", [&] { cfg.b_r = as_double("b_r"); }},
      {"i_sat", [&] { cfg.i_sat = as_double("i_sat"); }},
      {"needle.n1", [&] { cfg.needle.n1 = as_double("needle.n1"); }},
      {"needle.lever", [&] { cfg.needle.lever = as_double("needle.lever"); }},
      {"force.k_e", [&] { cfg.force.k_e = as_double("force.k_e"); }},
      {"force.z0", [&] { cfg.force.z0 = as_double("force.z0"); }},
      {"force.a0", [&] { cfg.force.a0 = as_double("force.a0"); }},
      {"force.a1", [&] { cfg.force.a1 = as_double("force.a1"); }},
      {"force.p", [&] { cfg.force.p = as_double("force.p"); }},
      {"force.m",
       [&] { cfg.force.m = static_cast<int>(as_u64("force.m")); }},
      {"force.d", [&] { cfg.force.d = as_double("force.d"); }},
      {"force.h", [&] { cfg.force.h = as_double("force.h"); }},
      {"force.i_max_drive",
       [&] { cfg.force.i_max_drive = as_double("force.i_max_drive"); }},
      {"dyn.f1", [&] { cfg.dyn.f1 = as_double("dyn.f1"); }},
      {"dyn.f2", [&] { cfg.dyn.f2 = as_double("dyn.f2"); }},
      {"dyn.f_z", [&] { cfg.dyn.f_z = as_double("dyn.f_z"); }},
      {"dyn.zeta1", [&] { cfg.dyn.zeta1 = as_double("dyn.zeta1"); }},
      {"dyn.zeta2", [&] { cfg.dyn.zeta2 = as_double("dyn.zeta2"); }},
      {"dyn.zeta_z", [&] { cfg.dyn.zeta_z = as_double("dyn.zeta_z"); }},
      {"dyn.dt", [&] { cfg.dyn.dt = as_double("dyn.dt"); }},
      {"dyn.bypass", [&] { cfg.dyn.bypass = as_bool("dyn.bypass"); }},
  };

  for (const auto& key : order) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key: " + key);
    it->second();
  }
  validate(cfg);
  return cfg;
}

PlantConfig load_config(const std::string& path) {
  return parse_config_text(read_file(path));
}

}  // namespace softmanip
