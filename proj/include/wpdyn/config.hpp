// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wpdyn/coherence.hpp"
#include "wpdyn/errors.hpp"
#include "wpdyn/field.hpp"
#include "wpdyn/grids.hpp"
#include "wpdyn/potentials.hpp"
#include "wpdyn/propagator.hpp"
#include "wpdyn/units.hpp"

namespace wpdyn {

/// Everything a scenario run needs, resolved to atomic units. Physical values
/// in the JSON file carry explicit unit suffixes (_fs, _hartree, _bohr); the
/// conversion to atomic units happens here and nowhere downstream.
struct ScenarioConfig {
  std::string name = "scenario";
  std::string output_dir;

  std::uint64_t master_seed = 1;
  int realizations = 10;
  int snapshot_stride = 100;

  double t_start_fs = 0.0;
  double t_end_fs = 300.0;
  double dt_fs = 0.003;

  double r_min_bohr = 0.1;
  double r_max_bohr = 160.1;
  int n_points = 8001;

  double omega_center = 0.1;        // Hartree
  double peak_amplitude = 1e-4;     // field a.u.
  EnvelopeSpec coherent_envelope;
  EnvelopeSpec incoherent_envelope;
  JumpProcessSpec jumps;

  ChannelSpec ground_channel;
  int vibrational_level = 5;
  ChannelSpec excited_channel_1;
  ChannelSpec excited_channel_2;
  DipoleSpec dipole;

  std::optional<AbsorberSpec> absorber;
  DensityOptions density;

  TimeGrid make_time_grid() const { return TimeGrid::from_fs(t_start_fs, t_end_fs, dt_fs); }
  RadialGrid make_radial_grid() const { return RadialGrid(r_min_bohr, r_max_bohr, n_points); }

  FieldSpec coherent_field_spec() const {
    return FieldSpec{coherent_envelope, omega_center, std::nullopt};
  }
  FieldSpec incoherent_field_spec() const {
    return FieldSpec{incoherent_envelope, omega_center, jumps};
  }
};

namespace detail {

using nlohmann::json;

class ConfigParser {
 public:
  explicit ConfigParser(std::vector<std::string>& diagnostics) : diags_(diagnostics) {}

  void check_keys(const json& j, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
      diags_.push_back(path + ": expected an object");
      return;
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool known = false;
      for (const char* k : allowed) {
        if (it.key() == k) {
          known = true;
          break;
        }
      }
      if (!known) diags_.push_back("unknown key: " + path + "." + it.key());
    }
  }

  double number(const json& j, const std::string& path, const char* key, double fallback,
                bool required = true) {
    if (!j.is_object() || !j.contains(key)) {
      if (required) diags_.push_back("missing key: " + path + "." + key);
      return fallback;
    }
    if (!j[key].is_number()) {
      diags_.push_back(path + "." + key + ": expected a number");
      return fallback;
    }
    return j[key].get<double>();
  }

  std::int64_t integer(const json& j, const std::string& path, const char* key,
                       std::int64_t fallback, bool required = true) {
    if (!j.is_object() || !j.contains(key)) {
      if (required) diags_.push_back("missing key: " + path + "." + key);
      return fallback;
    }
    if (!j[key].is_number_integer() && !j[key].is_number_unsigned()) {
      diags_.push_back(path + "." + key + ": expected an integer");
      return fallback;
    }
    return j[key].get<std::int64_t>();
  }

  std::string text(const json& j, const std::string& path, const char* key,
                   const std::string& fallback, bool required = true) {
    if (!j.is_object() || !j.contains(key)) {
      if (required) diags_.push_back("missing key: " + path + "." + key);
      return fallback;
    }
    if (!j[key].is_string()) {
      diags_.push_back(path + "." + key + ": expected a string");
      return fallback;
    }
    return j[key].get<std::string>();
  }

  EnvelopeSpec envelope(const json& j, const std::string& path, double peak) {
    EnvelopeSpec env;
    env.peak_amplitude = peak;
    if (!j.is_object()) {
      diags_.push_back(path + ": expected an object");
      return env;
    }
    std::string kind = text(j, path, "kind", "gaussian");
    if (kind == "gaussian") {
      check_keys(j, path, {"kind", "center_fs", "width_fs"});
      GaussianEnvelope g;
      g.center = fs_to_au(number(j, path, "center_fs", 0.0));
      g.width = fs_to_au(number(j, path, "width_fs", 1.0));
      env.shape = g;
    } else if (kind == "sine_power") {
      check_keys(j, path, {"kind", "duration_fs", "exponent"});
      SinePowerEnvelope s;
      s.duration = fs_to_au(number(j, path, "duration_fs", 1.0));
      s.exponent = number(j, path, "exponent", 0.1);
      env.shape = s;
    } else {
      diags_.push_back(path + ".kind: must be 'gaussian' or 'sine_power'");
    }
    return env;
  }

  PesSpec pes(const json& j, const std::string& path) {
    if (!j.is_object()) {
      diags_.push_back(path + ": expected an object");
      return MorsePes{};
    }
    check_keys(j, path, {"kind", "w0_hartree", "r0_bohr", "a_bohr", "w_inf_hartree"});
    std::string kind = text(j, path, "kind", "morse");
    double w0 = number(j, path, "w0_hartree", 0.1);
    double r0 = number(j, path, "r0_bohr", 2.0);
    double a = number(j, path, "a_bohr", 1.0);
    double w_inf = number(j, path, "w_inf_hartree", 0.0);
    if (kind == "morse") return MorsePes{w0, r0, a, w_inf};
    if (kind == "repulsive_exp") return RepulsiveExpPes{w0, r0, a, w_inf};
    diags_.push_back(path + ".kind: must be 'morse' or 'repulsive_exp'");
    return MorsePes{w0, r0, a, w_inf};
  }

  ChannelSpec channel(const json& j, const std::string& path, bool with_level, int* level) {
    ChannelSpec ch;
    if (!j.is_object()) {
      diags_.push_back(path + ": expected an object");
      return ch;
    }
    if (with_level) {
      check_keys(j, path, {"pes", "j", "mass_au", "vibrational_level"});
      *level = static_cast<int>(integer(j, path, "vibrational_level", 5));
    } else {
      check_keys(j, path, {"pes", "j", "mass_au"});
    }
    if (j.contains("pes")) {
      ch.pes = pes(j["pes"], path + ".pes");
    } else {
      diags_.push_back("missing key: " + path + ".pes");
    }
    ch.j = static_cast<int>(integer(j, path, "j", 0));
    ch.mu = number(j, path, "mass_au", 918.0);
    return ch;
  }

 private:
  std::vector<std::string>& diags_;
};

}  // namespace detail

/// Parse a scenario config from JSON, collecting diagnostics instead of
/// throwing so every problem is reported at once. Unknown keys are rejected.
inline ScenarioConfig parse_scenario_config(const nlohmann::json& j,
                                            std::vector<std::string>& diagnostics) {
  detail::ConfigParser p(diagnostics);
  ScenarioConfig cfg;
  p.check_keys(j, "config",
               {"name", "output_dir", "master_seed", "realizations", "snapshot_stride",
                "time_grid", "radial_grid", "field", "ground_channel", "excited_channel_1",
                "excited_channel_2", "dipole", "absorber", "density_export"});
  if (!j.is_object()) return cfg;

  cfg.name = p.text(j, "config", "name", cfg.name);
  cfg.output_dir = p.text(j, "config", "output_dir", "", false);
  cfg.master_seed = static_cast<std::uint64_t>(p.integer(j, "config", "master_seed", 1));
  cfg.realizations = static_cast<int>(p.integer(j, "config", "realizations", 10));
  cfg.snapshot_stride =
      static_cast<int>(p.integer(j, "config", "snapshot_stride", cfg.snapshot_stride, false));

  if (j.contains("time_grid")) {
    const auto& tg = j["time_grid"];
    p.check_keys(tg, "time_grid", {"t_start_fs", "t_end_fs", "dt_fs"});
    cfg.t_start_fs = p.number(tg, "time_grid", "t_start_fs", 0.0);
    cfg.t_end_fs = p.number(tg, "time_grid", "t_end_fs", 300.0);
    cfg.dt_fs = p.number(tg, "time_grid", "dt_fs", 0.003);
  } else {
    diagnostics.push_back("missing key: config.time_grid");
  }

  if (j.contains("radial_grid")) {
    const auto& rg = j["radial_grid"];
    p.check_keys(rg, "radial_grid", {"r_min_bohr", "r_max_bohr", "n_points"});
    cfg.r_min_bohr = p.number(rg, "radial_grid", "r_min_bohr", 0.1);
    cfg.r_max_bohr = p.number(rg, "radial_grid", "r_max_bohr", 160.1);
    cfg.n_points = static_cast<int>(p.integer(rg, "radial_grid", "n_points", 8001));
  } else {
    diagnostics.push_back("missing key: config.radial_grid");
  }

  if (j.contains("field")) {
    const auto& f = j["field"];
    p.check_keys(f, "field",
                 {"omega_center_hartree", "peak_amplitude_au", "coherent_envelope",
                  "incoherent_envelope", "jumps"});
    cfg.omega_center = p.number(f, "field", "omega_center_hartree", 0.1);
    cfg.peak_amplitude = p.number(f, "field", "peak_amplitude_au", 1e-4);
    if (f.contains("coherent_envelope")) {
      cfg.coherent_envelope =
          p.envelope(f["coherent_envelope"], "field.coherent_envelope", cfg.peak_amplitude);
    } else {
      diagnostics.push_back("missing key: field.coherent_envelope");
    }
    if (f.contains("incoherent_envelope")) {
      cfg.incoherent_envelope =
          p.envelope(f["incoherent_envelope"], "field.incoherent_envelope", cfg.peak_amplitude);
    } else {
      diagnostics.push_back("missing key: field.incoherent_envelope");
    }
    if (f.contains("jumps")) {
      const auto& jp = f["jumps"];
      p.check_keys(jp, "field.jumps",
                   {"mean_interval_fs", "phase_range_rad", "freq_shift_range_hartree"});
      cfg.jumps.mean_interval = fs_to_au(p.number(jp, "field.jumps", "mean_interval_fs", 7.0));
      cfg.jumps.phase_range = p.number(jp, "field.jumps", "phase_range_rad", M_PI);
      cfg.jumps.freq_shift_range =
          p.number(jp, "field.jumps", "freq_shift_range_hartree", 0.0175);
    } else {
      diagnostics.push_back("missing key: field.jumps");
    }
  } else {
    diagnostics.push_back("missing key: config.field");
  }

  if (j.contains("ground_channel")) {
    cfg.ground_channel =
        p.channel(j["ground_channel"], "ground_channel", true, &cfg.vibrational_level);
  } else {
    diagnostics.push_back("missing key: config.ground_channel");
  }
  if (j.contains("excited_channel_1")) {
    cfg.excited_channel_1 = p.channel(j["excited_channel_1"], "excited_channel_1", false, nullptr);
  } else {
    diagnostics.push_back("missing key: config.excited_channel_1");
  }
  if (j.contains("excited_channel_2")) {
    cfg.excited_channel_2 = p.channel(j["excited_channel_2"], "excited_channel_2", false, nullptr);
  } else {
    diagnostics.push_back("missing key: config.excited_channel_2");
  }

  if (j.contains("dipole")) {
    p.check_keys(j["dipole"], "dipole", {"slope_au_per_bohr"});
    cfg.dipole.slope = p.number(j["dipole"], "dipole", "slope_au_per_bohr", 0.5);
  } else {
    diagnostics.push_back("missing key: config.dipole");
  }

  if (j.contains("absorber")) {
    const auto& ab = j["absorber"];
    p.check_keys(ab, "absorber", {"start_bohr", "strength_hartree", "power"});
    AbsorberSpec spec;
    spec.start = p.number(ab, "absorber", "start_bohr", 120.0);
    spec.strength = p.number(ab, "absorber", "strength_hartree", 0.01);
    spec.power = p.number(ab, "absorber", "power", 2.0, false);
    cfg.absorber = spec;
  }

  if (j.contains("density_export")) {
    const auto& d = j["density_export"];
    p.check_keys(d, "density_export", {"time_stride", "space_stride"});
    cfg.density.time_stride = static_cast<int>(p.integer(d, "density_export", "time_stride", 10));
    cfg.density.space_stride =
        static_cast<int>(p.integer(d, "density_export", "space_stride", 10));
  }
  return cfg;
}

/// Semantic validation of every module precondition the run will rely on.
/// Returns an empty list iff run_scenario would start.
inline std::vector<std::string> validate(const ScenarioConfig& cfg) {
  std::vector<std::string> diags;

  try {
    (void)cfg.make_time_grid();
  } catch (const validation_error& e) {
    diags.emplace_back(e.what());
  }
  try {
    (void)cfg.make_radial_grid();
  } catch (const validation_error& e) {
    diags.emplace_back(e.what());
  }

  if (!(cfg.omega_center > 0.0)) diags.push_back("field.omega_center_hartree: must be > 0");
  if (!(cfg.peak_amplitude > 0.0)) diags.push_back("field.peak_amplitude_au: must be > 0");

  auto check_envelope = [&](const EnvelopeSpec& env, const std::string& path) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, GaussianEnvelope>) {
            if (!(s.width > 0.0)) diags.push_back(path + ".width_fs: must be > 0");
          } else {
            if (!(s.duration > 0.0)) diags.push_back(path + ".duration_fs: must be > 0");
            if (!(s.exponent > 0.0)) diags.push_back(path + ".exponent: must be > 0");
          }
        },
        env.shape);
    auto [lo, hi] = env.support();
    if (fs_to_au(cfg.t_start_fs) > lo + 1e-12 || fs_to_au(cfg.t_end_fs) < hi - 1e-12) {
      diags.push_back(path + ": envelope support exceeds the propagation window");
    }
  };
  check_envelope(cfg.coherent_envelope, "field.coherent_envelope");
  check_envelope(cfg.incoherent_envelope, "field.incoherent_envelope");

  if (!(cfg.jumps.mean_interval > 0.0))
    diags.push_back("field.jumps.mean_interval_fs: must be > 0");
  if (!(cfg.jumps.phase_range >= 0.0 && cfg.jumps.phase_range <= M_PI))
    diags.push_back("field.jumps.phase_range_rad: must lie in [0, pi]");
  if (!(cfg.jumps.freq_shift_range >= 0.0))
    diags.push_back("field.jumps.freq_shift_range_hartree: must be >= 0");

  validate_channel(cfg.ground_channel, "ground_channel", diags);
  validate_channel(cfg.excited_channel_1, "excited_channel_1", diags);
  validate_channel(cfg.excited_channel_2, "excited_channel_2", diags);
  if (cfg.vibrational_level < 0) diags.push_back("ground_channel.vibrational_level: must be >= 0");
  if (!(cfg.dipole.slope >= 0.0)) diags.push_back("dipole.slope_au_per_bohr: must be >= 0");

  if (cfg.absorber) {
    if (!(cfg.absorber->start < cfg.r_max_bohr))
      diags.push_back("absorber.start_bohr: must lie inside the grid");
    if (!(cfg.absorber->start > cfg.r_min_bohr))
      diags.push_back("absorber.start_bohr: must exceed r_min");
    if (!(cfg.absorber->strength >= 0.0))
      diags.push_back("absorber.strength_hartree: must be >= 0");
    if (!(cfg.absorber->power > 0.0)) diags.push_back("absorber.power: must be > 0");
  }

  if (cfg.realizations < 1) diags.push_back("realizations: must be >= 1");
  if (cfg.snapshot_stride < 1) diags.push_back("snapshot_stride: must be >= 1");
  if (cfg.density.time_stride < 1) diags.push_back("density_export.time_stride: must be >= 1");
  if (cfg.density.space_stride < 1) diags.push_back("density_export.space_stride: must be >= 1");
  return diags;
}

inline ScenarioConfig load_scenario_config(const std::filesystem::path& path,
                                           std::vector<std::string>& diagnostics) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw validation_error("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_scenario_config(j, diagnostics);
}

/// Serialize the fully resolved config (defaults filled in, unit-suffixed
/// keys) so a manifest alone can reproduce the run.
inline nlohmann::ordered_json config_to_json(const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  j["name"] = cfg.name;
  if (!cfg.output_dir.empty()) j["output_dir"] = cfg.output_dir;
  j["master_seed"] = cfg.master_seed;
  j["realizations"] = cfg.realizations;
  j["snapshot_stride"] = cfg.snapshot_stride;
  j["time_grid"] = {{"t_start_fs", cfg.t_start_fs},
                    {"t_end_fs", cfg.t_end_fs},
                    {"dt_fs", cfg.dt_fs}};
  j["radial_grid"] = {{"r_min_bohr", cfg.r_min_bohr},
                      {"r_max_bohr", cfg.r_max_bohr},
                      {"n_points", cfg.n_points}};

  auto env_json = [](const EnvelopeSpec& env) {
    nlohmann::ordered_json e;
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, GaussianEnvelope>) {
            e["kind"] = "gaussian";
            e["center_fs"] = au_to_fs(s.center);
            e["width_fs"] = au_to_fs(s.width);
          } else {
            e["kind"] = "sine_power";
            e["duration_fs"] = au_to_fs(s.duration);
            e["exponent"] = s.exponent;
          }
        },
        env.shape);
    return e;
  };
  j["field"] = {{"omega_center_hartree", cfg.omega_center},
                {"peak_amplitude_au", cfg.peak_amplitude},
                {"coherent_envelope", env_json(cfg.coherent_envelope)},
                {"incoherent_envelope", env_json(cfg.incoherent_envelope)},
                {"jumps",
                 {{"mean_interval_fs", au_to_fs(cfg.jumps.mean_interval)},
                  {"phase_range_rad", cfg.jumps.phase_range},
                  {"freq_shift_range_hartree", cfg.jumps.freq_shift_range}}}};

  auto pes_json = [](const PesSpec& spec) {
    nlohmann::ordered_json e;
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          e["kind"] = std::is_same_v<T, MorsePes> ? "morse" : "repulsive_exp";
          e["w0_hartree"] = p.w0;
          e["r0_bohr"] = p.r0;
          e["a_bohr"] = p.a;
          e["w_inf_hartree"] = p.w_inf;
        },
        spec);
    return e;
  };
  auto channel_json = [&](const ChannelSpec& ch) {
    nlohmann::ordered_json e;
    e["pes"] = pes_json(ch.pes);
    e["j"] = ch.j;
    e["mass_au"] = ch.mu;
    return e;
  };
  j["ground_channel"] = channel_json(cfg.ground_channel);
  j["ground_channel"]["vibrational_level"] = cfg.vibrational_level;
  j["excited_channel_1"] = channel_json(cfg.excited_channel_1);
  j["excited_channel_2"] = channel_json(cfg.excited_channel_2);
  j["dipole"] = {{"slope_au_per_bohr", cfg.dipole.slope}};
  if (cfg.absorber) {
    j["absorber"] = {{"start_bohr", cfg.absorber->start},
                     {"strength_hartree", cfg.absorber->strength},
                     {"power", cfg.absorber->power}};
  }
  j["density_export"] = {{"time_stride", cfg.density.time_stride},
                         {"space_stride", cfg.density.space_stride}};
  return j;
}

}  // namespace wpdyn
