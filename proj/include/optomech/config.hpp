#pragma once

// JSON configuration loading.
//
// All frequencies are stored internally in angular units (rad/s). A field
// may instead be given in ordinary Hz by tagging its name `_over_2pi`
// (matching how experimental parameters are usually quoted); the loader
// multiplies by 2*pi. Detunings additionally accept an `_over_omega_m` tag,
// meaning a dimensionless multiple of the mechanical frequency.
//
// Two schemas are understood:
//   physical: {constants?, cavity_a:{...}, cavity_b:{...}, mirror:{...}}
//   desk:     {desk:{omega_m, gamma_m, nbar, kappa_a, kappa_b,
//                    g_a, g_b, delta_a, delta_b}}
// The desk schema bypasses the physical derivation and names the effective
// drift/noise ingredients directly, in units of an arbitrary common rate.

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "optomech/core.hpp"
#include "optomech/dynamics.hpp"
#include "optomech/params.hpp"

namespace optomech {

struct DeskParams {
  double omega_m = 1.0;
  double gamma_m = 0.0;
  double nbar = 0.0;
  double kappa_a = 1.0;
  double kappa_b = 1.0;
  double g_a = 0.0;
  double g_b = 0.0;
  double delta_a = 0.0;
  double delta_b = 0.0;
};

struct LoadedConfig {
  std::optional<SystemParams> physical;
  std::optional<DeskParams> desk;
};

namespace detail {

inline double require_number(const nlohmann::json& obj, const std::string& key,
                             const std::string& where) {
  if (!obj.contains(key))
    throw ConfigError("missing field \"" + where + "." + key + "\"");
  const auto& v = obj.at(key);
  if (!v.is_number())
    throw ConfigError("field \"" + where + "." + key + "\" must be a number");
  return v.get<double>();
}

// Read a rate that may be given as `<base>` (rad/s) or `<base>_over_2pi`
// (Hz). Exactly one spelling must be present unless `required` is false.
inline std::optional<double> read_rate(const nlohmann::json& obj,
                                       const std::string& base,
                                       const std::string& where,
                                       bool required = true) {
  const std::string hz = base + "_over_2pi";
  const bool has_rad = obj.contains(base);
  const bool has_hz = obj.contains(hz);
  if (has_rad && has_hz)
    throw ConfigError("fields \"" + where + "." + base + "\" and \"" + where +
                      "." + hz + "\" are mutually exclusive");
  if (has_rad) return require_number(obj, base, where);
  if (has_hz) return two_pi * require_number(obj, hz, where);
  if (required)
    throw ConfigError("missing field \"" + where + "." + base + "\" (or \"" +
                      where + "." + hz + "\")");
  return std::nullopt;
}

// Detunings accept a third spelling, `<base>_over_omega_m`, resolved once
// the mechanical frequency is known.
inline double read_detuning(const nlohmann::json& obj, const std::string& base,
                            const std::string& where, double omega_m) {
  const std::string rel = base + "_over_omega_m";
  if (obj.contains(rel)) {
    if (obj.contains(base) || obj.contains(base + "_over_2pi"))
      throw ConfigError("field \"" + where + "." + rel +
                        "\" conflicts with an absolute detuning");
    return omega_m * require_number(obj, rel, where);
  }
  return read_rate(obj, base, where).value();
}

inline CavityParams load_cavity(const nlohmann::json& obj, CavityLabel label,
                                const std::string& where, double omega_m) {
  CavityParams c;
  c.label = label;
  c.omega_laser = read_rate(obj, "omega_laser", where).value();
  c.omega_cavity = read_rate(obj, "omega_cavity", where, false).value_or(0.0);
  c.length = require_number(obj, "length", where);
  c.kappa = read_rate(obj, "kappa", where).value();
  c.power = require_number(obj, "power", where);
  c.detuning_effective = read_detuning(obj, "detuning", where, omega_m);
  return c;
}

}  // namespace detail

inline LoadedConfig parse_config(const nlohmann::json& root) {
  LoadedConfig out;
  if (root.contains("desk")) {
    const auto& d = root.at("desk");
    DeskParams desk;
    desk.omega_m = detail::require_number(d, "omega_m", "desk");
    desk.gamma_m = detail::require_number(d, "gamma_m", "desk");
    desk.nbar = detail::require_number(d, "nbar", "desk");
    desk.kappa_a = detail::require_number(d, "kappa_a", "desk");
    desk.kappa_b = detail::require_number(d, "kappa_b", "desk");
    desk.g_a = detail::require_number(d, "g_a", "desk");
    desk.g_b = detail::require_number(d, "g_b", "desk");
    desk.delta_a = detail::require_number(d, "delta_a", "desk");
    desk.delta_b = detail::require_number(d, "delta_b", "desk");
    if (desk.omega_m <= 0.0)
      throw ConfigError("field \"desk.omega_m\" must be positive");
    if (desk.nbar < 0.0 || desk.gamma_m < 0.0 || desk.kappa_a <= 0.0 ||
        desk.kappa_b <= 0.0)
      throw ConfigError("desk rates must be non-negative (kappas positive)");
    out.desk = desk;
    return out;
  }

  if (!root.contains("cavity_a") || !root.contains("cavity_b") ||
      !root.contains("mirror"))
    throw ConfigError(
        "config must contain either \"desk\" or all of "
        "\"cavity_a\", \"cavity_b\", \"mirror\"");

  SystemParams p;
  if (root.contains("constants")) {
    const auto& c = root.at("constants");
    if (c.contains("hbar"))
      p.constants.hbar = detail::require_number(c, "hbar", "constants");
    if (c.contains("k_b"))
      p.constants.k_b = detail::require_number(c, "k_b", "constants");
  }
  const auto& m = root.at("mirror");
  p.mirror.omega_m = detail::read_rate(m, "omega_m", "mirror").value();
  p.mirror.gamma_m = detail::read_rate(m, "gamma_m", "mirror").value();
  p.mirror.mass = detail::require_number(m, "mass", "mirror");
  p.mirror.temperature = detail::require_number(m, "temperature", "mirror");
  p.cavity_a = detail::load_cavity(root.at("cavity_a"), CavityLabel::A,
                                   "cavity_a", p.mirror.omega_m);
  p.cavity_b = detail::load_cavity(root.at("cavity_b"), CavityLabel::B,
                                   "cavity_b", p.mirror.omega_m);
  out.physical = p;
  return out;
}

inline LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is the offset of the failure; convert to a line number so the
    // diagnostic points at the offending spot in the file.
    std::ifstream again(path, std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(again)),
                     std::istreambuf_iterator<char>());
    std::size_t line = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    std::ostringstream msg;
    msg << path << ":" << line << ": " << e.what();
    throw ConfigError(msg.str());
  }
  return parse_config(root);
}

// Effective drift/noise ingredients for a desk parameter set.
inline Mat6 build_drift(const DeskParams& d) {
  return build_drift_raw(d.omega_m, d.gamma_m, d.kappa_a, d.kappa_b, d.g_a,
                         d.g_b, d.delta_a, d.delta_b);
}

inline NoiseMatrix build_noise(const DeskParams& d) {
  return build_noise_raw(d.kappa_a, d.kappa_b, d.gamma_m, d.nbar);
}

}  // namespace optomech
