#pragma once

// Parameter sweeps and CSV output.
//
// CSV files follow RFC 4180: CRLF line endings, '.' decimal separator,
// quoting only when a field contains a comma, quote, or line break. Numbers
// are printed with 12 significant digits, enough to round-trip the physics
// while keeping files diffable; negative zero is normalized to "0" so that
// byte-identical output does not depend on sign quirks of intermediate
// arithmetic. Rows are written in grid order, which makes repeated runs
// byte-identical by construction.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "optomech/core.hpp"
#include "optomech/dynamics.hpp"
#include "optomech/gaussian.hpp"
#include "optomech/params.hpp"
#include "optomech/steady_state.hpp"

namespace optomech {

namespace csv {

inline std::string format_number(double x) {
  if (x == 0.0) return "0";  // collapses -0 as well
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::string(buf);
}

inline std::string escape(const std::string& field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void write_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << escape(cells[i]);
  }
  os << "\r\n";
}

}  // namespace csv

inline std::vector<double> linspace(double lo, double hi, int points) {
  if (points < 1) throw ConfigError("sweep needs at least one point");
  if (!(std::isfinite(lo) && std::isfinite(hi)))
    throw ConfigError("sweep range must be finite");
  std::vector<double> out(points);
  if (points == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < points; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) /
                      static_cast<double>(points - 1);
  return out;
}

// One evaluated grid point of a (delta_b, p_b) sweep.
struct GridPoint {
  double delta_b = 0.0;  // effective detuning of cavity b, rad/s
  double p_b = 0.0;      // drive power of cavity b, W
  StabilityReport stability;
  bool has_state = false;          // V computed (stable point)
  CovarianceMatrix state;          // valid when has_state
  EntanglementReport entanglement; // valid when has_state
};

// Evaluate the model at one (delta_b, p_b) point of a sweep, overriding the
// base configuration. The swept detuning is the effective one appearing in
// the drift matrix, matching how the sweep outputs parameterize their axes.
inline GridPoint evaluate_point(SystemParams params, double delta_b,
                                double p_b, bool want_state) {
  params.cavity_b.detuning_effective = delta_b;
  params.cavity_b.power = p_b;
  GridPoint pt;
  pt.delta_b = delta_b;
  pt.p_b = p_b;
  const DerivedQuantities d = derive(params);
  const Mat6 k = build_drift(d, params);
  pt.stability = stability(k, eps_stab_for(params));
  if (want_state && pt.stability.stable) {
    const NoiseMatrix n = build_noise(d, params);
    pt.state = solve_lyapunov(k, n, eps_stab_for(params));
    pt.entanglement = tripartite_npt(pt.state);
    pt.has_state = true;
  }
  return pt;
}

}  // namespace optomech
