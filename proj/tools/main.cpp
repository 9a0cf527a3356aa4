// Batch front end: parameter sweeps, plot-ready data products, the
// homodyne reconstruction demo, and stochastic oracle runs.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure
// (unstable system, failed solve, oracle mismatch).
//
// Determinism: every output (CSV, JSON, SVG) is written in a fixed order
// with fixed formatting, and all randomness flows from --seed through
// counter-derived substreams, so identical invocations produce byte-
// identical files.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "optomech/optomech.hpp"

namespace om = optomech;
using nlohmann::ordered_json;

namespace {

constexpr double knan = std::numeric_limits<double>::quiet_NaN();

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 12345;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "parameter file (JSON)")
      ->required();
  cmd->add_option("--out", o.out_dir, "output directory (default: .)");
  cmd->add_option("--seed", o.seed, "RNG seed for stochastic commands");
}

om::SystemParams physical_or_fail(const om::LoadedConfig& cfg) {
  if (!cfg.physical)
    throw om::ConfigError(
        "this command needs a physical config (cavity_a/cavity_b/mirror)");
  const om::SystemParams p = *cfg.physical;
  for (const std::string& w : p.validate())
    std::cerr << "warning: " << w << "\n";
  return p;
}

om::DeskParams desk_or_fail(const om::LoadedConfig& cfg) {
  if (!cfg.desk)
    throw om::ConfigError(
        "this command needs a desk config ({\"desk\": {...}}); direct "
        "integration at laboratory rates is not feasible");
  return *cfg.desk;
}

std::filesystem::path out_file(const std::string& dir,
                               const std::string& name) {
  std::filesystem::create_directories(dir);
  return std::filesystem::path(dir) / name;
}

ordered_json mat_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json stability_json(const om::StabilityReport& st) {
  ordered_json j;
  j["stable"] = st.stable;
  j["rh_stable"] = st.rh_stable;
  j["margin"] = st.margin;
  j["char_poly"] = st.char_poly;
  j["hurwitz_minors"] = st.hurwitz_minors;
  j["eigen_margins"] = st.eigen_margins;
  j["C1"] = st.c1();
  j["C2"] = st.c2();
  return j;
}

ordered_json entanglement_json(const om::EntanglementReport& rep) {
  ordered_json j;
  ordered_json pairs = ordered_json::array();
  const char* names[3] = {"ab", "am", "bm"};
  for (int i = 0; i < 3; ++i) {
    ordered_json p;
    p["pair"] = names[i];
    p["nu_minus"] = rep.pairs[i].nu_minus;
    p["log_negativity"] = rep.pairs[i].log_neg;
    pairs.push_back(std::move(p));
  }
  j["pairs"] = std::move(pairs);
  j["npt"] = {{"a", rep.npt_a}, {"b", rep.npt_b}, {"m", rep.npt_m}};
  j["nu_one_vs_two"] = {{"a", rep.nu_a}, {"b", rep.nu_b}, {"m", rep.nu_m}};
  j["fully_inseparable"] = rep.fully_inseparable;
  return j;
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw om::ConfigError("cannot open output file: " + path.string());
  out << j.dump(2) << "\n";
  out.close();
  std::cout << "wrote " << path.string() << "\n";
}

const char* kPalette[6] = {"#1f77b4", "#d62728", "#2ca02c",
                           "#9467bd", "#ff7f0e", "#17becf"};

// ---------------------------------------------------------------- stability

int run_stability(const CommonOpts& o, double lo_wm, double hi_wm, int points,
                  int pb_points, double pb_max) {
  const om::SystemParams base = physical_or_fail(om::load_config(o.config_path));
  const double wm = base.mirror.omega_m;
  if (std::isnan(lo_wm)) lo_wm = -1.5 * base.cavity_a.kappa / wm;
  if (std::isnan(hi_wm)) hi_wm = +1.5 * base.cavity_a.kappa / wm;
  if (points < 1 || pb_points < 1)
    throw om::ConfigError("sweep needs at least one point per axis");
  const std::vector<double> deltas = om::linspace(lo_wm * wm, hi_wm * wm, points);
  std::vector<double> powers(pb_points);
  for (int j = 0; j < pb_points; ++j)
    powers[j] = pb_max * base.cavity_a.power * static_cast<double>(j) /
                static_cast<double>(pb_points);

  const auto csv_path = out_file(o.out_dir, "stability.csv");
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw om::ConfigError("cannot open " + csv_path.string());
  om::csv::write_row(csv, {"delta_b", "abs_delta_b_over_omega_m", "p_b", "C1",
                           "C2", "margin", "stable"});
  std::vector<std::vector<double>> c1(pb_points, std::vector<double>(points));
  std::vector<std::vector<double>> c2(pb_points, std::vector<double>(points));
  for (int j = 0; j < pb_points; ++j) {
    for (int i = 0; i < points; ++i) {
      const om::GridPoint pt =
          om::evaluate_point(base, deltas[i], powers[j], false);
      om::csv::write_row(
          csv, {om::csv::format_number(pt.delta_b),
                om::csv::format_number(std::abs(pt.delta_b) / wm),
                om::csv::format_number(pt.p_b),
                om::csv::format_number(pt.stability.c1()),
                om::csv::format_number(pt.stability.c2()),
                om::csv::format_number(pt.stability.margin),
                pt.stability.stable ? "true" : "false"});
      c1[j][i] = pt.stability.c1();
      c2[j][i] = pt.stability.c2();
    }
  }
  csv.close();
  std::cout << "wrote " << csv_path.string() << "\n";

  const double pb_hi =
      pb_points > 1 ? powers.back() / base.cavity_a.power : pb_max;
  for (const auto& [name, grid, title] :
       {std::make_tuple("stability_c1.svg", &c1, "stability indicator C1"),
        std::make_tuple("stability_c2.svg", &c2, "stability indicator C2")}) {
    const auto svg_path = out_file(o.out_dir, name);
    std::ofstream svg(svg_path, std::ios::binary);
    om::svg::heatmap(svg, *grid, deltas.front() / wm, deltas.back() / wm, 0.0,
                     pb_hi, title, "delta_b / omega_m", "P_b / P_a");
    svg.close();
    std::cout << "wrote " << svg_path.string() << "\n";
  }
  return 0;
}

// --------------------------------------------------- negativity / tripartite

// Shared sweep core: negativity emits the three pairwise log-negativities;
// tripartite additionally emits the one-vs-two NPT data.
int run_negativity_like(const CommonOpts& o, double lo_wm, double hi_wm,
                        int points, std::vector<double> pb_fracs,
                        bool tripartite) {
  const om::SystemParams base = physical_or_fail(om::load_config(o.config_path));
  const double wm = base.mirror.omega_m;
  if (points < 1) throw om::ConfigError("sweep needs at least one point");
  if (pb_fracs.empty()) throw om::ConfigError("need at least one --pb-frac");
  const std::vector<double> deltas = om::linspace(lo_wm * wm, hi_wm * wm, points);

  const std::string csv_name = tripartite ? "tripartite.csv" : "negativity.csv";
  const auto csv_path = out_file(o.out_dir, csv_name);
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw om::ConfigError("cannot open " + csv_path.string());
  std::vector<std::string> header = {"delta_b", "abs_delta_b_over_omega_m",
                                     "p_b",     "En_am",
                                     "En_bm",   "En_ab"};
  if (tripartite)
    for (const char* c : {"nu_a", "nu_b", "nu_m", "npt_a", "npt_b", "npt_m",
                          "fully_inseparable"})
      header.push_back(c);
  header.push_back("stable");
  om::csv::write_row(csv, header);

  // series[quantity][frac] over deltas; NaN marks unstable gaps.
  std::vector<std::vector<om::svg::Series>> series(
      3, std::vector<om::svg::Series>(pb_fracs.size()));
  for (std::size_t f = 0; f < pb_fracs.size(); ++f) {
    const double p_b = pb_fracs[f] * base.cavity_a.power;
    for (int i = 0; i < points; ++i) {
      const om::GridPoint pt = om::evaluate_point(base, deltas[i], p_b, true);
      std::vector<std::string> row = {
          om::csv::format_number(pt.delta_b),
          om::csv::format_number(std::abs(pt.delta_b) / wm),
          om::csv::format_number(pt.p_b)};
      double en[3] = {knan, knan, knan};
      if (pt.has_state) {
        const auto& rep = pt.entanglement;
        en[0] = rep.pair(om::Mode::A, om::Mode::M).log_neg;
        en[1] = rep.pair(om::Mode::B, om::Mode::M).log_neg;
        en[2] = rep.pair(om::Mode::A, om::Mode::B).log_neg;
        for (double v : en) row.push_back(om::csv::format_number(v));
        if (tripartite) {
          row.push_back(om::csv::format_number(rep.nu_a));
          row.push_back(om::csv::format_number(rep.nu_b));
          row.push_back(om::csv::format_number(rep.nu_m));
          row.push_back(rep.npt_a ? "true" : "false");
          row.push_back(rep.npt_b ? "true" : "false");
          row.push_back(rep.npt_m ? "true" : "false");
          row.push_back(rep.fully_inseparable ? "true" : "false");
        }
      } else {
        const int blank = tripartite ? 10 : 3;
        for (int k = 0; k < blank; ++k) row.push_back("");
      }
      row.push_back(pt.stability.stable ? "true" : "false");
      om::csv::write_row(csv, row);
      for (int q = 0; q < 3; ++q) {
        series[q][f].x.push_back(pt.delta_b / wm);
        series[q][f].y.push_back(en[q]);
      }
    }
  }
  csv.close();
  std::cout << "wrote " << csv_path.string() << "\n";

  const char* quantity[3] = {"En_am", "En_bm", "En_ab"};
  if (!tripartite) {
    for (int q = 0; q < 3; ++q) {
      for (std::size_t f = 0; f < pb_fracs.size(); ++f) {
        char label[64];
        std::snprintf(label, sizeof(label), "P_b/P_a=%g", pb_fracs[f]);
        series[q][f].label = label;
        series[q][f].color = kPalette[f % 6];
      }
      const auto svg_path =
          out_file(o.out_dir, std::string("negativity_") +
                                  (q == 0 ? "am" : q == 1 ? "bm" : "ab") +
                                  ".svg");
      std::ofstream svg(svg_path, std::ios::binary);
      om::svg::line_plot(svg, series[q], quantity[q], "delta_b / omega_m",
                         "log-negativity");
      svg.close();
      std::cout << "wrote " << svg_path.string() << "\n";
    }
  } else {
    // One plot, three quantities, first power fraction.
    std::vector<om::svg::Series> curves(3);
    for (int q = 0; q < 3; ++q) {
      curves[q] = series[q][0];
      curves[q].label = quantity[q];
      curves[q].color = kPalette[q];
    }
    const auto svg_path = out_file(o.out_dir, "tripartite.svg");
    std::ofstream svg(svg_path, std::ios::binary);
    char title[64];
    std::snprintf(title, sizeof(title), "pairwise log-negativity, P_b/P_a=%g",
                  pb_fracs[0]);
    om::svg::line_plot(svg, curves, title, "delta_b / omega_m",
                       "log-negativity");
    svg.close();
    std::cout << "wrote " << svg_path.string() << "\n";
  }
  return 0;
}

// -------------------------------------------------------------- reconstruct

int run_reconstruct(const CommonOpts& o, double t_m, int samples,
                    bool dump_samples) {
  const om::LoadedConfig cfg = om::load_config(o.config_path);
  om::Mat6 k;
  Eigen::MatrixXd n;
  double kappa = 0.0;
  double eps = 0.0;
  if (cfg.physical) {
    const om::SystemParams p = physical_or_fail(cfg);
    const om::DerivedQuantities d = om::derive(p);
    k = om::build_drift(d, p);
    n = om::build_noise(d, p);
    kappa = p.cavity_a.kappa;
    eps = om::eps_stab_for(p);
  } else {
    const om::DeskParams d = desk_or_fail(cfg);
    k = om::build_drift(d);
    n = om::build_noise(d);
    kappa = d.kappa_a;
    eps = 1e-9 * d.omega_m;
  }
  const om::CovarianceMatrix v = om::solve_lyapunov(k, n, eps);
  const om::CovarianceMatrix v_ab =
      om::reduced_cm(v, {om::Mode::A, om::Mode::B});

  om::MeasurementConfig mc;
  mc.t_m = t_m > 0.0 ? t_m : 1.0 / kappa;
  mc.kappa = kappa;
  mc.phase_grid = om::MeasurementConfig::default_phase_grid();
  mc.samples_per_setting = samples;
  mc.seed = o.seed;
  mc.validate();
  const om::PipelineResult res = om::run_reconstruction_pipeline(v_ab, mc);

  const double err = std::abs(res.log_neg_est - res.log_neg_true);
  const bool within_band = err <= 3.0 * res.log_neg_stderr;
  const bool low_confidence =
      res.log_neg_stderr > 0.25 * std::max(res.log_neg_true, 0.1);

  ordered_json j;
  j["schema"] = "reconstruct-report/1";
  j["t_m"] = mc.t_m;
  j["kappa"] = mc.kappa;
  j["samples_per_setting"] = mc.samples_per_setting;
  j["settings"] = mc.phase_grid.size();
  j["seed"] = mc.seed;
  j["v_ab_true"] = mat_json(res.v_ab_true.v);
  j["v_ab_est"] = mat_json(res.v_ab_est.v);
  j["max_abs_entry_err"] = res.max_abs_entry_err;
  j["log_neg_true"] = res.log_neg_true;
  j["log_neg_est"] = res.log_neg_est;
  j["log_neg_stderr"] = res.log_neg_stderr;
  j["within_3_stderr"] = within_band;
  j["low_confidence"] = low_confidence;
  j["physical"] = res.physical;
  j["condition"] = res.condition;
  write_json(out_file(o.out_dir, "reconstruct.json"), j);

  if (dump_samples) {
    const om::CovarianceMatrix v_out = om::output_cm(v_ab, mc.kappa, mc.t_m);
    const om::HomodyneSamples rec = om::simulate_homodyne(v_out, mc);
    const auto csv_path = out_file(o.out_dir, "samples.csv");
    std::ofstream csv(csv_path, std::ios::binary);
    om::csv::write_row(csv,
                       {"setting_index", "theta_a", "theta_b", "xa", "xb"});
    for (std::size_t s = 0; s < rec.samples.size(); ++s)
      for (const auto& [xa, xb] : rec.samples[s])
        om::csv::write_row(csv, {std::to_string(s),
                                 om::csv::format_number(rec.phase_grid[s].first),
                                 om::csv::format_number(rec.phase_grid[s].second),
                                 om::csv::format_number(xa),
                                 om::csv::format_number(xb)});
    csv.close();
    std::cout << "wrote " << csv_path.string() << "\n";
  }
  return 0;
}

// ------------------------------------------------------------------- oracle

int run_oracle(const CommonOpts& o, double dt, double t_total, double burn_in,
               int trajectories, double tolerance, bool convergence) {
  const om::DeskParams d = desk_or_fail(om::load_config(o.config_path));
  const om::Mat6 k = om::build_drift(d);
  const Eigen::MatrixXd n = om::build_noise(d);
  const om::CovarianceMatrix v = om::solve_lyapunov(k, n, 1e-9 * d.omega_m);

  om::IntegratorConfig ic;
  ic.dt = dt;
  ic.t_total = t_total;
  ic.burn_in = burn_in;
  ic.n_trajectories = trajectories;
  ic.seed = o.seed;
  const om::EnsembleResult est = om::integrate_ensemble(k, n, ic);
  const double rel = (est.v - v.v).norm() / v.v.norm();
  const double se = om::frobenius_stderr(est, v.v);
  const bool pass = rel < std::max(tolerance, 4.0 * se);

  ordered_json j;
  j["schema"] = "oracle-report/1";
  j["dt"] = dt;
  j["t_total"] = t_total;
  j["burn_in"] = burn_in;
  j["trajectories"] = trajectories;
  j["seed"] = o.seed;
  j["lyapunov_v"] = mat_json(v.v);
  j["ensemble_v"] = mat_json(est.v);
  j["rel_frobenius"] = rel;
  j["frobenius_stderr"] = se;
  j["tolerance"] = tolerance;
  j["pass"] = pass;
  if (convergence) {
    const om::ConvergenceResult cr = om::weak_convergence_check(
        k, n, 8.0 * dt, 3, t_total, burn_in, std::max(trajectories / 8, 2),
        o.seed + 1);
    ordered_json c;
    c["dts"] = cr.dts;
    c["errors"] = cr.errors;
    c["slope"] = cr.slope;
    j["convergence"] = std::move(c);
  }
  write_json(out_file(o.out_dir, "oracle.json"), j);
  if (!pass)
    std::cerr << "oracle mismatch: rel_frobenius = " << rel
              << " exceeds tolerance\n";
  return pass ? 0 : 3;
}

// -------------------------------------------------------------------- point

int run_point(const CommonOpts& o) {
  const om::LoadedConfig cfg = om::load_config(o.config_path);
  ordered_json j;
  j["schema"] = "point-report/1";
  j["config"] = o.config_path;

  om::Mat6 k;
  Eigen::MatrixXd n;
  double eps = 0.0;
  if (cfg.physical) {
    const om::SystemParams p = *cfg.physical;
    const std::vector<std::string> warnings = p.validate();
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
    const om::DerivedQuantities d = om::derive(p);
    k = om::build_drift(d, p);
    n = om::build_noise(d, p);
    eps = om::eps_stab_for(p);
    ordered_json dj;
    dj["g0_a"] = d.g0.a;
    dj["g0_b"] = d.g0.b;
    dj["drive_amp_a"] = d.drive_amp.a;
    dj["drive_amp_b"] = d.drive_amp.b;
    dj["alpha_a"] = d.alpha_s.a;
    dj["alpha_b"] = d.alpha_s.b;
    dj["g_eff_a"] = d.g_eff.a;
    dj["g_eff_b"] = d.g_eff.b;
    dj["nbar"] = d.nbar;
    dj["q_s"] = d.q_s;
    dj["delta_a"] = p.cavity_a.detuning_effective;
    dj["delta_b"] = p.cavity_b.detuning_effective;
    j["derived"] = std::move(dj);
    j["warnings"] = warnings;
  } else {
    const om::DeskParams d = desk_or_fail(cfg);
    k = om::build_drift(d);
    n = om::build_noise(d);
    eps = 1e-9 * d.omega_m;
    ordered_json dj;
    dj["omega_m"] = d.omega_m;
    dj["gamma_m"] = d.gamma_m;
    dj["nbar"] = d.nbar;
    dj["kappa_a"] = d.kappa_a;
    dj["kappa_b"] = d.kappa_b;
    dj["g_a"] = d.g_a;
    dj["g_b"] = d.g_b;
    dj["delta_a"] = d.delta_a;
    dj["delta_b"] = d.delta_b;
    j["desk"] = std::move(dj);
  }

  const om::StabilityReport st = om::stability(k, eps);
  j["stable"] = st.stable;
  j["drift"] = mat_json(k);
  ordered_json nd = ordered_json::array();
  for (int i = 0; i < 6; ++i) nd.push_back(n(i, i));
  j["noise_diagonal"] = std::move(nd);
  j["stability"] = stability_json(st);
  if (st.stable) {
    const om::CovarianceMatrix v = om::solve_lyapunov(k, n, eps);
    j["covariance"] = mat_json(v.v);
    j["lyapunov_residual"] = om::lyapunov_residual(k, n, v.v);
    j["entanglement"] = entanglement_json(om::tripartite_npt(v));
  }
  write_json(out_file(o.out_dir, "point.json"), j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Steady-state Gaussian dynamics of two optical cavities sharing a "
      "movable mirror: stability maps, entanglement sweeps, homodyne "
      "reconstruction, and a stochastic cross-check."};
  app.require_subcommand(1);

  CommonOpts stab_o, neg_o, tri_o, rec_o, ora_o, pt_o;

  auto* stab = app.add_subcommand("stability", "stability indicators over a "
                                               "(delta_b, P_b) grid");
  add_common(stab, stab_o);
  double stab_lo = knan, stab_hi = knan, stab_pb_max = 1.0;
  int stab_points = 41, stab_pb_points = 20;
  stab->add_option("--delta-lo", stab_lo,
                   "lower delta_b in units of omega_m (default -1.5 kappa_a)");
  stab->add_option("--delta-hi", stab_hi,
                   "upper delta_b in units of omega_m (default +1.5 kappa_a)");
  stab->add_option("--points", stab_points, "points along delta_b");
  stab->add_option("--pb-points", stab_pb_points, "points along P_b");
  stab->add_option("--pb-max", stab_pb_max,
                   "upper P_b/P_a of the grid (exclusive)");

  auto* neg = app.add_subcommand(
      "negativity", "pairwise log-negativity along a delta_b sweep");
  add_common(neg, neg_o);
  double neg_lo = -3.0, neg_hi = 0.0;
  int neg_points = 200;
  std::vector<double> neg_fracs{0.0, 0.25, 0.5, 0.75, 0.9};
  neg->add_option("--delta-lo", neg_lo, "lower delta_b in units of omega_m");
  neg->add_option("--delta-hi", neg_hi, "upper delta_b in units of omega_m");
  neg->add_option("--points", neg_points, "points along delta_b");
  neg->add_option("--pb-frac", neg_fracs,
                  "P_b/P_a values (repeatable; default 0 0.25 0.5 0.75 0.9)");

  auto* tri = app.add_subcommand(
      "tripartite", "one-vs-two NPT analysis along a delta_b sweep");
  add_common(tri, tri_o);
  double tri_lo = -8.0, tri_hi = 0.0;
  int tri_points = 401;
  std::vector<double> tri_fracs{0.15};
  tri->add_option("--delta-lo", tri_lo, "lower delta_b in units of omega_m");
  tri->add_option("--delta-hi", tri_hi, "upper delta_b in units of omega_m");
  tri->add_option("--points", tri_points, "points along delta_b");
  tri->add_option("--pb-frac", tri_fracs, "P_b/P_a values (default 0.15)");

  auto* rec = app.add_subcommand(
      "reconstruct", "simulated homodyne record -> reconstructed state");
  add_common(rec, rec_o);
  double rec_tm = 0.0;
  int rec_samples = 100000;
  bool rec_dump = false;
  rec->add_option("--t-m", rec_tm,
                  "acquisition time in seconds (default 1/kappa_a)");
  rec->add_option("--samples", rec_samples, "samples per phase setting");
  rec->add_flag("--dump-samples", rec_dump, "also write samples.csv");

  auto* ora = app.add_subcommand(
      "oracle", "stochastic integration cross-check (desk config)");
  add_common(ora, ora_o);
  double ora_dt = 0.005, ora_t = 80.0, ora_burn = 60.0, ora_tol = 0.05;
  int ora_traj = 2000;
  bool ora_conv = false;
  ora->add_option("--dt", ora_dt, "integration step");
  ora->add_option("--t-total", ora_t, "averaged time span per trajectory");
  ora->add_option("--burn-in", ora_burn, "discarded initial time span");
  ora->add_option("--trajectories", ora_traj, "ensemble size");
  ora->add_option("--tolerance", ora_tol, "relative Frobenius tolerance");
  ora->add_flag("--convergence", ora_conv, "also run the weak-order ladder");

  auto* pt = app.add_subcommand(
      "point", "full report (derived quantities, matrices, entanglement)");
  add_common(pt, pt_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (stab->parsed())
      return run_stability(stab_o, stab_lo, stab_hi, stab_points,
                           stab_pb_points, stab_pb_max);
    if (neg->parsed())
      return run_negativity_like(neg_o, neg_lo, neg_hi, neg_points, neg_fracs,
                                 false);
    if (tri->parsed())
      return run_negativity_like(tri_o, tri_lo, tri_hi, tri_points, tri_fracs,
                                 true);
    if (rec->parsed())
      return run_reconstruct(rec_o, rec_tm, rec_samples, rec_dump);
    if (ora->parsed())
      return run_oracle(ora_o, ora_dt, ora_t, ora_burn, ora_traj, ora_tol,
                        ora_conv);
    if (pt->parsed()) return run_point(pt_o);
  } catch (const om::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
