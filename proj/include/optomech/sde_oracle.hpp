#pragma once

// Independent cross-check of the Lyapunov steady state by direct
// Euler-Maruyama integration of the linear Langevin system
//
//     df = K f dt + L dW,      L L^T = N,
//
// where dW is a vector of independent Wiener increments. Because the
// dynamics is linear with additive noise, the classical SDE reproduces the
// symmetrized quantum covariance exactly; the integrator therefore provides
// an implementation-independent oracle for the algebraic solver.
//
// The oracle is meant for desk-scale rates (order-unity omega_m): at
// laboratory rates the stiffness ratio between cavity decay and mechanical
// relaxation makes direct integration pointless when the algebraic solution
// is exact. The dynamics is invariant under a common rescaling of time and
// rates, so a desk-scale agreement check covers the laboratory case.
//
// The integrator accepts any square drift matrix (not only the full
// three-mode system) so that single-mode and single-cavity reference cases
// can be run through the identical code path.

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "optomech/core.hpp"
#include "optomech/rng.hpp"

namespace optomech {

struct IntegratorConfig {
  double dt = 0.0;
  double t_total = 0.0;  // time integrated after burn-in
  double burn_in = 0.0;
  int n_trajectories = 0;
  std::uint64_t seed = 0;
};

struct EnsembleResult {
  Eigen::MatrixXd v;        // time-and-ensemble averaged second moments
  Eigen::MatrixXd stderr_;  // entrywise standard error (trajectory batches)
  int n_trajectories = 0;
  long long n_samples = 0;
};

namespace detail {

// Square root factor of the diagonal noise matrix; rows with zero diffusion
// (the mirror position) get a zero amplitude, so they receive no noise.
inline Eigen::VectorXd noise_row_amplitudes(const Eigen::MatrixXd& n) {
  Eigen::VectorXd l(n.rows());
  for (Eigen::Index i = 0; i < n.rows(); ++i) {
    const double d = n(i, i);
    if (d < 0.0) throw NumericalError("noise matrix must be non-negative");
    l[i] = std::sqrt(d);
  }
  return l;
}

inline double spectral_abscissa(const Eigen::MatrixXd& k) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(k, false);
  if (es.info() != Eigen::Success)
    throw EigenFailure("eigen decomposition of drift matrix failed");
  return es.eigenvalues().real().maxCoeff();
}

inline void check_scheme(const Eigen::MatrixXd& k, double dt) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(k, false);
  if (es.info() != Eigen::Success)
    throw EigenFailure("eigen decomposition of drift matrix failed");
  const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
  if (dt * rho >= 0.1)
    throw UnstableScheme("dt * spectral_radius(K) >= 0.1: step too large");
}

}  // namespace detail

// Integrate an ensemble of trajectories from f(0) = 0 and average the outer
// products over the post-burn-in window of every trajectory. Trajectory t
// draws from the derived stream derive_seed(seed, t), so the estimate is
// reproducible and independent of any evaluation order. Standard errors
// come from the spread of per-trajectory means: trajectories are
// independent, while samples within one trajectory are strongly correlated
// in time and would yield bogus error bars if treated as independent.
inline EnsembleResult integrate_ensemble(const Eigen::MatrixXd& k,
                                         const Eigen::MatrixXd& n,
                                         const IntegratorConfig& cfg) {
  const Eigen::Index dim = k.rows();
  if (dim == 0 || k.cols() != dim || n.rows() != dim || n.cols() != dim)
    throw ConfigError("drift and noise matrices must be square, same size");
  if (cfg.dt <= 0.0 || cfg.t_total <= 0.0 || cfg.n_trajectories < 2)
    throw ConfigError("integrator config: dt, t_total > 0, trajectories >= 2");
  detail::check_scheme(k, cfg.dt);
  const double margin = -detail::spectral_abscissa(k);
  if (margin <= 0.0)
    throw UnstableSystem("drift matrix unstable: no stationary ensemble");
  if (cfg.burn_in < 10.0 / margin)
    throw ConfigError("burn_in shorter than 10 relaxation times of K");

  const int burn_steps = static_cast<int>(std::ceil(cfg.burn_in / cfg.dt));
  const int avg_steps = static_cast<int>(std::ceil(cfg.t_total / cfg.dt));
  const Eigen::VectorXd l = detail::noise_row_amplitudes(n);
  const double sqrt_dt = std::sqrt(cfg.dt);

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd f(dim), noise(dim);
  Eigen::MatrixXd acc(dim, dim);
  for (int traj = 0; traj < cfg.n_trajectories; ++traj) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(traj)));
    f.setZero();
    acc.setZero();
    for (int step = 0; step < burn_steps + avg_steps; ++step) {
      for (Eigen::Index i = 0; i < dim; ++i)
        noise[i] = l[i] == 0.0 ? 0.0 : l[i] * sqrt_dt * rng.next_normal();
      f += cfg.dt * (k * f) + noise;
      if (step >= burn_steps) acc += f * f.transpose();
    }
    const Eigen::MatrixXd traj_mean = acc / static_cast<double>(avg_steps);
    sum += traj_mean;
    sum_sq += traj_mean.cwiseProduct(traj_mean);
  }
  const double m = static_cast<double>(cfg.n_trajectories);
  EnsembleResult out;
  out.v = sum / m;
  const Eigen::MatrixXd var =
      (sum_sq / m - out.v.cwiseProduct(out.v)).cwiseMax(0.0);
  out.stderr_ = (var / (m - 1.0)).cwiseSqrt();
  out.n_trajectories = cfg.n_trajectories;
  out.n_samples = static_cast<long long>(cfg.n_trajectories) * avg_steps;
  return out;
}

// Aggregate standard error on the relative Frobenius distance to a
// reference matrix: sqrt(sum of entry variances) / ||ref||_F.
inline double frobenius_stderr(const EnsembleResult& r,
                               const Eigen::MatrixXd& ref) {
  return std::sqrt(r.stderr_.cwiseProduct(r.stderr_).sum()) / ref.norm();
}

struct ConvergenceResult {
  std::vector<double> dts;
  std::vector<double> errors;  // Frobenius distance to the finest level
  double slope = 0.0;          // fitted order in ||bias|| ~ dt^slope
};

// Weak-order check: integrate the same Brownian paths at a dt ladder (each
// level sums the same fine increments into coarser steps) and regress the
// log of the covariance error against the log of the step-size offset from
// the finest (reference) level. Euler-Maruyama has weak order 1 for linear
// additive-noise systems, so the fitted slope should sit near 1.
inline ConvergenceResult weak_convergence_check(
    const Eigen::MatrixXd& k, const Eigen::MatrixXd& n, double dt_coarse,
    int levels, double t_total, double burn_in, int n_trajectories,
    std::uint64_t seed) {
  if (levels < 2) throw ConfigError("need >= 2 ladder levels");
  detail::check_scheme(k, dt_coarse);
  if (detail::spectral_abscissa(k) >= 0.0)
    throw UnstableSystem("drift matrix unstable");
  const Eigen::Index dim = k.rows();

  // The reference level runs at dt_coarse / 2^levels.
  const int ref_factor = 1 << levels;
  const double dt_fine = dt_coarse / ref_factor;
  const long long fine_steps =
      static_cast<long long>(std::ceil((burn_in + t_total) / dt_fine));
  const long long burn_fine =
      static_cast<long long>(std::ceil(burn_in / dt_fine));
  const Eigen::VectorXd l = detail::noise_row_amplitudes(n);
  const double sqrt_dt_fine = std::sqrt(dt_fine);

  std::vector<int> factors(levels + 1);
  for (int lev = 0; lev <= levels; ++lev) factors[lev] = 1 << (levels - lev);

  std::vector<Eigen::MatrixXd> acc(levels + 1,
                                   Eigen::MatrixXd::Zero(dim, dim));
  std::vector<long long> counts(levels + 1, 0);
  Eigen::VectorXd dw(dim);
  for (int traj = 0; traj < n_trajectories; ++traj) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(traj)));
    std::vector<Eigen::VectorXd> f(levels + 1,
                                   Eigen::VectorXd::Zero(dim));
    std::vector<Eigen::VectorXd> pending(levels + 1,
                                         Eigen::VectorXd::Zero(dim));
    for (long long step = 0; step < fine_steps; ++step) {
      for (Eigen::Index i = 0; i < dim; ++i)
        dw[i] = l[i] == 0.0 ? 0.0 : l[i] * sqrt_dt_fine * rng.next_normal();
      for (int lev = 0; lev <= levels; ++lev) {
        pending[lev] += dw;
        if ((step + 1) % factors[lev] == 0) {
          const double dt_lev = dt_fine * factors[lev];
          f[lev] += dt_lev * (k * f[lev]) + pending[lev];
          pending[lev].setZero();
          if (step >= burn_fine) {
            acc[lev] += f[lev] * f[lev].transpose();
            counts[lev] += 1;
          }
        }
      }
    }
  }

  ConvergenceResult out;
  const Eigen::MatrixXd ref =
      acc[levels] / static_cast<double>(counts[levels]);
  for (int lev = 0; lev < levels; ++lev) {
    out.dts.push_back(dt_fine * factors[lev]);
    const Eigen::MatrixXd est = acc[lev] / static_cast<double>(counts[lev]);
    out.errors.push_back((est - ref).norm());
  }
  // Least-squares slope of log(error) against log(dt - dt_fine). The
  // reference level sits at dt_fine > 0, so an order-p bias c dt^p shows up
  // in the level differences as c (dt^p - dt_fine^p); using the debiased
  // abscissa keeps the fitted slope at p (exactly, for p = 1) instead of
  // inflating it on the rungs closest to the reference.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const int np = static_cast<int>(out.dts.size());
  for (int i = 0; i < np; ++i) {
    const double x = std::log(out.dts[i] - dt_fine);
    const double y = std::log(std::max(out.errors[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
  return out;
}

}  // namespace optomech
