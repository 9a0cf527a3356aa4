#pragma once

// Shared test fixtures and small independent oracles.

#include <cmath>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "optomech/config.hpp"
#include "optomech/gaussian.hpp"
#include "optomech/params.hpp"

namespace testutil {

inline std::string source_dir() { return OPTOMECH_SOURCE_DIR; }

inline optomech::SystemParams lab_params() {
  const optomech::LoadedConfig cfg =
      optomech::load_config(source_dir() + "/configs/lab.json");
  return *cfg.physical;
}

inline optomech::DeskParams desk_params() {
  const optomech::LoadedConfig cfg =
      optomech::load_config(source_dir() + "/configs/desk.json");
  return *cfg.desk;
}

// Random n-mode symplectic matrix: exp(Sigma H) with H symmetric lies in
// the real symplectic group (Sigma H spans the symplectic Lie algebra).
inline Eigen::MatrixXd random_symplectic(int n_modes, std::mt19937_64& gen,
                                         double strength = 0.4) {
  std::normal_distribution<double> normal(0.0, strength);
  const int d = 2 * n_modes;
  Eigen::MatrixXd h(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) h(i, j) = h(j, i) = normal(gen);
  const Eigen::MatrixXd a = optomech::symplectic_form(n_modes) * h;
  return a.exp();
}

// Random physical covariance matrix with known symplectic spectrum:
// V = S diag(nu_i, nu_i) S^T, every nu_i >= 1/2.
struct RandomCM {
  optomech::CovarianceMatrix cm;
  std::vector<double> nus;  // ascending
};

inline RandomCM random_physical_cm(const std::vector<optomech::Mode>& modes,
                                   std::mt19937_64& gen,
                                   double max_excess = 1.5) {
  const int n = static_cast<int>(modes.size());
  std::uniform_real_distribution<double> uni(0.0, max_excess);
  std::vector<double> nus(n);
  for (double& nu : nus) nu = 0.5 + uni(gen);
  std::sort(nus.begin(), nus.end());
  Eigen::VectorXd diag(2 * n);
  for (int i = 0; i < n; ++i) diag[2 * i] = diag[2 * i + 1] = nus[i];
  const Eigen::MatrixXd s = random_symplectic(n, gen);
  optomech::CovarianceMatrix cm;
  cm.v = s * diag.asDiagonal() * s.transpose();
  cm.v = ((cm.v + cm.v.transpose()) / 2.0).eval();
  cm.modes = modes;
  return RandomCM{cm, nus};
}

// Two-mode squeezed covariance matrix: local variances cosh(2r)/2 and
// correlations +-sinh(2r)/2.
inline optomech::CovarianceMatrix two_mode_squeezed(double r) {
  const double c = std::cosh(2.0 * r) / 2.0;
  const double s = std::sinh(2.0 * r) / 2.0;
  optomech::CovarianceMatrix cm;
  cm.v = Eigen::MatrixXd::Zero(4, 4);
  cm.v.diagonal().setConstant(c);
  cm.v(0, 2) = cm.v(2, 0) = s;
  cm.v(1, 3) = cm.v(3, 1) = -s;
  cm.modes = {optomech::Mode::A, optomech::Mode::B};
  return cm;
}

}  // namespace testutil
