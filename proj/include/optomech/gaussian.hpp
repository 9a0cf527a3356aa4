#pragma once

// Gaussian-state machinery: partial transposition, symplectic spectra,
// logarithmic negativity and the NPT classification of tripartite states.
//
// Conventions (fixed throughout the library): quadratures are normalized so
// that the vacuum variance is 1/2; the symplectic form is the direct sum of
// 2x2 blocks [[0, 1], [-1, 0]]; a bipartition is entangled iff the smallest
// symplectic eigenvalue of the partially transposed covariance matrix drops
// below 1/2, and the logarithmic negativity is E_N = max(0, -ln(2 nu_minus))
// with the natural logarithm.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "optomech/core.hpp"
#include "optomech/steady_state.hpp"

namespace optomech {

// Block-diagonal symplectic form for n modes.
inline Eigen::MatrixXd symplectic_form(int n_modes) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int i = 0; i < n_modes; ++i) {
    s(2 * i, 2 * i + 1) = 1.0;
    s(2 * i + 1, 2 * i) = -1.0;
  }
  return s;
}

// Extract the covariance submatrix of the listed modes (in the listed
// order), preserving their labels.
inline CovarianceMatrix reduced_cm(const CovarianceMatrix& cm,
                                   const std::vector<Mode>& modes) {
  std::vector<int> rows;
  rows.reserve(2 * modes.size());
  for (Mode m : modes) {
    const int i = cm.index_of(m);
    rows.push_back(2 * i);
    rows.push_back(2 * i + 1);
  }
  Eigen::MatrixXd out(rows.size(), rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows.size(); ++c)
      out(r, c) = cm.v(rows[r], rows[c]);
  return CovarianceMatrix{out, modes};
}

// Partial transposition of one mode: at the covariance level, transposing a
// mode flips the sign of its momentum-like quadrature, V -> P V P with
// P = diag(..., 1, -1, ...). An involution.
inline CovarianceMatrix partial_transpose(const CovarianceMatrix& cm,
                                          Mode transposed) {
  const int i = cm.index_of(transposed);
  CovarianceMatrix out = cm;
  out.v.row(2 * i + 1) *= -1.0;
  out.v.col(2 * i + 1) *= -1.0;
  return out;
}

// Symplectic eigenvalues of a symmetric positive-definite covariance
// matrix: the moduli of the eigenvalues of Sigma*V, which come in pairs
// +/- i nu; each nu is returned once, ascending.
inline std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& cm) {
  const int n = cm.n_modes();
  const Eigen::MatrixXd sv = symplectic_form(n) * cm.v;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(sv, false);
  if (solver.info() != Eigen::Success)
    throw EigenFailure("eigensolver failed on Sigma*V");
  std::vector<double> moduli(2 * n);
  for (int i = 0; i < 2 * n; ++i) moduli[i] = std::abs(solver.eigenvalues()[i]);
  std::sort(moduli.begin(), moduli.end());
  std::vector<double> nu(n);
  // Paired moduli: average each (equal up to roundoff) +/- pair.
  for (int i = 0; i < n; ++i) nu[i] = 0.5 * (moduli[2 * i] + moduli[2 * i + 1]);
  return nu;
}

// Uncertainty-relation check: every symplectic eigenvalue >= 1/2 - tol.
inline bool check_physicality(const CovarianceMatrix& cm, double tol = 1e-9) {
  for (double nu : symplectic_eigenvalues(cm))
    if (nu < 0.5 - tol) return false;
  return true;
}

// Closed-form symplectic spectrum of a two-mode covariance matrix
//     V = [[L1, C], [C^T, L2]]   (2x2 blocks):
//     (n_pm)^2 = (chi -++ sqrt(chi^2 - 4 det V)) / 2,
//     chi = det L1 + det L2 + 2 s det C,
// where s = +1 for the spectrum of V itself and s = -1 after partial
// transposition of either mode (PT acts on the blocks exactly by
// det C -> -det C). Returns (n_minus, n_plus).
inline std::pair<double, double> symplectic_spectrum_2mode_closed_form(
    const CovarianceMatrix& cm, bool pt) {
  if (cm.n_modes() != 2)
    throw UnknownMode("closed form requires a two-mode covariance matrix");
  const Mat2 l1 = cm.v.block<2, 2>(0, 0);
  const Mat2 l2 = cm.v.block<2, 2>(2, 2);
  const Mat2 c = cm.v.block<2, 2>(0, 2);
  const double sign = pt ? -1.0 : 1.0;
  const double chi =
      l1.determinant() + l2.determinant() + 2.0 * sign * c.determinant();
  const double det_v = cm.v.determinant();
  const double disc = chi * chi - 4.0 * det_v;
  if (disc < -1e-9)
    throw NegativeDiscriminant(
        "chi^2 - 4 det V < 0: input matrix is not a physical two-mode CM");
  const double root = std::sqrt(std::max(disc, 0.0));
  const double n_minus = std::sqrt(std::max((chi - root) / 2.0, 0.0));
  const double n_plus = std::sqrt(std::max((chi + root) / 2.0, 0.0));
  return {n_minus, n_plus};
}

// Logarithmic negativity of a two-mode state across its single cut.
inline double log_negativity(const CovarianceMatrix& cm) {
  const double n_minus = symplectic_spectrum_2mode_closed_form(cm, true).first;
  return std::max(0.0, -std::log(2.0 * n_minus));
}

struct PairResult {
  Mode first = Mode::A;
  Mode second = Mode::B;
  double nu_minus = 0.0;  // smallest PT symplectic eigenvalue
  double log_neg = 0.0;
};

struct EntanglementReport {
  std::array<PairResult, 3> pairs{};  // (a,b), (a,m), (b,m)
  // NPT verdicts of the three one-vs-two bipartitions of the full state,
  // indexed by the transposed mode: a|bm, b|am, m|ab.
  bool npt_a = false;
  bool npt_b = false;
  bool npt_m = false;
  // Smallest symplectic eigenvalue after transposing the named mode.
  double nu_a = 0.0;
  double nu_b = 0.0;
  double nu_m = 0.0;
  bool fully_inseparable = false;  // all three bipartitions NPT

  const PairResult& pair(Mode x, Mode y) const {
    for (const auto& p : pairs)
      if ((p.first == x && p.second == y) || (p.first == y && p.second == x))
        return p;
    throw UnknownMode("no such mode pair in report");
  }
};

// NPT test of each 1-vs-2 bipartition of a three-mode state: partially
// transpose one mode of the full 6x6 matrix and look for a symplectic
// eigenvalue below 1/2.
inline EntanglementReport tripartite_npt(const CovarianceMatrix& cm,
                                         double tol = 1e-9) {
  if (cm.n_modes() != 3)
    throw UnknownMode("tripartite analysis requires a three-mode state");
  EntanglementReport rep;
  const std::array<std::pair<Mode, Mode>, 3> pairs = {
      std::make_pair(Mode::A, Mode::B), std::make_pair(Mode::A, Mode::M),
      std::make_pair(Mode::B, Mode::M)};
  for (int i = 0; i < 3; ++i) {
    const CovarianceMatrix sub =
        reduced_cm(cm, {pairs[i].first, pairs[i].second});
    const auto [n_minus, n_plus] =
        symplectic_spectrum_2mode_closed_form(sub, true);
    (void)n_plus;
    rep.pairs[i] = PairResult{pairs[i].first, pairs[i].second, n_minus,
                              std::max(0.0, -std::log(2.0 * n_minus))};
  }
  const auto min_nu_after_pt = [&](Mode m) {
    const std::vector<double> nu =
        symplectic_eigenvalues(partial_transpose(cm, m));
    return nu.front();
  };
  rep.nu_a = min_nu_after_pt(Mode::A);
  rep.nu_b = min_nu_after_pt(Mode::B);
  rep.nu_m = min_nu_after_pt(Mode::M);
  rep.npt_a = rep.nu_a < 0.5 - tol;
  rep.npt_b = rep.nu_b < 0.5 - tol;
  rep.npt_m = rep.nu_m < 0.5 - tol;
  rep.fully_inseparable = rep.npt_a && rep.npt_b && rep.npt_m;
  return rep;
}

}  // namespace optomech
