#pragma once

// Stationary covariance matrix of the linearized dynamics.
//
// For a stable drift K the symmetrized quadrature covariance
// V_pq = <f_p f_q + f_q f_p>/2 solves the continuous Lyapunov equation
//
//     K V + V K^T + N = 0,
//
// equivalently V = integral_0^inf exp(K t) N exp(K^T t) dt. The 6x6 problem
// is solved exactly (up to roundoff) by vectorization: the Kronecker-sum
// system (I (x) K + K (x) I) vec(V) = -vec(N) is a dense 36x36 linear solve,
// which at this size is faster and simpler to make deterministic than a
// Bartels-Stewart factorization. The solve is performed on the
// nondimensionalized pair (K/w, N/w) -- the solution V is invariant under
// that common rescaling -- to keep the LU well-conditioned at laboratory
// rate scales.

#include <vector>

#include <Eigen/Dense>

#include "optomech/core.hpp"
#include "optomech/dynamics.hpp"

namespace optomech {

// Mode labels carried by covariance matrices: the two cavity fields and the
// mirror. Quadrature order within a mode is (x, y) for fields, (q, p) for
// the mirror; modes are stacked in the stored order of `modes`.
enum class Mode { A, B, M };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::A: return "a";
    case Mode::B: return "b";
    default: return "m";
  }
}

struct CovarianceMatrix {
  Eigen::MatrixXd v;        // 2n x 2n, symmetric
  std::vector<Mode> modes;  // length n

  int n_modes() const { return static_cast<int>(modes.size()); }

  int index_of(Mode m) const {
    for (int i = 0; i < n_modes(); ++i)
      if (modes[i] == m) return i;
    throw UnknownMode("mode not present in covariance matrix");
  }
};

// Solve K V + V K^T + N = 0 for the three-mode steady state.
// Throws UnstableSystem when K is not strictly stable (the integral
// diverges) and SingularSystem when the 36x36 solve is numerically rank
// deficient (near-marginal drift).
inline CovarianceMatrix solve_lyapunov(const DriftMatrix& k,
                                       const NoiseMatrix& n,
                                       double eps_stab) {
  const StabilityReport st = stability(k, eps_stab);
  if (!st.stable)
    throw UnstableSystem("drift matrix is not stable; no steady state");

  // Nondimensionalize by the spectral scale of K.
  const double w = std::max(k.cwiseAbs().maxCoeff(), 1e-300);
  const Mat6 ks = k / w;
  const Mat6 ns = n / w;

  Eigen::Matrix<double, 36, 36> kron = Eigen::Matrix<double, 36, 36>::Zero();
  // vec() is column-major: vec(K V) = (I (x) K) vec(V),
  //                        vec(V K^T) = (K (x) I) vec(V).
  for (int bi = 0; bi < 6; ++bi) {
    kron.block<6, 6>(6 * bi, 6 * bi) += ks;  // I (x) K
    for (int bj = 0; bj < 6; ++bj)
      kron.block<6, 6>(6 * bi, 6 * bj) +=
          ks(bi, bj) * Mat6::Identity();  // K (x) I
  }
  Eigen::Matrix<double, 36, 1> rhs;
  for (int col = 0; col < 6; ++col)
    for (int row = 0; row < 6; ++row) rhs[6 * col + row] = -ns(row, col);

  Eigen::PartialPivLU<Eigen::Matrix<double, 36, 36>> lu(kron);
  const Eigen::Matrix<double, 36, 1> x = lu.solve(rhs);
  const double resid = (kron * x - rhs).norm();
  if (!x.allFinite() || resid > 1e-8 * rhs.norm())
    throw SingularSystem("Lyapunov system numerically singular");

  Eigen::MatrixXd v(6, 6);
  for (int col = 0; col < 6; ++col)
    for (int row = 0; row < 6; ++row) v(row, col) = x[6 * col + row];
  v = 0.5 * (v + v.transpose()).eval();  // symmetrize roundoff
  return CovarianceMatrix{v, {Mode::A, Mode::B, Mode::M}};
}

// Relative residual of a candidate steady state, ||KV+VK^T+N||_F / ||N||_F.
inline double lyapunov_residual(const DriftMatrix& k, const NoiseMatrix& n,
                                const Eigen::MatrixXd& v) {
  return (k * v + v * k.transpose() + n).norm() / n.norm();
}

}  // namespace optomech
