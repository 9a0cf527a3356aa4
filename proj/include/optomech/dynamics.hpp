#pragma once

// Linearized quantum Langevin dynamics of the quadrature fluctuation vector
// f = (x_a, y_a, x_b, y_b, q, p):
//
//     df = K f dt + noise,
//
// with the 6x6 drift kernel
//
//          [ -kappa_a   Delta_a      0         0        0        0    ]
//          [ -Delta_a  -kappa_a      0         0       G_a       0    ]
//     K =  [    0          0     -kappa_b   Delta_b     0        0    ]
//          [    0          0     -Delta_b  -kappa_b   -G_b       0    ]
//          [    0          0         0         0        0     omega_m ]
//          [   G_a         0       -G_b       0     -omega_m -gamma_m ]
//
// (15 structurally nonzero entries) and the diagonal diffusion matrix
// N = diag(kappa_a, kappa_a, kappa_b, kappa_b, 0, gamma_m (2 nbar + 1))
// in the vacuum-variance-1/2 convention. The relative sign of the G_b
// column reflects the shared mirror sitting between the two cavities.
//
// Stability is decided two ways: a Routh-Hurwitz table on the monic
// characteristic polynomial (exactly equivalent in exact arithmetic) and a
// direct eigenvalue margin, which is the authoritative verdict.

#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "optomech/core.hpp"
#include "optomech/params.hpp"

namespace optomech {

using DriftMatrix = Mat6;
using NoiseMatrix = Mat6;

inline DriftMatrix build_drift(const DerivedQuantities& d,
                               const SystemParams& p) {
  const double ka = p.cavity_a.kappa, kb = p.cavity_b.kappa;
  const double da = p.cavity_a.detuning_effective;
  const double db = p.cavity_b.detuning_effective;
  const double ga = d.g_eff.a, gb = d.g_eff.b;
  const double wm = p.mirror.omega_m, gm = p.mirror.gamma_m;
  DriftMatrix k = DriftMatrix::Zero();
  k(0, 0) = -ka;
  k(0, 1) = da;
  k(1, 0) = -da;
  k(1, 1) = -ka;
  k(1, 4) = ga;
  k(2, 2) = -kb;
  k(2, 3) = db;
  k(3, 2) = -db;
  k(3, 3) = -kb;
  k(3, 4) = -gb;
  k(4, 5) = wm;
  k(5, 0) = ga;
  k(5, 2) = -gb;
  k(5, 4) = -wm;
  k(5, 5) = -gm;
  return k;
}

// Convenience builder for arbitrary (already linearized) rates, used by the
// desk-scale stochastic oracle and by tests.
inline DriftMatrix build_drift_raw(double omega_m, double gamma_m,
                                   double kappa_a, double kappa_b, double g_a,
                                   double g_b, double delta_a,
                                   double delta_b) {
  DriftMatrix k = DriftMatrix::Zero();
  k(0, 0) = -kappa_a;
  k(0, 1) = delta_a;
  k(1, 0) = -delta_a;
  k(1, 1) = -kappa_a;
  k(1, 4) = g_a;
  k(2, 2) = -kappa_b;
  k(2, 3) = delta_b;
  k(3, 2) = -delta_b;
  k(3, 3) = -kappa_b;
  k(3, 4) = -g_b;
  k(4, 5) = omega_m;
  k(5, 0) = g_a;
  k(5, 2) = -g_b;
  k(5, 4) = -omega_m;
  k(5, 5) = -gamma_m;
  return k;
}

inline NoiseMatrix build_noise(const DerivedQuantities& d,
                               const SystemParams& p) {
  NoiseMatrix n = NoiseMatrix::Zero();
  n(0, 0) = n(1, 1) = p.cavity_a.kappa;
  n(2, 2) = n(3, 3) = p.cavity_b.kappa;
  n(4, 4) = 0.0;  // position row: the thermal bath drives only the momentum
  n(5, 5) = p.mirror.gamma_m * (2.0 * d.nbar + 1.0);
  return n;
}

inline NoiseMatrix build_noise_raw(double kappa_a, double kappa_b,
                                   double gamma_m, double nbar) {
  NoiseMatrix n = NoiseMatrix::Zero();
  n(0, 0) = n(1, 1) = kappa_a;
  n(2, 2) = n(3, 3) = kappa_b;
  n(5, 5) = gamma_m * (2.0 * nbar + 1.0);
  return n;
}

// Monic characteristic polynomial of a 6x6 matrix by the Faddeev-LeVerrier
// recursion. coeffs[k] multiplies lambda^k; coeffs[6] = 1.
inline std::array<double, 7> characteristic_polynomial(const Mat6& k) {
  std::array<double, 7> c{};
  c[6] = 1.0;
  Mat6 m = Mat6::Zero();
  for (int step = 1; step <= 6; ++step) {
    m = k * m + c[6 - step + 1] * Mat6::Identity();
    c[6 - step] = -(k * m).trace() / step;
  }
  return c;
}

struct StabilityReport {
  std::array<double, 7> char_poly{};       // monic, char_poly[6] = 1
  std::array<double, 6> hurwitz_minors{};  // leading minors D1..D6 (scaled)
  std::array<double, 6> eigen_margins{};   // Re(lambda), sorted descending
  double margin = 0.0;                     // -max Re(lambda), rad/s
  bool stable = false;                     // eigenvalue verdict (authoritative)
  bool rh_stable = false;                  // Routh-Hurwitz verdict

  // The two highest-order Hurwitz minors, exposed by the sweep outputs as
  // the stability functions C1 and C2 (a labeling of ours, not canonical):
  // C1 = D5 detects oscillatory (Hopf-type) roots, C2 = a6*D5 additionally
  // carries the static, zero-frequency condition sign(det K).
  double c1() const { return hurwitz_minors[4]; }
  double c2() const { return hurwitz_minors[5]; }
};

namespace detail {

// Hurwitz leading minors of a monic degree-6 polynomial. To keep the
// determinants O(1) regardless of the rate scale, coefficients are first
// nondimensionalized by a_k -> a_k / s^k with s a characteristic frequency;
// all minor signs (hence the verdict) are invariant under this scaling.
inline std::array<double, 6> hurwitz_minors_scaled(
    const std::array<double, 7>& coeffs, double scale) {
  // a[i] in descending-power convention: a[0] = 1 (lambda^6), a[i] = c[6-i].
  std::array<double, 7> a{};
  for (int i = 0; i <= 6; ++i)
    a[i] = coeffs[6 - i] / std::pow(scale, static_cast<double>(i));
  Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      const int k = 2 * (i + 1) - (j + 1);
      if (k >= 0 && k <= 6) h(i, j) = a[k];
    }
  }
  std::array<double, 6> minors{};
  for (int m = 1; m <= 6; ++m)
    minors[m - 1] = h.topLeftCorner(m, m).determinant();
  return minors;
}

inline double coefficient_scale(const std::array<double, 7>& coeffs) {
  double s = 0.0;
  for (int k = 0; k < 6; ++k) {
    const double mag = std::abs(coeffs[k]);
    if (mag > 0.0)
      s = std::max(s, std::pow(mag, 1.0 / static_cast<double>(6 - k)));
  }
  return s > 0.0 ? s : 1.0;
}

}  // namespace detail

// Routh-Hurwitz analysis of a monic degree-6 polynomial: leading principal
// minors of the Hurwitz matrix plus the verdict "all coefficients positive
// and all minors positive" (necessary and sufficient for a Hurwitz-stable
// polynomial). Fills only the polynomial/minor part of the report.
inline StabilityReport routh_hurwitz(const std::array<double, 7>& coeffs) {
  for (double c : coeffs)
    if (std::isnan(c))
      throw DegenerateInput("characteristic polynomial has NaN coefficient");
  StabilityReport r;
  r.char_poly = coeffs;
  const double s = detail::coefficient_scale(coeffs);
  r.hurwitz_minors = detail::hurwitz_minors_scaled(coeffs, s);
  bool ok = true;
  for (int k = 0; k < 6; ++k)
    if (coeffs[k] <= 0.0) ok = false;  // monic: positivity of a1..a6
  for (double m : r.hurwitz_minors)
    if (m <= 0.0) ok = false;
  r.rh_stable = ok;
  return r;
}

// Full stability report: eigenvalue margins (authoritative verdict, with
// eps_stab as the marginal-case tolerance; marginal counts as unstable)
// combined with the Routh-Hurwitz table.
inline StabilityReport stability(const Mat6& k, double eps_stab) {
  StabilityReport r = routh_hurwitz(characteristic_polynomial(k));
  Eigen::EigenSolver<Mat6> solver(k, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw EigenFailure("eigensolver failed on drift matrix");
  Eigen::Matrix<double, 6, 1> re = solver.eigenvalues().real();
  std::sort(re.data(), re.data() + 6, std::greater<double>());
  for (int i = 0; i < 6; ++i) r.eigen_margins[i] = re[i];
  r.margin = -re[0];
  r.stable = re[0] < -eps_stab;
  return r;
}

// Default stability tolerance for a physical system: 1e-9 * omega_m.
inline double eps_stab_for(const SystemParams& p) {
  return 1e-9 * p.mirror.omega_m;
}

inline StabilityReport stability_at(const SystemParams& p) {
  const DerivedQuantities d = derive(p);
  return stability(build_drift(d, p), eps_stab_for(p));
}

// ---------------------------------------------------------------------------
// Classical fixed points for nominal detunings (declared in params.hpp).

inline std::vector<OperatingPoint> solve_operating_point(
    const SystemParams& params, double delta0_a, double delta0_b) {
  const detail::StaticForce f(params, delta0_a, delta0_b);
  const double bound = f.bound();
  const double span = std::max(bound, 1e-30);
  const double q_lo = -1.1 * span, q_hi = 1.1 * span;
  const double q_scale = std::max(1.1 * span, 1e-12);

  const auto h = [&](double q) { return q - f(q); };
  const auto h_prime = [&](double q) {
    const double dq = 1e-7 * q_scale + 1e-300;
    return (h(q + dq) - h(q - dq)) / (2.0 * dq);
  };

  std::vector<double> roots;
  const int seeds = 257;
  bool any_converged = false;
  for (int i = 0; i < seeds; ++i) {
    double q = q_lo + (q_hi - q_lo) * i / (seeds - 1);
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
      const double val = h(q);
      if (std::abs(val) < 1e-12 * q_scale) {
        converged = true;
        break;
      }
      const double dp = h_prime(q);
      if (dp == 0.0 || !std::isfinite(dp)) break;
      double step = -val / dp;
      // Damping: halve the step until |h| decreases (or give up the seed).
      double lambda = 1.0;
      bool improved = false;
      for (int back = 0; back < 40; ++back) {
        const double trial = q + lambda * step;
        if (std::abs(h(trial)) < std::abs(val)) {
          q = trial;
          improved = true;
          break;
        }
        lambda *= 0.5;
      }
      if (!improved) break;
    }
    if (!converged) continue;
    any_converged = true;
    bool duplicate = false;
    for (double r : roots)
      if (std::abs(r - q) <= 1e-9 * std::max(std::abs(r), q_scale))
        duplicate = true;
    if (!duplicate) roots.push_back(q);
  }
  if (!any_converged)
    throw NoConvergence("no fixed point found for the nominal detunings");
  std::sort(roots.begin(), roots.end());

  std::vector<OperatingPoint> out;
  out.reserve(roots.size());
  for (double q : roots) {
    OperatingPoint op;
    op.q_s = q;
    op.delta_a = f.delta_a(q);
    op.delta_b = f.delta_b(q);
    op.alpha_a = std::sqrt(f.alpha2_a(q));
    op.alpha_b = std::sqrt(f.alpha2_b(q));
    SystemParams at = params;
    at.cavity_a.detuning_effective = op.delta_a;
    at.cavity_b.detuning_effective = op.delta_b;
    op.stable = stability_at(at).stable;
    out.push_back(op);
  }
  return out;
}

}  // namespace optomech
