#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "optomech/dynamics.hpp"
#include "optomech/params.hpp"

namespace om = optomech;
using Catch::Approx;

namespace {

int count_nonzero(const om::Mat6& m) {
  int n = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (m(i, j) != 0.0) ++n;
  return n;
}

// Exact determinant of an integer matrix by cofactor expansion.
long long int_det(const std::vector<std::vector<long long>>& m) {
  const int n = static_cast<int>(m.size());
  if (n == 1) return m[0][0];
  long long acc = 0;
  for (int col = 0; col < n; ++col) {
    if (m[0][col] == 0) continue;
    std::vector<std::vector<long long>> minor(n - 1,
                                              std::vector<long long>(n - 1));
    for (int i = 1; i < n; ++i) {
      int jj = 0;
      for (int j = 0; j < n; ++j) {
        if (j == col) continue;
        minor[i - 1][jj++] = m[i][j];
      }
    }
    const long long term = m[0][col] * int_det(minor);
    acc += (col % 2 == 0) ? term : -term;
  }
  return acc;
}

// det(xI - K) for an integer matrix K at integer x, exactly.
long long char_poly_at(const Eigen::Matrix<long long, 6, 6>& k, long long x) {
  std::vector<std::vector<long long>> m(6, std::vector<long long>(6));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) m[i][j] = (i == j ? x : 0) - k(i, j);
  return int_det(m);
}

std::vector<double> brute_force_fixed_points(const om::detail::StaticForce& f) {
  const double bound = 1.1 * std::max(f.bound(), 1e-30);
  const auto h = [&](double q) { return q - f(q); };
  const int n = 40001;
  std::vector<double> roots;
  double prev_q = -bound;
  double prev_h = h(prev_q);
  for (int i = 1; i < n; ++i) {
    const double q = -bound + 2.0 * bound * i / (n - 1);
    const double hv = h(q);
    if (prev_h * hv < 0.0) {
      double lo = prev_q, hi = q;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (h(lo) * h(mid) <= 0.0)
          hi = mid;
        else
          lo = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    } else if (hv == 0.0) {
      roots.push_back(q);
    }
    prev_q = q;
    prev_h = hv;
  }
  return roots;
}

}  // namespace

TEST_CASE("derived single-photon rate and thermal occupancy") {
  const om::SystemParams p = testutil::lab_params();
  const om::DerivedQuantities d = om::derive(p);
  // g0 = (omega_l / L) sqrt(hbar / (m omega_m)) with the laser at
  // 2pi*3.7e14 rad/s, L = 1 mm, m = 5 ng, omega_m = 2pi*10 MHz.
  CHECK(d.g0.a == Approx(1346.9291020534058).epsilon(1e-13));
  CHECK(d.g0.b == Approx(d.g0.a).epsilon(1e-13));  // identical geometry
  CHECK(d.g0.a == Approx(1.35e3).epsilon(0.01));
  // nbar = 1/expm1(hbar omega_m / kB T) at T = 0.4 K.
  CHECK(d.nbar == Approx(832.9648654280111).epsilon(1e-13));
  CHECK(d.nbar == Approx(8.3e2).epsilon(0.01));
}

TEST_CASE("derived drive amplitude, stationary amplitude and coupling") {
  // Formula probes at a wide-linewidth point: kappa = 2pi * 88 MHz,
  // P_a = 50 mW, Delta_a = omega_m.
  om::SystemParams p = testutil::lab_params();
  p.cavity_a.kappa = p.cavity_b.kappa = om::two_pi * 8.8e7;
  const om::DerivedQuantities d = om::derive(p);
  CHECK(d.drive_amp.a == Approx(15017664355850.291).epsilon(1e-13));
  CHECK(d.drive_amp.a == Approx(1.50e13).epsilon(0.005));
  CHECK(d.alpha_s.a == Approx(26986.945548706037).epsilon(1e-13));
  CHECK(d.alpha_s.a == Approx(2.7e4).epsilon(0.01));
  CHECK(d.g_eff.a == Approx(51405959.18778656).epsilon(1e-13));
  CHECK(d.g_eff.a == Approx(5.1e7).epsilon(0.01));

  // Same probes at the narrow-linewidth point actually shipped in
  // configs/lab.json (kappa = 8.8e7 rad/s).
  const om::DerivedQuantities ds = om::derive(testutil::lab_params());
  CHECK(ds.drive_amp.a == Approx(5991181264426.227).epsilon(1e-13));
  CHECK(ds.alpha_s.a == Approx(55407.81128177122).epsilon(1e-13));
  CHECK(ds.g_eff.a == Approx(105543314.64799209).epsilon(1e-13));
}

TEST_CASE("derived quantities scale correctly with power") {
  om::SystemParams p = testutil::lab_params();
  const om::DerivedQuantities d1 = om::derive(p);
  p.cavity_a.power *= 2.0;
  p.cavity_b.power *= 2.0;
  const om::DerivedQuantities d2 = om::derive(p);
  const double r = std::sqrt(2.0);
  CHECK(d2.drive_amp.a == Approx(r * d1.drive_amp.a).epsilon(1e-13));
  CHECK(d2.alpha_s.a == Approx(r * d1.alpha_s.a).epsilon(1e-13));
  CHECK(d2.alpha_s.b == Approx(r * d1.alpha_s.b).epsilon(1e-13));
  CHECK(d2.g_eff.a == Approx(r * d1.g_eff.a).epsilon(1e-13));
  CHECK(d2.g_eff.b == Approx(r * d1.g_eff.b).epsilon(1e-13));
  CHECK(d2.g0.a == d1.g0.a);      // geometry only
  CHECK(d2.nbar == d1.nbar);      // bath only
  CHECK(d2.q_s == Approx(2.0 * d1.q_s).epsilon(1e-13));
}

TEST_CASE("stationary displacement combines the two cavities with signs") {
  const om::SystemParams p = testutil::lab_params();
  const om::DerivedQuantities d = om::derive(p);
  const double expected = (d.g0.a * d.alpha_s.a * d.alpha_s.a -
                           d.g0.b * d.alpha_s.b * d.alpha_s.b) /
                          p.mirror.omega_m;
  CHECK(d.q_s == Approx(expected).epsilon(1e-14));

  // At zero detuning alpha = |E|/kappa exactly.
  om::SystemParams z = p;
  z.cavity_a.detuning_effective = 0.0;
  const om::DerivedQuantities dz = om::derive(z);
  CHECK(dz.alpha_s.a ==
        Approx(dz.drive_amp.a / z.cavity_a.kappa).epsilon(1e-14));
  CHECK(dz.alpha_s.a > d.alpha_s.a);  // detuning only reduces the amplitude
}

TEST_CASE("zero temperature gives an exactly empty bath") {
  om::SystemParams p = testutil::lab_params();
  p.mirror.temperature = 0.0;
  CHECK(om::derive(p).nbar == 0.0);
  const om::NoiseMatrix n = om::build_noise(om::derive(p), p);
  CHECK(n(5, 5) == p.mirror.gamma_m);
}

TEST_CASE("parameter validation rejects unphysical inputs") {
  const om::SystemParams good = testutil::lab_params();
  CHECK(good.validate().empty());  // high-Q mirror: no warnings

  om::SystemParams p = good;
  p.cavity_a.kappa = 0.0;
  CHECK_THROWS_AS(p.validate(), om::ConfigError);
  p = good;
  p.cavity_b.power = -1e-3;
  CHECK_THROWS_AS(p.validate(), om::ConfigError);
  p = good;
  p.mirror.temperature = -0.1;
  CHECK_THROWS_AS(p.validate(), om::ConfigError);
  p = good;
  p.mirror.mass = 0.0;
  CHECK_THROWS_AS(p.validate(), om::ConfigError);
  p = good;
  p.cavity_a.length = -1.0;
  CHECK_THROWS_AS(p.validate(), om::ConfigError);

  p = good;
  p.mirror.gamma_m = 0.1 * p.mirror.omega_m;  // low-Q: soft warning
  CHECK_FALSE(p.validate().empty());
}

TEST_CASE("drift kernel has the documented sparsity and entries") {
  const om::SystemParams p = testutil::lab_params();
  const om::DerivedQuantities d = om::derive(p);
  const om::DriftMatrix k = om::build_drift(d, p);

  CHECK(count_nonzero(k) == 15);

  const double ka = p.cavity_a.kappa, kb = p.cavity_b.kappa;
  const double da = p.cavity_a.detuning_effective;
  const double db = p.cavity_b.detuning_effective;
  CHECK(k(0, 0) == -ka);
  CHECK(k(0, 1) == da);
  CHECK(k(1, 0) == -da);
  CHECK(k(1, 1) == -ka);
  CHECK(k(1, 4) == d.g_eff.a);
  CHECK(k(2, 2) == -kb);
  CHECK(k(2, 3) == db);
  CHECK(k(3, 2) == -db);
  CHECK(k(3, 3) == -kb);
  CHECK(k(3, 4) == -d.g_eff.b);  // mirror orientation flips the B coupling
  CHECK(k(4, 5) == p.mirror.omega_m);
  CHECK(k(5, 0) == d.g_eff.a);
  CHECK(k(5, 2) == -d.g_eff.b);
  CHECK(k(5, 4) == -p.mirror.omega_m);
  CHECK(k(5, 5) == -p.mirror.gamma_m);
  CHECK(k(4, 4) == 0.0);  // position row carries no damping
  CHECK(k(0, 2) == 0.0);  // the cavities couple only through the mirror
  CHECK(k(1, 5) == 0.0);  // fields see the position, not the momentum

  const om::DriftMatrix raw = om::build_drift_raw(
      p.mirror.omega_m, p.mirror.gamma_m, ka, kb, d.g_eff.a, d.g_eff.b, da, db);
  CHECK((k - raw).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("undriven cavities decouple from the mirror") {
  om::SystemParams p = testutil::lab_params();
  p.cavity_a.power = 0.0;
  p.cavity_b.power = 0.0;
  const om::DerivedQuantities d = om::derive(p);
  CHECK(d.g_eff.a == 0.0);
  CHECK(d.g_eff.b == 0.0);
  const om::DriftMatrix k = om::build_drift(d, p);
  CHECK(count_nonzero(k) == 11);
  CHECK(k.block<4, 2>(0, 4).cwiseAbs().maxCoeff() == 0.0);
  CHECK(k.block<2, 4>(4, 0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("diffusion matrix is diagonal with the documented entries") {
  const om::SystemParams p = testutil::lab_params();
  const om::DerivedQuantities d = om::derive(p);
  const om::NoiseMatrix n = om::build_noise(d, p);
  CHECK((n - om::NoiseMatrix(n.diagonal().asDiagonal())).norm() == 0.0);
  CHECK(n(0, 0) == p.cavity_a.kappa);
  CHECK(n(1, 1) == p.cavity_a.kappa);
  CHECK(n(2, 2) == p.cavity_b.kappa);
  CHECK(n(3, 3) == p.cavity_b.kappa);
  CHECK(n(4, 4) == 0.0);
  CHECK(n(5, 5) ==
        Approx(p.mirror.gamma_m * (2.0 * d.nbar + 1.0)).epsilon(1e-14));
  CHECK(n(5, 5) == Approx(om::two_pi * 100.0 * (2.0 * 832.9648654280111 + 1.0))
                       .epsilon(1e-12));
  const om::NoiseMatrix raw = om::build_noise_raw(
      p.cavity_a.kappa, p.cavity_b.kappa, p.mirror.gamma_m, d.nbar);
  CHECK((n - raw).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("characteristic polynomial on hand-expanded examples") {
  // K = -I: (lambda + 1)^6.
  const auto c1 = om::characteristic_polynomial(-om::Mat6::Identity());
  const std::array<double, 7> binom{1, 6, 15, 20, 15, 6, 1};
  for (int i = 0; i <= 6; ++i) CHECK(c1[i] == Approx(binom[i]).margin(1e-12));

  // [[0,1],[-2,-3]] (+) -I4: (lambda+1)^5 (lambda+2).
  om::Mat6 k = -om::Mat6::Identity();
  k(0, 0) = 0.0;
  k(0, 1) = 1.0;
  k(1, 0) = -2.0;
  k(1, 1) = -3.0;
  const auto c2 = om::characteristic_polynomial(k);
  const std::array<double, 7> expanded{2, 11, 25, 30, 20, 7, 1};
  for (int i = 0; i <= 6; ++i)
    CHECK(c2[i] == Approx(expanded[i]).margin(1e-12));
}

TEST_CASE("characteristic polynomial invariants on random matrices") {
  std::mt19937_64 gen(41);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    om::Mat6 k;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) k(i, j) = normal(gen);
    const auto c = om::characteristic_polynomial(k);
    CHECK(c[6] == 1.0);
    CHECK(c[5] == Approx(-k.trace()).margin(1e-12));
    CHECK(c[0] == Approx(k.determinant()).margin(1e-10));
  }
}

TEST_CASE("characteristic polynomial matches exact integer evaluation") {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int> entry(-3, 3);
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::Matrix<long long, 6, 6> ki;
    om::Mat6 kd;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        ki(i, j) = entry(gen);
        kd(i, j) = static_cast<double>(ki(i, j));
      }
    const auto c = om::characteristic_polynomial(kd);
    // Round to the exact integer coefficients and check that they reproduce
    // det(xI - K) at seven points; seven agreements pin a degree-6
    // polynomial uniquely.
    std::array<long long, 7> ci{};
    for (int i = 0; i <= 6; ++i) {
      ci[i] = std::llround(c[i]);
      REQUIRE(std::abs(c[i] - static_cast<double>(ci[i])) < 1e-6);
    }
    for (long long x = 0; x <= 6; ++x) {
      long long horner = 0;
      for (int i = 6; i >= 0; --i) horner = horner * x + ci[i];
      REQUIRE(horner == char_poly_at(ki, x));
    }
  }
}

TEST_CASE("Routh-Hurwitz verdict on hand-built polynomials") {
  // (lambda + 1)^6: Hurwitz stable.
  const std::array<double, 7> stable{1, 6, 15, 20, 15, 6, 1};
  const om::StabilityReport rs = om::routh_hurwitz(stable);
  CHECK(rs.rh_stable);
  for (double m : rs.hurwitz_minors) CHECK(m > 0.0);

  // (lambda + 1)^5 (lambda - 2): a real root in the right half-plane.
  const std::array<double, 7> unstable{-2, -9, -15, -10, 0, 3, 1};
  CHECK_FALSE(om::routh_hurwitz(unstable).rh_stable);

  // NaN coefficients are rejected rather than folded into a verdict.
  std::array<double, 7> bad = stable;
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(om::routh_hurwitz(bad), om::DegenerateInput);
}

TEST_CASE("minors catch oscillatory instability that coefficients miss") {
  // Block diag([[0.05, 1], [-1, 0.05]], -I4): eigenvalues 0.05 +- i give an
  // unstable polynomial whose coefficients are nonetheless all positive.
  om::Mat6 k = -om::Mat6::Identity();
  k(0, 0) = 0.05;
  k(0, 1) = 1.0;
  k(1, 0) = -1.0;
  k(1, 1) = 0.05;
  const auto c = om::characteristic_polynomial(k);
  for (int i = 0; i < 6; ++i) REQUIRE(c[i] > 0.0);
  const om::StabilityReport r = om::stability(k, 1e-9);
  CHECK_FALSE(r.rh_stable);
  CHECK_FALSE(r.stable);
  CHECK(r.margin == Approx(-0.05).epsilon(1e-9));
}

TEST_CASE("stability report at physical operating points") {
  const om::SystemParams p = testutil::lab_params();
  const om::StabilityReport r = om::stability_at(p);
  CHECK(r.stable);
  CHECK(r.rh_stable);
  CHECK(r.margin > 0.0);
  CHECK(r.margin == -r.eigen_margins[0]);
  for (int i = 0; i + 1 < 6; ++i)
    CHECK(r.eigen_margins[i] >= r.eigen_margins[i + 1]);
  CHECK(r.c1() == r.hurwitz_minors[4]);
  CHECK(r.c2() == r.hurwitz_minors[5]);

  // Undriven system: slowest pole is the mechanical ring-down at gamma_m/2.
  om::SystemParams q = p;
  q.cavity_a.power = q.cavity_b.power = 0.0;
  const om::StabilityReport rq = om::stability_at(q);
  CHECK(rq.stable);
  CHECK(rq.margin == Approx(p.mirror.gamma_m / 2.0).epsilon(1e-6));

  // Undamped undriven mirror: marginal counts as unstable.
  const om::DriftMatrix km =
      om::build_drift_raw(1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0, -0.5);
  CHECK_FALSE(om::stability(km, 1e-9).stable);
}

TEST_CASE("Routh-Hurwitz agrees with the eigenvalue verdict") {
  std::mt19937_64 gen(2024);
  std::normal_distribution<double> normal(0.0, 1.0);
  int decided = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    om::Mat6 k;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) k(i, j) = normal(gen);
    const om::StabilityReport r = om::stability(k, 0.0);
    if (std::abs(r.eigen_margins[0]) <= 1e-6 * k.norm()) continue;
    ++decided;
    REQUIRE(r.stable == r.rh_stable);
  }
  CHECK(decided > 900);  // the marginal filter should discard almost nothing
}

TEST_CASE("fixed points: undriven system sits at the origin") {
  om::SystemParams p = testutil::lab_params();
  p.cavity_a.power = 0.0;
  p.cavity_b.power = 0.0;
  const auto ops = om::solve_operating_point(p, p.mirror.omega_m,
                                             -0.5 * p.mirror.omega_m);
  REQUIRE(ops.size() == 1);
  CHECK(ops[0].alpha_a == 0.0);
  CHECK(ops[0].alpha_b == 0.0);
  CHECK(std::abs(ops[0].q_s) < 1e-20);
  CHECK(ops[0].delta_a == Approx(p.mirror.omega_m).epsilon(1e-12));
  CHECK(ops[0].delta_b == Approx(-0.5 * p.mirror.omega_m).epsilon(1e-12));
  CHECK(ops[0].stable);
}

TEST_CASE("fixed points: a heavy mirror barely shifts the detuning") {
  om::SystemParams p = testutil::lab_params();
  p.mirror.mass *= 1e12;  // g0 ~ 1/sqrt(mass) -> negligible back-action
  const double d0a = p.mirror.omega_m, d0b = -0.5 * p.mirror.omega_m;
  const auto ops = om::solve_operating_point(p, d0a, d0b);
  REQUIRE(ops.size() == 1);
  CHECK(ops[0].delta_a == Approx(d0a).epsilon(1e-9));
  CHECK(ops[0].delta_b == Approx(d0b).epsilon(1e-9));
  // With the detuning shift g0 q_s negligible, the displacement collapses
  // to the open-loop value F(0) evaluated at the nominal detunings.
  om::SystemParams q = p;
  q.cavity_a.detuning_effective = d0a;
  q.cavity_b.detuning_effective = d0b;
  CHECK(ops[0].q_s == Approx(om::derive(q).q_s).epsilon(1e-6));
}

TEST_CASE("fixed points match a brute-force bracketing scan") {
  const om::SystemParams p = testutil::lab_params();
  const double wm = p.mirror.omega_m;
  const std::array<double, 4> d0a_list{1.0 * wm, 0.5 * wm, -1.0 * wm, 0.0};
  const std::array<double, 3> d0b_list{-0.5 * wm, 1.0 * wm, 2.0 * wm};
  for (double d0a : d0a_list) {
    for (double d0b : d0b_list) {
      const om::detail::StaticForce f(p, d0a, d0b);
      const std::vector<double> expected = brute_force_fixed_points(f);
      const auto ops = om::solve_operating_point(p, d0a, d0b);
      REQUIRE(ops.size() == expected.size());
      REQUIRE(ops.size() >= 1);
      REQUIRE(ops.size() <= 3);  // static bistability tops out at 3 branches
      const double scale = std::max(f.bound(), 1e-30);
      for (std::size_t i = 0; i < ops.size(); ++i) {
        CHECK(std::abs(ops[i].q_s - expected[i]) < 1e-6 * scale);
        // Residual of the scalar fixed-point equation.
        CHECK(std::abs(ops[i].q_s - f(ops[i].q_s)) < 1e-8 * scale);
        // Reported detunings/amplitudes are the consistent per-root values.
        CHECK(ops[i].delta_a == Approx(f.delta_a(ops[i].q_s)).margin(1e-9));
        CHECK(ops[i].delta_b == Approx(f.delta_b(ops[i].q_s)).margin(1e-9));
        CHECK(ops[i].alpha_a ==
              Approx(std::sqrt(f.alpha2_a(ops[i].q_s))).epsilon(1e-9));
        CHECK(ops[i].alpha_b ==
              Approx(std::sqrt(f.alpha2_b(ops[i].q_s))).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("fixed points re-derive consistently") {
  const om::SystemParams p = testutil::lab_params();
  const double d0a = p.mirror.omega_m, d0b = -0.5 * p.mirror.omega_m;
  const auto ops = om::solve_operating_point(p, d0a, d0b);
  REQUIRE(!ops.empty());
  for (const auto& op : ops) {
    om::SystemParams q = p;
    q.cavity_a.detuning_effective = op.delta_a;
    q.cavity_b.detuning_effective = op.delta_b;
    const om::DerivedQuantities d = om::derive(q);
    CHECK(d.alpha_s.a == Approx(op.alpha_a).epsilon(1e-9));
    CHECK(d.alpha_s.b == Approx(op.alpha_b).epsilon(1e-9));
    CHECK(d.q_s == Approx(op.q_s).margin(1e-8 * std::abs(op.q_s) + 1e-20));
    CHECK(op.stable == om::stability_at(q).stable);
  }
}
