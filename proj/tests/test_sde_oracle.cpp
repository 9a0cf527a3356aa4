#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "optomech/config.hpp"
#include "optomech/dynamics.hpp"
#include "optomech/sde_oracle.hpp"
#include "optomech/steady_state.hpp"

namespace om = optomech;
using Catch::Approx;

namespace {

// Exact stationary covariance of the Euler-Maruyama chain itself:
// V = A V A^T + dt N with A = I + dt K, solved by vectorization. The
// ensemble average must match THIS matrix (up to Monte Carlo error); it
// differs from the continuous-time solution by the O(dt) scheme bias.
Eigen::MatrixXd discrete_stationary(const Eigen::MatrixXd& k,
                                    const Eigen::MatrixXd& n, double dt) {
  const int d = static_cast<int>(k.rows());
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(d, d) + dt * k;
  const int dd = d * d;
  Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(dd, dd);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      sys.block(i * d, j * d, d, d) -= a(i, j) * a;  // I - A (x) A
  Eigen::VectorXd rhs(dd);
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < d; ++r) rhs[c * d + r] = dt * n(r, c);
  const Eigen::VectorXd x = sys.partialPivLu().solve(rhs);
  Eigen::MatrixXd v(d, d);
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < d; ++r) v(r, c) = x[c * d + r];
  return 0.5 * (v + v.transpose());
}

}  // namespace

TEST_CASE("decoupled cavity relaxes to the vacuum state") {
  Eigen::MatrixXd k(2, 2), n(2, 2);
  k << -1.0, 0.7, -0.7, -1.0;  // desk units: kappa = 1, Delta = 0.7
  n = Eigen::MatrixXd::Identity(2, 2);

  om::IntegratorConfig cfg;
  cfg.dt = 0.01;
  cfg.t_total = 300.0;
  cfg.burn_in = 15.0;
  cfg.n_trajectories = 64;
  cfg.seed = 2024;
  const om::EnsembleResult r = om::integrate_ensemble(k, n, cfg);

  // Sharp check against the exact stationary point of the discrete chain,
  // loose check against the continuous-time vacuum (1/2) I.
  const Eigen::MatrixXd vd = discrete_stationary(k, n, cfg.dt);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(r.v(i, j) - vd(i, j)) < 5.0 * r.stderr_(i, j) + 1e-4);
  const Eigen::MatrixXd vc = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  CHECK((r.v - vc).norm() / vc.norm() <
        std::max(0.02, 4.0 * om::frobenius_stderr(r, vc)));
  CHECK(r.n_trajectories == 64);
  CHECK(r.n_samples == 64LL * 30000LL);
}

TEST_CASE("decoupled mirror thermalizes to nbar + 1/2") {
  const double wm = 1.0, gm = 0.05, nbar = 2.0;
  Eigen::MatrixXd k(2, 2), n(2, 2);
  k << 0.0, wm, -wm, -gm;
  n << 0.0, 0.0, 0.0, gm * (2.0 * nbar + 1.0);

  om::IntegratorConfig cfg;
  cfg.dt = 0.0025;
  cfg.t_total = 700.0;
  cfg.burn_in = 420.0;  // margin = gamma_m / 2 = 0.025
  cfg.n_trajectories = 24;
  cfg.seed = 5;
  const om::EnsembleResult r = om::integrate_ensemble(k, n, cfg);

  const Eigen::MatrixXd vd = discrete_stationary(k, n, cfg.dt);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(r.v(i, j) - vd(i, j)) < 5.0 * r.stderr_(i, j) + 1e-3);

  // The weakly damped oscillator is where the explicit scheme's energy
  // inflation bites hardest; at this dt the exact chain bias stays small.
  const Eigen::MatrixXd vc = (nbar + 0.5) * Eigen::MatrixXd::Identity(2, 2);
  CHECK((vd - vc).norm() / vc.norm() < 0.08);
  CHECK((r.v - vc).norm() / vc.norm() <
        std::max(0.10, 4.0 * om::frobenius_stderr(r, vc)));
}

TEST_CASE("one-mode process matches the exact discrete-time variance") {
  const double kappa = 1.8, noise = 1.3, dt = 0.05;
  Eigen::MatrixXd k(1, 1), n(1, 1);
  k << -kappa;
  n << noise;

  om::IntegratorConfig cfg;
  cfg.dt = dt;
  cfg.t_total = 1200.0;
  cfg.burn_in = 8.0;
  cfg.n_trajectories = 48;
  cfg.seed = 31;
  const om::EnsembleResult r = om::integrate_ensemble(k, n, cfg);

  // Hand-derived stationary variance of the scalar chain
  // f' = (1 - kappa dt) f + sqrt(noise dt) w:  N / (kappa (2 - kappa dt)).
  const double v_disc = noise / (kappa * (2.0 - kappa * dt));
  const double v_cont = noise / (2.0 * kappa);
  CHECK(discrete_stationary(k, n, dt)(0, 0) == Approx(v_disc).epsilon(1e-12));
  // The ensemble sits on the discrete value and resolves it away from the
  // continuous one (4.7% apart here).
  CHECK(std::abs(r.v(0, 0) - v_disc) < 4.0 * r.stderr_(0, 0));
  CHECK(std::abs(r.v(0, 0) - v_cont) > 4.0 * r.stderr_(0, 0));
}

TEST_CASE("coupled system reproduces the Lyapunov steady state") {
  const om::DeskParams desk = testutil::desk_params();
  const om::Mat6 k = om::build_drift(desk);
  const om::Mat6 n = om::build_noise(desk);
  const om::CovarianceMatrix truth = om::solve_lyapunov(k, n, 1e-9);

  om::IntegratorConfig cfg;
  cfg.dt = 0.005;
  cfg.t_total = 60.0;
  cfg.burn_in = 60.0;  // margin = 0.1716: >= 10 relaxation times
  cfg.n_trajectories = 300;
  cfg.seed = 99;
  const om::EnsembleResult r = om::integrate_ensemble(k, n, cfg);

  const double err = (r.v - truth.v).norm() / truth.v.norm();
  CHECK(err < std::max(0.05, 4.0 * om::frobenius_stderr(r, truth.v)));
  CHECK((r.v - r.v.transpose()).norm() < 1e-12 * r.v.norm());
}

TEST_CASE("integrator rejects bad configurations and systems") {
  const om::DeskParams desk = testutil::desk_params();
  const om::Mat6 k = om::build_drift(desk);
  const om::Mat6 n = om::build_noise(desk);
  om::IntegratorConfig cfg;
  cfg.dt = 0.005;
  cfg.t_total = 10.0;
  cfg.burn_in = 60.0;
  cfg.n_trajectories = 4;
  cfg.seed = 1;

  {  // explicit-scheme guard
    om::IntegratorConfig bad = cfg;
    bad.dt = 0.5;
    CHECK_THROWS_AS(om::integrate_ensemble(k, n, bad), om::UnstableScheme);
  }
  {  // unstable drift
    Eigen::MatrixXd ku = 0.1 * Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd nu = Eigen::MatrixXd::Identity(2, 2);
    om::IntegratorConfig c2 = cfg;
    c2.dt = 0.01;
    CHECK_THROWS_AS(om::integrate_ensemble(ku, nu, c2), om::UnstableSystem);
  }
  {  // burn-in shorter than 10 relaxation times
    om::IntegratorConfig bad = cfg;
    bad.burn_in = 10.0;
    CHECK_THROWS_AS(om::integrate_ensemble(k, n, bad), om::ConfigError);
  }
  {  // basic argument validation
    om::IntegratorConfig bad = cfg;
    bad.n_trajectories = 1;
    CHECK_THROWS_AS(om::integrate_ensemble(k, n, bad), om::ConfigError);
    bad = cfg;
    bad.dt = 0.0;
    CHECK_THROWS_AS(om::integrate_ensemble(k, n, bad), om::ConfigError);
    bad = cfg;
    bad.t_total = -1.0;
    CHECK_THROWS_AS(om::integrate_ensemble(k, n, bad), om::ConfigError);
  }
  {  // shape mismatch
    Eigen::MatrixXd n4 = Eigen::MatrixXd::Identity(4, 4);
    CHECK_THROWS_AS(om::integrate_ensemble(k, n4, cfg), om::ConfigError);
  }
  {  // negative diffusion entry
    Eigen::MatrixXd k2 = -Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd n2 = Eigen::MatrixXd::Identity(2, 2);
    n2(1, 1) = -0.5;
    om::IntegratorConfig c2 = cfg;
    c2.dt = 0.01;
    c2.burn_in = 15.0;
    CHECK_THROWS_AS(om::integrate_ensemble(k2, n2, c2), om::NumericalError);
  }
}

TEST_CASE("ensemble estimates are bit-identical for identical seeds") {
  Eigen::MatrixXd k(2, 2), n(2, 2);
  k << -1.0, 0.7, -0.7, -1.0;
  n = Eigen::MatrixXd::Identity(2, 2);
  om::IntegratorConfig cfg;
  cfg.dt = 0.01;
  cfg.t_total = 20.0;
  cfg.burn_in = 12.0;
  cfg.n_trajectories = 8;
  cfg.seed = 4242;

  const om::EnsembleResult r1 = om::integrate_ensemble(k, n, cfg);
  const om::EnsembleResult r2 = om::integrate_ensemble(k, n, cfg);
  CHECK((r1.v - r2.v).norm() == 0.0);
  CHECK((r1.stderr_ - r2.stderr_).norm() == 0.0);

  om::IntegratorConfig other = cfg;
  other.seed = 4243;
  const om::EnsembleResult r3 = om::integrate_ensemble(k, n, other);
  CHECK((r1.v - r3.v).norm() > 0.0);
}

TEST_CASE("weak convergence ladder on the scalar process") {
  const double kappa = 1.0, noise = 2.0;
  Eigen::MatrixXd k(1, 1), n(1, 1);
  k << -kappa;
  n << noise;

  const double dt_coarse = 0.08;
  const int levels = 3;
  const om::ConvergenceResult c = om::weak_convergence_check(
      k, n, dt_coarse, levels, 400.0, 15.0, 256, 77);

  REQUIRE(c.dts.size() == 3);
  CHECK(c.dts[0] == Approx(0.08));
  CHECK(c.dts[1] == Approx(0.04));
  CHECK(c.dts[2] == Approx(0.02));
  // Errors against the finest level follow the hand-derived discrete
  // variance v(dt) = N / (kappa (2 - kappa dt)).
  const auto v_of = [&](double dt) { return noise / (kappa * (2.0 - kappa * dt)); };
  const double dt_fine = dt_coarse / 8.0;
  for (int i = 0; i < 3; ++i) {
    const double predicted = v_of(c.dts[i]) - v_of(dt_fine);
    CHECK(c.errors[i] == Approx(predicted).epsilon(0.5));
  }
  CHECK(c.slope > 0.7);
  CHECK(c.slope < 1.3);
}

TEST_CASE("weak convergence ladder on the coupled system") {
  const om::DeskParams desk = testutil::desk_params();
  const om::Mat6 k = om::build_drift(desk);
  const om::Mat6 n = om::build_noise(desk);

  const om::ConvergenceResult c =
      om::weak_convergence_check(k, n, 0.04, 3, 60.0, 60.0, 64, 7);
  REQUIRE(c.errors.size() == 3);
  CHECK(c.errors[0] > c.errors[2]);  // coarser step, larger bias
  CHECK(c.slope > 0.7);
  CHECK(c.slope < 1.3);

  CHECK_THROWS_AS(om::weak_convergence_check(k, n, 0.04, 1, 60.0, 60.0, 8, 7),
                  om::ConfigError);
  CHECK_THROWS_AS(om::weak_convergence_check(k, n, 1.0, 3, 60.0, 60.0, 8, 7),
                  om::UnstableScheme);
  CHECK_THROWS_AS(
      om::weak_convergence_check(Eigen::MatrixXd::Identity(2, 2) * 0.01,
                                 Eigen::MatrixXd::Identity(2, 2), 0.04, 3,
                                 60.0, 60.0, 8, 7),
      om::UnstableSystem);
}
