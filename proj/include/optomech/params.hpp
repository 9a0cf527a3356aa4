#pragma once

// Physical parameters of the two-cavity optomechanical system and the
// derived operating-point quantities.
//
// Geometry: two Fabry-Perot cavities (labelled A and B) share one movable
// end mirror of effective mass mu and frequency omega_m. Each cavity is
// driven by a laser of power P_j and frequency omega_lj; kappa_j is the
// cavity amplitude decay rate. Radiation pressure couples each intracavity
// field to the mirror with the single-photon rate
//     g0_j = (omega_j / length_j) * sqrt(hbar / (mu * omega_m)),
// and the linearized field-mirror coupling at the classical working point is
//     G_j = sqrt(2) * alpha_j * g0_j,
// with alpha_j the stationary intracavity amplitude. The mirror sits between
// the cavities, so a displacement that shortens A lengthens B; `side_sign`
// (+1 for A, -1 for B) carries that orientation through the statics.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "optomech/core.hpp"

namespace optomech {

struct PhysicalConstants {
  double hbar = default_hbar;  // J s
  double k_b = default_k_b;    // J/K
};

enum class CavityLabel { A, B };

struct CavityParams {
  CavityLabel label = CavityLabel::A;
  double omega_laser = 0.0;         // rad/s, drive laser frequency
  double omega_cavity = 0.0;        // rad/s; 0 means "locked to the laser"
  double length = 0.0;              // m
  double kappa = 0.0;               // rad/s, amplitude decay rate
  double power = 0.0;               // W
  double detuning_effective = 0.0;  // rad/s, the swept working-point detuning

  int side_sign() const { return label == CavityLabel::A ? +1 : -1; }
  double omega_cavity_or_locked() const {
    return omega_cavity > 0.0 ? omega_cavity : omega_laser;
  }
};

struct MirrorParams {
  double omega_m = 0.0;      // rad/s
  double gamma_m = 0.0;      // rad/s, mechanical damping
  double mass = 0.0;         // kg
  double temperature = 0.0;  // K
};

struct SystemParams {
  CavityParams cavity_a;
  CavityParams cavity_b;
  MirrorParams mirror;
  PhysicalConstants constants;

  // Invariant checks; returns human-readable soft warnings (currently the
  // Markov-regime check gamma_m/omega_m <= 1e-2; the damping model assumes
  // a high-Q mechanical oscillator).
  std::vector<std::string> validate() const {
    if (cavity_a.label != CavityLabel::A || cavity_b.label != CavityLabel::B)
      throw ConfigError("cavity labels must be (A, B)");
    for (const CavityParams* c : {&cavity_a, &cavity_b}) {
      if (c->kappa <= 0.0) throw ConfigError("kappa must be > 0");
      if (c->power < 0.0) throw ConfigError("power must be >= 0");
      if (c->length <= 0.0) throw ConfigError("cavity length must be > 0");
      if (c->omega_laser <= 0.0)
        throw ConfigError("laser frequency must be > 0");
    }
    if (mirror.omega_m <= 0.0) throw ConfigError("omega_m must be > 0");
    if (mirror.gamma_m <= 0.0) throw ConfigError("gamma_m must be > 0");
    if (mirror.mass <= 0.0) throw ConfigError("mirror mass must be > 0");
    if (mirror.temperature < 0.0)
      throw ConfigError("temperature must be >= 0");
    if (constants.hbar <= 0.0 || constants.k_b <= 0.0)
      throw ConfigError("physical constants must be > 0");
    std::vector<std::string> warnings;
    if (mirror.gamma_m / mirror.omega_m > 1e-2)
      warnings.push_back(
          "gamma_m/omega_m > 1e-2: outside the high-Q regime the Markovian "
          "mirror damping model is only qualitative");
    return warnings;
  }
};

struct PerCavity {
  double a = 0.0;
  double b = 0.0;
  double get(CavityLabel l) const { return l == CavityLabel::A ? a : b; }
};

struct DerivedQuantities {
  PerCavity g0;         // rad/s, single-photon optomechanical rate
  PerCavity drive_amp;  // 1/s, |E_j| = sqrt(2 kappa_j P_j / (hbar omega_lj))
  PerCavity alpha_s;    // dimensionless stationary amplitude (real, >= 0)
  PerCavity g_eff;      // rad/s, G_j = sqrt(2) alpha_j g0_j
  double nbar = 0.0;    // mean thermal phonon number of the mirror bath
  double q_s = 0.0;     // dimensionless mirror equilibrium displacement
};

namespace detail {

inline double g0_of(const CavityParams& c, const MirrorParams& m,
                    const PhysicalConstants& k) {
  return (c.omega_cavity_or_locked() / c.length) *
         std::sqrt(k.hbar / (m.mass * m.omega_m));
}

inline double drive_amp_of(const CavityParams& c, const PhysicalConstants& k) {
  return std::sqrt(2.0 * c.kappa * c.power / (k.hbar * c.omega_laser));
}

inline double alpha_of(double drive_amp, double kappa, double detuning) {
  // Phase convention: the stationary amplitude is taken real and
  // non-negative (the drive phase is absorbed into the quadrature frame).
  return drive_amp / std::sqrt(kappa * kappa + detuning * detuning);
}

}  // namespace detail

// Compute every derived working-point quantity at the given effective
// detunings (which are the primary sweep variables throughout).
inline DerivedQuantities derive(const SystemParams& p) {
  DerivedQuantities d;
  d.g0.a = detail::g0_of(p.cavity_a, p.mirror, p.constants);
  d.g0.b = detail::g0_of(p.cavity_b, p.mirror, p.constants);
  d.drive_amp.a = detail::drive_amp_of(p.cavity_a, p.constants);
  d.drive_amp.b = detail::drive_amp_of(p.cavity_b, p.constants);
  d.alpha_s.a = detail::alpha_of(d.drive_amp.a, p.cavity_a.kappa,
                                 p.cavity_a.detuning_effective);
  d.alpha_s.b = detail::alpha_of(d.drive_amp.b, p.cavity_b.kappa,
                                 p.cavity_b.detuning_effective);
  d.g_eff.a = std::sqrt(2.0) * d.alpha_s.a * d.g0.a;
  d.g_eff.b = std::sqrt(2.0) * d.alpha_s.b * d.g0.b;
  if (p.mirror.temperature == 0.0) {
    d.nbar = 0.0;
  } else {
    const double x = p.constants.hbar * p.mirror.omega_m /
                     (p.constants.k_b * p.mirror.temperature);
    d.nbar = 1.0 / std::expm1(x);
  }
  d.q_s = (p.cavity_a.side_sign() * d.g0.a * d.alpha_s.a * d.alpha_s.a +
           p.cavity_b.side_sign() * d.g0.b * d.alpha_s.b * d.alpha_s.b) /
          p.mirror.omega_m;
  return d;
}

// One self-consistent classical working point for given nominal detunings.
struct OperatingPoint {
  double delta_a = 0.0;  // rad/s, effective detuning of cavity A
  double delta_b = 0.0;  // rad/s, effective detuning of cavity B
  double alpha_a = 0.0;
  double alpha_b = 0.0;
  double q_s = 0.0;
  bool stable = false;  // linearized-dynamics verdict at this fixed point
};

// Solve the classical fixed-point system for nominal detunings
// (delta0_a, delta0_b):
//     Delta_j  = delta0_j - side_sign_j * g0_j * q_s
//     alpha_j  = |E_j| / sqrt(kappa_j^2 + Delta_j^2)
//     q_s      = sum_j side_sign_j * g0_j * alpha_j^2 / omega_m.
// Everything reduces to one scalar equation h(q) = q - F(q) = 0. Damped
// Newton iterations are launched from a uniform seed grid spanning the
// a-priori range of F; converged roots are deduplicated at relative 1e-9.
// The radiation-pressure cubic can have up to three real roots per cavity
// (static bistability), hence the list return. `stable` is filled by the
// caller (dynamics.hpp provides the verdict); here it defaults to false.
//
// Declared here, defined in dynamics.hpp (needs the drift construction).
std::vector<OperatingPoint> solve_operating_point(const SystemParams& params,
                                                  double delta0_a,
                                                  double delta0_b);

namespace detail {

// F(q) of the scalar fixed-point equation, plus the per-cavity pieces.
struct StaticForce {
  StaticForce(const SystemParams& p, double d0a, double d0b)
      : p_(&p), d0a_(d0a), d0b_(d0b) {
    const DerivedQuantities d = derive(p);
    g0a_ = d.g0.a;
    g0b_ = d.g0.b;
    ea2_ = d.drive_amp.a * d.drive_amp.a;
    eb2_ = d.drive_amp.b * d.drive_amp.b;
  }

  double delta_a(double q) const { return d0a_ - g0a_ * q; }
  double delta_b(double q) const { return d0b_ + g0b_ * q; }

  double alpha2_a(double q) const {
    const double da = delta_a(q);
    return ea2_ / (p_->cavity_a.kappa * p_->cavity_a.kappa + da * da);
  }
  double alpha2_b(double q) const {
    const double db = delta_b(q);
    return eb2_ / (p_->cavity_b.kappa * p_->cavity_b.kappa + db * db);
  }

  double operator()(double q) const {
    return (g0a_ * alpha2_a(q) - g0b_ * alpha2_b(q)) / p_->mirror.omega_m;
  }

  // |F| is bounded by the zero-detuning amplitudes; use that for seeding.
  double bound() const {
    const double ka = p_->cavity_a.kappa, kb = p_->cavity_b.kappa;
    return (g0a_ * ea2_ / (ka * ka) + g0b_ * eb2_ / (kb * kb)) /
           p_->mirror.omega_m;
  }

  const SystemParams* p_;
  double d0a_, d0b_, g0a_, g0b_, ea2_, eb2_;
};

}  // namespace detail

}  // namespace optomech
