#pragma once

// Common aliases, numeric constants and the error taxonomy shared by all
// optomech headers. The library models two driven optical cavities that
// share a movable end mirror; every module works in angular units (rad/s)
// and dimensionless quadratures with vacuum variance 1/2.

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>

namespace optomech {

using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

inline constexpr double two_pi = 6.283185307179586476925286766559;

// CODATA 2018 values; overridable through PhysicalConstants.
inline constexpr double default_hbar = 1.054571817e-34;  // J s
inline constexpr double default_k_b = 1.380649e-23;      // J/K

// Base class for all library errors. `exit_code` matches the CLI contract:
// 2 for configuration/usage problems, 3 for numerical failures.
class Error : public std::runtime_error {
 public:
  Error(std::string msg, int exit_code)
      : std::runtime_error(std::move(msg)), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg, 2) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& msg) : Error(msg, 3) {}
};

class UnstableSystem : public NumericalError {
 public:
  explicit UnstableSystem(const std::string& msg) : NumericalError(msg) {}
};

class SingularSystem : public NumericalError {
 public:
  explicit SingularSystem(const std::string& msg) : NumericalError(msg) {}
};

class EigenFailure : public NumericalError {
 public:
  explicit EigenFailure(const std::string& msg) : NumericalError(msg) {}
};

class UnstableScheme : public NumericalError {
 public:
  explicit UnstableScheme(const std::string& msg) : NumericalError(msg) {}
};

class NoConvergence : public NumericalError {
 public:
  explicit NoConvergence(const std::string& msg) : NumericalError(msg) {}
};

class DegenerateInput : public NumericalError {
 public:
  explicit DegenerateInput(const std::string& msg) : NumericalError(msg) {}
};

class NegativeDiscriminant : public NumericalError {
 public:
  explicit NegativeDiscriminant(const std::string& msg)
      : NumericalError(msg) {}
};

class UnknownMode : public ConfigError {
 public:
  explicit UnknownMode(const std::string& msg) : ConfigError(msg) {}
};

class IllPosedGrid : public ConfigError {
 public:
  explicit IllPosedGrid(const std::string& msg) : ConfigError(msg) {}
};

}  // namespace optomech
