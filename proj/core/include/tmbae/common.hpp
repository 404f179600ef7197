#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace tmbae {

using Mat4 = Eigen::Matrix4d;
using Mat4c = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4d;
using Vec4c = Eigen::Vector4cd;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Vec8 = Eigen::Matrix<double, 8, 1>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Invalid configuration or inconsistent inputs (CLI exit code 2).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A solver failed to meet its accuracy contract (CLI exit code 3).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Severity { Warning, Error };

struct Diagnostic {
  Severity severity;
  std::string code;
  std::string message;
};

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags)
    if (d.severity == Severity::Error) return true;
  return false;
}

}  // namespace tmbae
