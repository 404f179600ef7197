#pragma once

#include "tmbae/linmodel.hpp"

namespace tmbae {

// Coefficients of the adiabatically eliminated conditional dynamics,
// gamma = 1 units. L is the thermal diffusion; the measurement back-action
// additionally heats P+ at rate Gamma, which diffusion() includes.
struct SMECoefficients {
  Mat4 M = Mat4::Zero();
  Vec4 K = Vec4::Zero();  // measurement row, sqrt(4 eta Gamma) on the X+ slot
  Mat4 L = Mat4::Zero();
  double Gamma_n = 0.0;   // measurement rate, units of gamma
  double eta = 1.0;
  double theta = 0.0;
  std::vector<Diagnostic> warnings;

  Mat4 diffusion() const {
    Mat4 d = L;
    d(3, 3) += Gamma_n;
    return d;
  }
};

SMECoefficients sme_coefficients(const DerivedParams& dp,
                                 const ModelConfig& config);

struct CareResult {
  Mat4 Sigma = Mat4::Zero();
  double residual = 0.0;
  double integration_time = 0.0;  // units of 1/gamma
  int newton_steps = 0;
};

// Stationary conditional covariance: integrate the Riccati flow from the
// thermal state until quiescent, then Newton-polish. Postcondition:
// residual <= 1e-10 * max(1, ||Sigma||_inf), Sigma symmetric positive
// definite. Throws NumericalError otherwise.
CareResult solve_care(const SMECoefficients& sme);

// The ten independent covariances in the (X+, P-, X-, P+) basis.
struct AnalyticCovariances {
  double VXp = 0.0, Spm = 0.0, VPm = 0.0;
  double VXm = 0.0, VPp = 0.0, Smp = 0.0;
  double Spp = 0.0, Smm = 0.0, Sxx = 0.0, SPP = 0.0;

  Mat4 matrix() const;
};

// Closed-form steady state for the symmetric configuration, or for the
// compensated configuration with d = 0 (tilde-substituted parameters, then
// two linear solves for the perturbed block). Throws ConfigError for any
// other configuration.
AnalyticCovariances analytic_symmetric(const DerivedParams& dp,
                                       ModelTag tag = ModelTag::Symmetric);

struct DuanResult {
  double value = 0.0;
  double bound = 1.0;  // cos(2 theta)
  bool entangled = false;
};

// V_{X+} + V_{P-} against the generalized bound cos(2 theta).
DuanResult duan(const Mat4& Sigma, double theta);

// Strong-measurement closed form sqrt(2 (nbar_th + 1/2) / (eta C)); crosses
// the bound 1 exactly at C = 2 (nbar_th + 1/2) / eta.
double duan_asymptotic(double C, double nbar_th, double eta);

// Gaussian logarithmic negativity of the two-mode state (vacuum variance
// 1/2 convention): undo the theta rotation, split into modes a/b, partially
// transpose, and read off the smallest symplectic eigenvalue. Throws
// std::domain_error for a nonphysical covariance.
double log_negativity(const Mat4& Sigma, double theta);

// Transform from collective (X+, P-, X-, P+) to modes (X_a, P_a, X_b, P_b).
Mat4 collective_to_modes(double theta);

// Symplectic eigenvalues of a 4x4 covariance in mode ordering, ascending.
Eigen::Vector2d symplectic_eigenvalues(const Mat4& cov_modes);

// C* = 2 (nbar_th + 1/2) / eta
double entanglement_threshold(double nbar_th, double eta);

}  // namespace tmbae
