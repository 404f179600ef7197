#pragma once

#include "tmbae/params.hpp"

namespace tmbae {

enum class ModelTag { Symmetric, AsymmetricOriginal, AsymmetricCompensated };
enum class Basis { Original, Rotated };

struct ModelConfig {
  ModelTag tag = ModelTag::Symmetric;
  Basis basis = Basis::Rotated;
};

// 4-dimensional linear stochastic model in gamma = 1 units. Basis order is
// fixed: (X+, P-, X-, P+) collective quadratures (tilde quadratures for the
// rotated basis). The cavity coupling is kept out of M as the input vector
// `ba` (it multiplies the cavity quadrature X_c).
struct LinearModel {
  Mat4 M = Mat4::Zero();   // drift, units of gamma
  Mat4 N = Mat4::Zero();   // noise weights, units of sqrt(gamma)
  Vec4 ba = Vec4::Zero();  // back-action coupling, units of gamma
  ModelConfig config;
  double theta = 0.0;      // rad
  double gamma = 0.0;      // rad/s, the normalization scale
  double Omega_eff = 0.0;  // rad/s; spectra peak near +/- Omega_eff
  double p = 0.0;
  double d = 0.0;

  double omega_eff_n() const { return Omega_eff / gamma; }
};

// Weights of the (Re f, Im f) force components on the four quadrature slots.
struct ForceWeight {
  double theta = 0.0;
  double c_minus = 1.0;  // cos(theta) - sin(theta), slots X+ and P+
  double c_plus = 1.0;   // cos(theta) + sin(theta), slots P- and X-

  Vec4 re_vector() const { return {0.0, -c_plus, 0.0, -c_minus}; }
  Vec4 im_vector() const { return {-c_minus, 0.0, -c_plus, 0.0}; }
  // Coefficient of exp(-i w t) in the drive for unit-amplitude fbar; the X+
  // response to it is the transfer function chi_F[w].
  Vec4c harmonic_vector() const;
};

LinearModel build(const DerivedParams& dp, const ModelConfig& config);

// chi[w] = (M + i w I)^(-1); w in units of gamma. Throws NumericalError if
// the defining residual exceeds 1e-10.
Mat4c susceptibility(const LinearModel& model, double omega_n);

// chibar[w] = chi[w] * N
Mat4c thermal_susceptibility(const LinearModel& model, double omega_n);

ForceWeight force_weight(const DerivedParams& dp);

// Max real part of eig(M) in rad/s; negative for all valid models.
double stability(const LinearModel& model);

// Quadrature rotation taking original-basis vectors to the rotated (tilde)
// basis: v_tilde = R(theta) * v. Orthogonal.
Mat4 rotation_matrix(double theta);

}  // namespace tmbae
