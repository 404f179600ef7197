#pragma once

#include <optional>

#include "tmbae/common.hpp"

namespace tmbae {

// Physical inputs. All rates and frequencies are angular (rad/s); file and CLI
// boundaries speak Hz and convert with 2*pi.
struct SystemParams {
  double omega_a = 0.0;  // mechanical resonance, oscillator a (rad/s)
  double omega_b = 0.0;  // mechanical resonance, oscillator b (rad/s)
  double kappa = 0.0;    // cavity linewidth (rad/s)
  double gamma_a = 0.0;  // mechanical damping a (rad/s)
  double gamma_b = 0.0;  // mechanical damping b (rad/s)
  double g_a = 0.0;      // single-photon coupling a (rad/s)
  double g_b = 0.0;      // single-photon coupling b (rad/s)
  double cbar = 0.0;     // steady sideband amplitude (dimensionless)
  double nbar_a = 0.0;   // bath occupation a
  double nbar_b = 0.0;   // bath occupation b
  double nbar_c = 0.0;   // cavity bath occupation
  double eta = 1.0;      // homodyne quantum efficiency in (0,1]
  std::optional<double> Lambda_override;  // parametric drive (rad/s)

  double omega_m() const { return 0.5 * (omega_a + omega_b); }
};

// Everything derived from SystemParams. Rates in rad/s; dimensionless ratios
// as named. Downstream numerics divide by `gamma` once and work in gamma=1
// units so matrices stay O(1).
struct DerivedParams {
  double gamma = 0.0;        // mean damping (rad/s)
  double Omega = 0.0;        // (omega_a - omega_b)/2 (rad/s)
  double kappa = 0.0;        // rad/s
  double G = 0.0;            // many-photon coupling (rad/s)
  double G_d = 0.0;          // coupling difference (rad/s)
  double G_tilde = 0.0;      // rotated coupling (rad/s)
  double theta = 0.0;        // rotation angle (rad)
  double p = 0.0;            // coupling asymmetry, tan(2 theta)
  double d = 0.0;            // damping asymmetry, clamped to |d| <= 1 - 1e-6
  double Omega_tilde = 0.0;  // Omega cos(2 theta) (rad/s)
  double C = 0.0;            // cooperativity 2G^2/(gamma kappa)
  double C_tilde = 0.0;      // rotated cooperativity
  double Gamma = 0.0;        // measurement rate 2 G_tilde^2 / kappa (rad/s)
  double nbar_th = 0.0;      // (nbar_a + nbar_b)/2
  double nbar_d = 0.0;       // (nbar_a - nbar_b)/2
  double nbar_tot = 0.0;     // nbar_th + 1/2
  double nbar_c = 0.0;
  double eta = 1.0;
  double Lambda = 0.0;       // compensation strength (rad/s)
  bool d_clamped = false;

  // gamma-normalized shorthands used by every solver
  double omega_n() const { return Omega / gamma; }
  double omega_tilde_n() const { return Omega_tilde / gamma; }
  double lambda_n() const { return Lambda / gamma; }
  double kappa_n() const { return kappa / gamma; }
};

// cbar = |E| / sqrt(omega_m^2 + kappa^2/4); throws std::domain_error on
// non-positive input.
double sideband_amplitude(double drive_amplitude, double omega_m, double kappa);

// Diagnostics, never throws. Empty error set means the parameters are usable;
// warnings flag regime violations (resolved sideband, good measurement).
std::vector<Diagnostic> validate(const SystemParams& sp);

// Throws ConfigError when validate() reports errors.
DerivedParams derive(const SystemParams& sp);

// Builds SystemParams realizing the requested dimensionless targets on top of
// baseline rates (defaults follow the reference device: gamma/2pi = 100 Hz,
// kappa/2pi = 200 kHz, Omega/2pi = 20 kHz, omega_m/2pi = 10 MHz, cbar = 1e3).
struct DimensionlessSpec {
  double C = 500.0;
  double Omega_over_gamma = 200.0;
  double p = 0.0;                 // coupling asymmetry; Gd_over_G wins if set
  std::optional<double> Gd_over_G;
  double d = 0.0;
  double nbar_a = 0.0;
  double nbar_b = 0.0;
  double nbar_c = 0.0;
  double eta = 1.0;
  std::optional<double> Lambda_over_gamma;
  double gamma = kTwoPi * 100.0;
  double kappa = kTwoPi * 200e3;
  double omega_m = kTwoPi * 10e6;
  double cbar = 1000.0;
};

SystemParams from_dimensionless(const DimensionlessSpec& spec);

// Copy with the couplings rescaled so the cooperativity becomes C_new; theta,
// p, d and the bath occupations are unchanged. Used for C sweeps.
DerivedParams with_cooperativity(const DerivedParams& dp, double C_new);

// FNV-1a fingerprint of the derived parameter set, for output metadata.
std::string fingerprint(const DerivedParams& dp);

}  // namespace tmbae
