#pragma once

#include "tmbae/linmodel.hpp"

namespace tmbae {

// Frequency-resolved symmetrized noise spectra of the measured quadrature.
// Frequencies are rotating-frame and gamma-normalized; values are gamma*S
// (dimensionless), so the symmetric on-resonance thermal peak is ~1 at
// nbar = 0.
struct SpectrumSeries {
  std::vector<double> omega;  // omega/gamma
  std::vector<double> th;
  std::vector<double> ba;
  std::vector<double> imp;
  std::vector<double> total;
  std::string target = "X+";
  std::string params_hash;
  double omega_peak = 0.0;  // nearest Lorentzian center, used by tail fits
};

// Row-1 quadratic form of the thermal susceptibility.
double thermal_spectrum(const LinearModel& model, double nbar_a, double nbar_b,
                        double omega_n);

// gamma*S_ba = |chi_14|^2 * C_tilde * (2 nbar_c + 1); identically zero for the
// symmetric tag by block structure.
double backaction_spectrum(const LinearModel& model, double C_tilde,
                           double nbar_c, double omega_n);

// Frequency-independent imprecision floor (2 nbar_c + 1) / (8 C_tilde).
double imprecision_level(const DerivedParams& dp);

std::vector<double> default_grid(const LinearModel& model,
                                 const DerivedParams& dp);

SpectrumSeries measured_spectrum(const LinearModel& model,
                                 const DerivedParams& dp,
                                 const std::vector<double>& omega_grid);

enum class ClosedFormCase {
  OnResonanceThermal,           // p = 0
  MatchedThermal,               // p = -d
  OnResonanceBackaction,
  MatchedResidualBackaction,    // p = -d, leading residual in gamma/Omega
  DetunedThermal,
  DetunedBackaction,
  DetunedBackactionDampingOnly,
  CompensatedThermalResonant,
  CompensatedBackactionResonant,
  CompensatedDetunedThermal,
  CompensatedDetunedBackaction,
};

// Literal closed-form values (gamma-normalized) used as oracles against the
// susceptibility route. delta_n (units of gamma) only matters for the detuned
// cases. Throws ConfigError for an unknown case.
double closed_form_reference(const DerivedParams& dp, ClosedFormCase c,
                             double delta_n = 0.0);

// Integral of the oscillator part (th + ba) over domega/(2 pi), trapezoid on
// the series grid plus 1/omega^2 tail corrections beyond the grid ends. The
// imprecision floor is detector noise and is excluded. Throws NumericalError
// if the grid violates the coverage/resolution preconditions.
double integrate_spectrum(const SpectrumSeries& series);

// Trapezoid + tail integral of raw samples (test utility for known shapes).
double integrate_samples(const std::vector<double>& omega,
                         const std::vector<double>& values, double omega_peak);

}  // namespace tmbae
