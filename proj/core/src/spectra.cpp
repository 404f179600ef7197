#include "tmbae/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tmbae {

double thermal_spectrum(const LinearModel& model, double nbar_a, double nbar_b,
                        double omega_n) {
  const Mat4c cb = thermal_susceptibility(model, omega_n);
  const double ntot = 0.5 * (nbar_a + nbar_b + 1.0);
  const double nd = 0.5 * (nbar_a - nbar_b);
  double s = 0.0;
  for (int m = 0; m < 4; ++m) s += std::norm(cb(0, m));
  s *= ntot;
  s += nd * 2.0 *
       (std::real(std::conj(cb(0, 0)) * cb(0, 2)) +
        std::real(std::conj(cb(0, 1)) * cb(0, 3)));
  return s;
}

double backaction_spectrum(const LinearModel& model, double C_tilde,
                           double nbar_c, double omega_n) {
  if (model.config.tag == ModelTag::Symmetric) return 0.0;
  const Mat4c chi = susceptibility(model, omega_n);
  return std::norm(chi(0, 3)) * C_tilde * (2.0 * nbar_c + 1.0);
}

double imprecision_level(const DerivedParams& dp) {
  return (2.0 * dp.nbar_c + 1.0) / (8.0 * dp.C_tilde);
}

std::vector<double> default_grid(const LinearModel& model,
                                 const DerivedParams& dp) {
  // Linear gamma/50 sampling within +-25 gamma of each Lorentzian center,
  // logarithmic bridges elsewhere, out to Omega + 200 gamma. Dense enough
  // that trapezoid integration resolves the peaks to well below 1%.
  const double om = dp.omega_n();
  const double omt = dp.omega_tilde_n();
  std::set<double> centers{om};
  if (model.config.tag != ModelTag::Symmetric) centers.insert(omt);

  constexpr double kWindow = 25.0;
  constexpr double kStep = 0.02;
  const double wmax = *centers.rbegin() + 200.0;

  std::set<double> pts;
  auto add = [&pts, wmax](double x) {
    if (x >= 1e-9 && x <= wmax) pts.insert(x);
  };
  for (double c : centers)
    for (double x = c - kWindow; x <= c + kWindow + 0.5 * kStep; x += kStep)
      add(x);
  // log bridges: from near zero up to wmax, 80 points per decade
  const double lo = 1e-3, ratio = std::pow(10.0, 1.0 / 80.0);
  for (double x = lo; x <= wmax; x *= ratio) add(x);
  add(wmax);

  std::vector<double> grid;
  grid.reserve(2 * pts.size() + 1);
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) grid.push_back(-*it);
  grid.push_back(0.0);
  for (double x : pts) grid.push_back(x);
  return grid;
}

SpectrumSeries measured_spectrum(const LinearModel& model,
                                 const DerivedParams& dp,
                                 const std::vector<double>& omega_grid) {
  SpectrumSeries s;
  s.omega = omega_grid;
  const size_t n = omega_grid.size();
  s.th.resize(n);
  s.ba.resize(n);
  s.imp.resize(n);
  s.total.resize(n);
  const double nbar_a = dp.nbar_th + dp.nbar_d;
  const double nbar_b = dp.nbar_th - dp.nbar_d;
  const double imp = imprecision_level(dp);
  for (size_t i = 0; i < n; ++i) {
    const double w = omega_grid[i];
    s.th[i] = thermal_spectrum(model, nbar_a, nbar_b, w);
    s.ba[i] = backaction_spectrum(model, dp.C_tilde, dp.nbar_c, w);
    s.imp[i] = imp;
    s.total[i] = s.th[i] + s.ba[i] + s.imp[i];
  }
  s.omega_peak = model.omega_eff_n();
  s.params_hash = fingerprint(dp);
  return s;
}

double closed_form_reference(const DerivedParams& dp, ClosedFormCase c,
                             double delta_n) {
  const double d = dp.d, p = dp.p;
  const double na = dp.nbar_th + dp.nbar_d;
  const double nb = dp.nbar_th - dp.nbar_d;
  const double cav = 2.0 * dp.nbar_c + 1.0;
  const double om = dp.omega_n();
  const double D = delta_n;
  switch (c) {
    case ClosedFormCase::OnResonanceThermal:
      if (std::abs(p) > 1e-9)
        throw ConfigError("closed_form_reference: OnResonanceThermal needs p = 0");
      return (0.5 + na) / (1.0 + d) + (0.5 + nb) / (1.0 - d);
    case ClosedFormCase::MatchedThermal:
      return (0.5 + na) * (1.0 + d * d * d) + (0.5 + nb) * (1.0 - d * d * d);
    case ClosedFormCase::OnResonanceBackaction: {
      const double den = 1.0 - d * d + p * p;
      return (p + d) * (p + d) * (1.0 + p * p) / (den * den) * dp.C_tilde * cav;
    }
    case ClosedFormCase::MatchedResidualBackaction: {
      const double u = 1.0 + d * d;
      return (1.0 / (om * om)) * 0.125 * u * u * u * (u - std::sqrt(u)) *
             dp.C * cav;
    }
    case ClosedFormCase::DetunedThermal: {
      const double q = p / (1.0 + p * p);
      return 1.0 / (4.0 * D * D) *
             ((1.0 + d) * (0.5 + na) * (1.0 - q) +
              (1.0 - d) * (0.5 + nb) * (1.0 + q));
    }
    case ClosedFormCase::DetunedBackaction:
      return 1.0 / (4.0 * D * D) * p * p / (1.0 + p * p) * dp.C_tilde * cav;
    case ClosedFormCase::DetunedBackactionDampingOnly:
      return 1.0 / (4.0 * D * D) * 1.0 / (4.0 * D * D) * d * d * dp.C * cav;
    case ClosedFormCase::CompensatedThermalResonant: {
      const double den = 1.0 - d * d * (1.0 - p * p);
      return (na + nb + 1.0 +
              (nb - na) * d * (1.0 - d * d * (1.0 + p * p)) / den) /
             den;
    }
    case ClosedFormCase::CompensatedBackactionResonant: {
      const double den = 1.0 - d * d * (1.0 - p * p);
      return d * d / (den * den) * dp.C_tilde * cav;
    }
    case ClosedFormCase::CompensatedDetunedThermal:
      return 1.0 / (4.0 * D * D) *
             ((1.0 + d) * (0.5 + na) + (1.0 - d) * (0.5 + nb));
    case ClosedFormCase::CompensatedDetunedBackaction:
      return 1.0 / (4.0 * D * D) * 1.0 / (4.0 * D * D) * d * d * dp.C_tilde *
             cav;
  }
  throw ConfigError("closed_form_reference: unknown case");
}

double integrate_samples(const std::vector<double>& omega,
                         const std::vector<double>& values,
                         double omega_peak) {
  if (omega.size() < 3 || omega.size() != values.size())
    throw NumericalError("integrate_samples: degenerate grid");
  double acc = 0.0;
  for (size_t i = 1; i < omega.size(); ++i)
    acc += 0.5 * (values[i] + values[i - 1]) * (omega[i] - omega[i - 1]);
  // 1/omega^2 tails outside the sampled window, referenced to the nearest
  // peak center on each side
  const double dr = omega.back() - omega_peak;
  const double dl = -(omega.front() + omega_peak);  // distance to -peak
  if (dr > 0.0) acc += values.back() * dr;
  if (dl > 0.0) acc += values.front() * dl;
  return acc / kTwoPi;
}

double integrate_spectrum(const SpectrumSeries& s) {
  const double wmin = s.omega.front(), wmax = s.omega.back();
  if (wmax < s.omega_peak + 50.0 || wmin > -(s.omega_peak + 50.0))
    throw NumericalError("integrate_spectrum: grid must cover +-(Omega + 50 gamma)");
  for (size_t i = 1; i < s.omega.size(); ++i) {
    const double mid = 0.5 * (s.omega[i] + s.omega[i - 1]);
    if (std::abs(std::abs(mid) - s.omega_peak) < 10.0 &&
        s.omega[i] - s.omega[i - 1] > 0.05 + 1e-12)
      throw NumericalError("integrate_spectrum: resolution near peaks must be <= gamma/20");
  }
  std::vector<double> osc(s.omega.size());
  for (size_t i = 0; i < osc.size(); ++i) osc[i] = s.th[i] + s.ba[i];
  return integrate_samples(s.omega, osc, s.omega_peak);
}

}  // namespace tmbae
