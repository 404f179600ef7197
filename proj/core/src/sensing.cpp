#include "tmbae/sensing.hpp"

#include <cmath>
#include <functional>

namespace tmbae {

namespace {
double half_angle(double p) { return 0.5 * std::atan(p); }
}  // namespace

QuantumLimits quantum_limits(double delta_over_gamma_a) {
  QuantumLimits q;
  q.standard = std::max(std::abs(delta_over_gamma_a), 0.5);
  return q;
}

TransferGain force_transfer(const LinearModel& model, const ForceWeight& fw,
                            double omega_n) {
  const Mat4c chi = susceptibility(model, omega_n);
  TransferGain out;
  // the response at negative frequencies couples to the conjugate drive
  // component, which gives chi_F[-w] = conj(chi_F[w]) for a real force
  const Vec4c drive = omega_n >= 0.0 ? fw.harmonic_vector()
                                     : fw.harmonic_vector().conjugate();
  out.value = -(chi * drive)(0);
  const double om_eff = model.omega_eff_n();
  out.narrowband = std::abs(std::abs(omega_n) - om_eff) <= 0.2 * om_eff;
  return out;
}

double g_resonant(double p, double d, bool compensated) {
  const double t = half_angle(p);
  if (compensated) {
    return ((1.0 - d) * std::cos(t) - d * p * std::sin(t)) /
           (1.0 - d * d + d * d * p * p);
  }
  if (std::abs(p) < 1e-10) return 1.0 / (1.0 + d);
  const double s = std::sqrt(1.0 + p * p);
  const double num = s * (1.0 + d + p) - 1.0 - d - d * p - p * p;
  return num / (2.0 * (1.0 - d * d + p * p)) / std::sin(t);
}

double g_detuned(double p, double d, bool compensated) {
  (void)d;  // independent of damping asymmetry in both variants
  const double t = half_angle(p);
  if (compensated) return std::cos(t);
  if (std::abs(p) < 1e-10) return 1.0;
  const double s = std::sqrt(1.0 + p * p);
  return (1.0 + p - s) / (2.0 * s) / std::sin(t);
}

AddedNoiseLedger added_noise(const DerivedParams& dp, const LinearModel& model,
                             double delta_n, bool subtract_intrinsic) {
  AddedNoiseLedger ledger;
  ledger.delta_n = delta_n;
  ledger.case_tag = "numeric";

  const double w = model.omega_eff_n() + delta_n;
  const ForceWeight fw = force_weight(dp);
  const TransferGain gain = force_transfer(model, fw, w);
  if (!gain.narrowband)
    ledger.warnings.push_back(
        {Severity::Warning, "narrowband",
         "evaluation frequency is not close to the effective resonance"});

  const double gamma_a_n = 1.0 + dp.d;  // units of gamma
  const double denom = gamma_a_n * std::norm(gain.value);
  if (!(denom > 0.0))
    throw NumericalError("added_noise: vanishing transfer gain");

  const double nbar_a = dp.nbar_th + dp.nbar_d;
  const double nbar_b = dp.nbar_th - dp.nbar_d;
  const double intrinsic = subtract_intrinsic ? (0.5 + nbar_a) : 0.0;

  ledger.aux = thermal_spectrum(model, nbar_a, nbar_b, w) / denom - intrinsic;
  ledger.ba = backaction_spectrum(model, dp.C_tilde, dp.nbar_c, w) / denom;
  ledger.imp = imprecision_level(dp) / denom;
  ledger.total = ledger.aux + ledger.ba + ledger.imp;
  return ledger;
}

AddedNoiseLedger added_noise_closed(const DerivedParams& dp, LedgerCase c,
                                    double delta_n) {
  AddedNoiseLedger ledger;
  ledger.delta_n = delta_n;
  if (dp.nbar_th != 0.0 || dp.nbar_d != 0.0)
    ledger.warnings.push_back({Severity::Warning, "zero-temperature",
                               "closed-form ledger assumes nbar_a = nbar_b = 0"});
  const double d = dp.d, p = dp.p, C = dp.C, Ct = dp.C_tilde;
  const double om = dp.omega_n();
  const double D = delta_n;
  const double sec2 = 1.0 / std::pow(std::cos(half_angle(p)), 2);
  switch (c) {
    case LedgerCase::ResonantSymmetric:
      ledger.case_tag = "resonant-symmetric";
      ledger.aux = 0.5;
      ledger.ba = 0.0;
      ledger.imp = 1.0 / (8.0 * C);
      break;
    case LedgerCase::ResonantDampingOnly: {
      ledger.case_tag = "resonant-damping-only";
      if (std::abs(p) > 1e-9)
        throw ConfigError("added_noise_closed: ResonantDampingOnly needs p = 0");
      const double gr = g_resonant(0.0, d, false);
      const double denom = (1.0 + d) * gr * gr;
      ledger.aux = 0.5 * (1.0 + d) / (1.0 - d);
      ledger.ba = closed_form_reference(dp, ClosedFormCase::OnResonanceBackaction) / denom;
      ledger.imp = 1.0 / (8.0 * Ct) / denom;
      break;
    }
    case LedgerCase::ResonantMatchedExtreme:
      // Published d -> 1, p = -1 expressions. The numeric route through the
      // exact model disagrees with the aux and imp pieces here; see the
      // acceptance suite output.
      ledger.case_tag = "resonant-matched-extreme(published)";
      ledger.aux = 0.5 * (1.0 - d) / (1.0 + d) * (1.0 + d + d * d) *
                   (1.0 + d / std::sqrt(1.0 + d * d));
      ledger.ba = 0.5 * C / (om * om);
      ledger.imp = 3.0 / (128.0 * (std::sqrt(2.0) - 1.0) * C);
      break;
    case LedgerCase::DetunedSymmetric:
      ledger.case_tag = "detuned-symmetric";
      ledger.aux = 0.5;
      ledger.ba = 0.0;
      ledger.imp = 4.0 * D * D / (8.0 * C);
      break;
    case LedgerCase::DetunedCompensated:
      ledger.case_tag = "detuned-compensated";
      ledger.aux = 0.5 * (1.0 - d) / (1.0 + d) * sec2;
      ledger.ba = d * d / (4.0 * D * D * (1.0 + d)) * sec2 * sec2 * C;
      ledger.imp = 4.0 * D * D / (8.0 * C * (1.0 + d));
      break;
  }
  ledger.total = ledger.aux + ledger.ba + ledger.imp;
  return ledger;
}

std::pair<double, double> minimize_over_C(
    const std::function<double(double)>& n_add_of_C, double C_lo, double C_hi) {
  if (!(C_lo > 0.0 && C_hi > C_lo))
    throw ConfigError("minimize_over_C: need 0 < C_lo < C_hi");
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::log10(C_lo), b = std::log10(C_hi);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = n_add_of_C(std::pow(10.0, x1));
  double f2 = n_add_of_C(std::pow(10.0, x2));
  for (int it = 0; it < 200 && (b - a) > 1e-12; ++it) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - phi * (b - a);
      f1 = n_add_of_C(std::pow(10.0, x1));
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + phi * (b - a);
      f2 = n_add_of_C(std::pow(10.0, x2));
    }
  }
  const double C0 = std::pow(10.0, 0.5 * (a + b));
  return {C0, n_add_of_C(C0)};
}

OptimalCooperativity optimal_cooperativity(const DerivedParams& dp,
                                           OptimalCase c, double delta_n) {
  OptimalCooperativity out;
  const double om = dp.omega_n();
  ModelConfig cfg;
  switch (c) {
    case OptimalCase::ResonantMatchedExtreme: {
      const double k = std::sqrt(3.0) / (8.0 * std::sqrt(std::sqrt(2.0) - 1.0));
      out.C0_closed = k * om;
      out.n_min_closed = k / om;
      cfg = {ModelTag::AsymmetricOriginal, Basis::Rotated};
      delta_n = 0.0;
      break;
    }
    case OptimalCase::DetunedCompensated: {
      const double cos2 = std::pow(std::cos(half_angle(dp.p)), 2);
      out.C0_closed =
          4.0 * delta_n * delta_n / (2.0 * std::sqrt(2.0) * std::abs(dp.d)) * cos2;
      const auto lc = added_noise_closed(with_cooperativity(dp, out.C0_closed),
                                         LedgerCase::DetunedCompensated, delta_n);
      out.n_min_closed = lc.total;
      cfg = {ModelTag::AsymmetricCompensated, Basis::Rotated};
      break;
    }
  }
  auto n_of_C = [&](double C) {
    const DerivedParams dpc = with_cooperativity(dp, C);
    const LinearModel model = build(dpc, cfg);
    return added_noise(dpc, model, delta_n).total;
  };
  auto [C0, nmin] = minimize_over_C(n_of_C, out.C0_closed / 30.0,
                                    out.C0_closed * 30.0);
  out.C0_numeric = C0;
  out.n_min_numeric = nmin;
  return out;
}

}  // namespace tmbae
