#include "tmbae/params.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>

namespace tmbae {

namespace {
constexpr double kDampingClamp = 1.0 - 1e-6;

void require_positive(std::vector<Diagnostic>& out, double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    out.push_back({Severity::Error, "positivity",
                   std::string(name) + " must be positive and finite"});
}
}  // namespace

double sideband_amplitude(double drive_amplitude, double omega_m, double kappa) {
  if (!(drive_amplitude >= 0.0))
    throw std::domain_error("sideband_amplitude: drive amplitude must be >= 0");
  if (!(omega_m > 0.0) || !(kappa > 0.0))
    throw std::domain_error("sideband_amplitude: omega_m and kappa must be > 0");
  return drive_amplitude / std::hypot(omega_m, 0.5 * kappa);
}

std::vector<Diagnostic> validate(const SystemParams& sp) {
  std::vector<Diagnostic> out;
  require_positive(out, sp.omega_a, "omega_a");
  require_positive(out, sp.omega_b, "omega_b");
  require_positive(out, sp.kappa, "kappa");
  require_positive(out, sp.gamma_a, "gamma_a");
  require_positive(out, sp.gamma_b, "gamma_b");
  require_positive(out, sp.g_a, "g_a");
  require_positive(out, sp.g_b, "g_b");
  if (!(sp.cbar >= 0.0))
    out.push_back({Severity::Error, "positivity", "cbar must be >= 0"});
  if (!(sp.omega_a > sp.omega_b))
    out.push_back({Severity::Error, "ordering", "omega_a must exceed omega_b"});
  for (auto [v, name] : {std::pair{sp.nbar_a, "nbar_a"},
                         std::pair{sp.nbar_b, "nbar_b"},
                         std::pair{sp.nbar_c, "nbar_c"}}) {
    if (!(v >= 0.0))
      out.push_back({Severity::Error, "occupation",
                     std::string(name) + " must be >= 0"});
  }
  if (!(sp.eta > 0.0) || !(sp.eta <= 1.0))
    out.push_back({Severity::Error, "efficiency", "eta must lie in (0, 1]"});
  if (has_errors(out)) return out;

  const double omega_m = sp.omega_m();
  if (omega_m < 10.0 * sp.kappa)
    out.push_back({Severity::Warning, "resolved-sideband",
                   "omega_m / kappa < 10; resolved-sideband assumption is weak"});

  // Good-measurement regime: kappa must exceed the Hamiltonian rates so the
  // cavity can be adiabatically eliminated.
  const double cbar = sp.cbar;
  const double G = std::sqrt(2.0) * (sp.g_a + sp.g_b) * cbar;
  const double G_d = std::sqrt(2.0) * (sp.g_b - sp.g_a) * cbar;
  const double theta = std::atan2(G_d, G);
  const double Omega = 0.5 * (sp.omega_a - sp.omega_b);
  const double p = std::tan(2.0 * theta);
  const double Omega_tilde = Omega * std::cos(2.0 * theta);
  const double G_tilde = G / std::cos(theta);
  const double fastest = std::max({Omega, std::abs(p) * Omega_tilde, G_tilde});
  if (sp.kappa <= fastest)
    out.push_back({Severity::Warning, "good-measurement",
                   "kappa does not exceed max(Omega, |p|*Omega_tilde, G_tilde)"});
  const double dd = (sp.gamma_a - sp.gamma_b) / (sp.gamma_a + sp.gamma_b);
  if (std::abs(dd) > kDampingClamp)
    out.push_back({Severity::Warning, "damping-clamp",
                   "|d| exceeds 1 - 1e-6 and will be clamped"});
  return out;
}

DerivedParams derive(const SystemParams& sp) {
  auto diags = validate(sp);
  if (has_errors(diags)) {
    std::string msg = "derive: invalid SystemParams:";
    for (const auto& d : diags)
      if (d.severity == Severity::Error) msg += " [" + d.message + "]";
    throw ConfigError(msg);
  }

  DerivedParams dp;
  dp.gamma = 0.5 * (sp.gamma_a + sp.gamma_b);
  dp.Omega = 0.5 * (sp.omega_a - sp.omega_b);
  dp.kappa = sp.kappa;
  dp.G = std::sqrt(2.0) * (sp.g_a + sp.g_b) * sp.cbar;
  dp.G_d = std::sqrt(2.0) * (sp.g_b - sp.g_a) * sp.cbar;
  dp.theta = std::atan2(dp.G_d, dp.G);
  dp.p = std::tan(2.0 * dp.theta);
  dp.Omega_tilde = dp.Omega * std::cos(2.0 * dp.theta);
  dp.G_tilde = dp.G / std::cos(dp.theta);
  const double d_raw = (sp.gamma_a - sp.gamma_b) / (sp.gamma_a + sp.gamma_b);
  dp.d = std::clamp(d_raw, -kDampingClamp, kDampingClamp);
  dp.d_clamped = dp.d != d_raw;
  dp.C = 2.0 * dp.G * dp.G / (dp.gamma * sp.kappa);
  dp.C_tilde = 2.0 * dp.G_tilde * dp.G_tilde / (dp.gamma * sp.kappa);
  dp.Gamma = 2.0 * dp.G_tilde * dp.G_tilde / sp.kappa;
  dp.nbar_th = 0.5 * (sp.nbar_a + sp.nbar_b);
  dp.nbar_d = 0.5 * (sp.nbar_a - sp.nbar_b);
  dp.nbar_tot = dp.nbar_th + 0.5;
  dp.nbar_c = sp.nbar_c;
  dp.eta = sp.eta;
  dp.Lambda = sp.Lambda_override ? *sp.Lambda_override
                                 : 0.5 * dp.p * dp.Omega_tilde;
  return dp;
}

DerivedParams with_cooperativity(const DerivedParams& dp, double C_new) {
  if (!(C_new > 0.0)) throw ConfigError("with_cooperativity: C must be > 0");
  DerivedParams out = dp;
  const double scale = std::sqrt(C_new / dp.C);
  out.G *= scale;
  out.G_d *= scale;
  out.G_tilde *= scale;
  out.C = C_new;
  out.C_tilde = dp.C_tilde * C_new / dp.C;
  out.Gamma = dp.Gamma * C_new / dp.C;
  return out;
}

std::string fingerprint(const DerivedParams& dp) {
  const double fields[] = {dp.gamma, dp.Omega, dp.kappa, dp.G, dp.G_d,
                           dp.theta, dp.d, dp.C, dp.nbar_th, dp.nbar_d,
                           dp.nbar_c, dp.eta, dp.Lambda};
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  for (double f : fields) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(f));
    std::memcpy(&bits, &f, sizeof(bits));
    mix(bits);
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SystemParams from_dimensionless(const DimensionlessSpec& spec) {
  if (!(spec.C > 0.0)) throw ConfigError("from_dimensionless: C must be > 0");
  if (!(std::abs(spec.d) <= 1.0))
    throw ConfigError("from_dimensionless: |d| must be <= 1");

  // tan(theta) = G_d/G fixes the single-photon coupling split.
  double r;
  if (spec.Gd_over_G) {
    r = *spec.Gd_over_G;
  } else {
    r = std::tan(0.5 * std::atan(spec.p));
  }
  if (!(std::abs(r) < 1.0))
    throw ConfigError("from_dimensionless: |G_d/G| must be < 1");

  const double G = std::sqrt(0.5 * spec.C * spec.gamma * spec.kappa);
  const double g0 = G / (2.0 * std::sqrt(2.0) * spec.cbar);

  SystemParams sp;
  const double dc = std::clamp(spec.d, -(1.0 - 1e-6), 1.0 - 1e-6);
  sp.gamma_a = spec.gamma * (1.0 + dc);
  sp.gamma_b = spec.gamma * (1.0 - dc);
  sp.g_a = g0 * (1.0 - r);
  sp.g_b = g0 * (1.0 + r);
  sp.cbar = spec.cbar;
  sp.kappa = spec.kappa;
  const double Omega = spec.Omega_over_gamma * spec.gamma;
  sp.omega_a = spec.omega_m + Omega;
  sp.omega_b = spec.omega_m - Omega;
  sp.nbar_a = spec.nbar_a;
  sp.nbar_b = spec.nbar_b;
  sp.nbar_c = spec.nbar_c;
  sp.eta = spec.eta;
  if (spec.Lambda_over_gamma)
    sp.Lambda_override = *spec.Lambda_over_gamma * spec.gamma;
  return sp;
}

}  // namespace tmbae
