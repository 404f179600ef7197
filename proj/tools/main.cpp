// Command-line front end: parameter ingestion, experiment orchestration, and
// figure-level data reproduction. Exit codes: 0 success, 2 configuration
// error, 3 numerical failure.

#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "tmbae/experiments.hpp"

namespace {

struct CommonFlags {
  std::string params_file;
  std::string out_dir;
  std::uint64_t seed = 1;

  // dimensionless conveniences (rebuild the parameter set on the baseline)
  std::optional<double> C, Omega, p, gd_over_g, d, nth, eta;
  std::optional<double> nbar_a, nbar_b, nbar_c;
  std::optional<double> lambda_over_gamma;

  // direct physical overrides, Hz at the boundary
  std::optional<double> kappa_hz, gamma_a_hz, gamma_b_hz, g_a_hz, g_b_hz;
  std::optional<double> omega_a_hz, omega_b_hz, cbar;

  bool compensated = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--params", f.params_file, "JSON parameter file (Hz)");
  app->add_option("--out", f.out_dir,
                  "output directory (default $TMBAE_OUTPUT_ROOT or .)");
  app->add_option("--seed", f.seed, "RNG seed for stochastic runs");
  app->add_flag("--compensated", f.compensated,
                "use the parametrically compensated configuration");

  app->add_option("--C", f.C, "cooperativity");
  app->add_option("--Omega", f.Omega, "Omega / gamma");
  app->add_option("--p", f.p, "coupling asymmetry p = tan(2 theta)");
  app->add_option("--gd-over-g", f.gd_over_g, "G_d / G (overrides --p)");
  app->add_option("--d", f.d, "damping asymmetry");
  app->add_option("--nth", f.nth, "thermal occupation for both baths");
  app->add_option("--eta", f.eta, "homodyne efficiency");
  app->add_option("--nbar-a", f.nbar_a, "bath occupation a");
  app->add_option("--nbar-b", f.nbar_b, "bath occupation b");
  app->add_option("--nbar-c", f.nbar_c, "cavity bath occupation");
  app->add_option("--lambda", f.lambda_over_gamma,
                  "parametric drive Lambda / gamma (default exact compensation)");

  app->add_option("--kappa", f.kappa_hz, "cavity linewidth (Hz)");
  app->add_option("--gamma-a", f.gamma_a_hz, "damping a (Hz)");
  app->add_option("--gamma-b", f.gamma_b_hz, "damping b (Hz)");
  app->add_option("--g-a", f.g_a_hz, "single-photon coupling a (Hz)");
  app->add_option("--g-b", f.g_b_hz, "single-photon coupling b (Hz)");
  app->add_option("--omega-a", f.omega_a_hz, "mechanical frequency a (Hz)");
  app->add_option("--omega-b", f.omega_b_hz, "mechanical frequency b (Hz)");
  app->add_option("--cbar", f.cbar, "sideband amplitude (dimensionless)");
}

tmbae::SystemParams resolve_params(const CommonFlags& f) {
  using namespace tmbae;
  SystemParams sp;
  DimensionlessSpec ds;  // reference-device baseline
  if (!f.params_file.empty()) {
    sp = params_from_json_file(f.params_file);
    const DerivedParams dp = derive(sp);
    ds.C = dp.C;
    ds.Omega_over_gamma = dp.Omega / dp.gamma;
    ds.Gd_over_G = dp.G != 0.0 ? dp.G_d / dp.G : 0.0;
    ds.d = dp.d;
    ds.nbar_a = sp.nbar_a;
    ds.nbar_b = sp.nbar_b;
    ds.nbar_c = sp.nbar_c;
    ds.eta = sp.eta;
    ds.gamma = dp.gamma;
    ds.kappa = dp.kappa;
    ds.omega_m = sp.omega_m();
    ds.cbar = sp.cbar;
  }
  const bool dimensionless_given = f.C || f.Omega || f.p || f.gd_over_g ||
                                   f.d || f.nth || f.eta || f.nbar_a ||
                                   f.nbar_b || f.nbar_c || f.lambda_over_gamma;
  if (dimensionless_given || f.params_file.empty()) {
    if (f.C) ds.C = *f.C;
    if (f.Omega) ds.Omega_over_gamma = *f.Omega;
    if (f.p) { ds.p = *f.p; ds.Gd_over_G.reset(); }
    if (f.gd_over_g) ds.Gd_over_G = *f.gd_over_g;
    if (f.d) ds.d = *f.d;
    if (f.nth) ds.nbar_a = ds.nbar_b = *f.nth;
    if (f.nbar_a) ds.nbar_a = *f.nbar_a;
    if (f.nbar_b) ds.nbar_b = *f.nbar_b;
    if (f.nbar_c) ds.nbar_c = *f.nbar_c;
    if (f.eta) ds.eta = *f.eta;
    if (f.lambda_over_gamma) ds.Lambda_over_gamma = *f.lambda_over_gamma;
    sp = from_dimensionless(ds);
  }
  // direct physical overrides win last
  if (f.kappa_hz) sp.kappa = *f.kappa_hz * kTwoPi;
  if (f.gamma_a_hz) sp.gamma_a = *f.gamma_a_hz * kTwoPi;
  if (f.gamma_b_hz) sp.gamma_b = *f.gamma_b_hz * kTwoPi;
  if (f.g_a_hz) sp.g_a = *f.g_a_hz * kTwoPi;
  if (f.g_b_hz) sp.g_b = *f.g_b_hz * kTwoPi;
  if (f.omega_a_hz) sp.omega_a = *f.omega_a_hz * kTwoPi;
  if (f.omega_b_hz) sp.omega_b = *f.omega_b_hz * kTwoPi;
  if (f.cbar) sp.cbar = *f.cbar;
  return sp;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-mode back-action-evading measurement simulator"};
  app.require_subcommand(1);

  CommonFlags flags;
  tmbae::ExperimentSpec spec;

  auto* sc_spectra = app.add_subcommand("spectra", "noise spectra CSV");
  add_common(sc_spectra, flags);

  auto* sc_sense = app.add_subcommand("sense", "force-sensing added noise");
  add_common(sc_sense, flags);
  sc_sense->add_option("--case", spec.sense_case, "resonant|detuned");
  sc_sense->add_option("--deltas", spec.deltas,
                       "detunings delta/gamma to evaluate")
      ->delimiter(',');
  sc_sense->add_flag("--sweep", spec.sense_sweep_C,
                     "dense logarithmic detuning sweep instead of --deltas");

  auto* sc_cond = app.add_subcommand("conditional", "Riccati sweep over C");
  add_common(sc_cond, flags);
  sc_cond->add_option("--C-values", spec.C_sweep, "explicit C grid")
      ->delimiter(',');

  auto* sc_fb = app.add_subcommand("feedback", "closed-loop variances");
  add_common(sc_fb, flags);
  sc_fb->add_option("--alphas", spec.alphas, "feedback gains")->delimiter(',');

  auto* sc_traj = app.add_subcommand("trajectory", "stochastic trajectories");
  add_common(sc_traj, flags);
  sc_traj->add_option("-n,--n-trajectories", spec.n_trajectories,
                      "ensemble size");
  sc_traj->add_option("--duration", spec.duration, "trajectory length (s)");
  sc_traj->add_option("--dt", spec.dt, "time step (s)");
  sc_traj->add_option("--alpha", spec.alpha, "feedback gain");
  sc_traj->add_flag("--per-traj-csv", spec.per_trajectory_csv,
                    "also write one CSV per trajectory");

  auto* sc_rep = app.add_subcommand("reproduce", "figure-level data sets");
  add_common(sc_rep, flags);
  sc_rep
      ->add_option("target", spec.reproduce_target,
                   "fig-spectra|fig-added-noise|fig-duan|fig-duan-asymmetry|"
                   "fig-feedback")
      ->required();

  auto* sc_model = app.add_subcommand("model", "dump M, N, ba as JSON");
  add_common(sc_model, flags);
  sc_model->add_flag("--original-basis", spec.original_basis,
                     "emit the unrotated asymmetric matrices");

  auto* sc_val = app.add_subcommand("validate", "check a parameter set");
  add_common(sc_val, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    spec.params = resolve_params(flags);
    spec.out_dir = flags.out_dir;
    spec.seed = flags.seed;
    spec.compensated = flags.compensated;

    if (sc_val->parsed()) {
      const auto diags = tmbae::validate(spec.params);
      for (const auto& d : diags)
        std::cout << (d.severity == tmbae::Severity::Error ? "error" : "warning")
                  << " [" << d.code << "] " << d.message << "\n";
      if (tmbae::has_errors(diags)) return 2;
      std::cout << "ok\n";
      return 0;
    }

    if (sc_spectra->parsed()) spec.cmd = tmbae::Subcommand::Spectra;
    else if (sc_sense->parsed()) spec.cmd = tmbae::Subcommand::Sense;
    else if (sc_cond->parsed()) spec.cmd = tmbae::Subcommand::Conditional;
    else if (sc_fb->parsed()) spec.cmd = tmbae::Subcommand::Feedback;
    else if (sc_traj->parsed()) spec.cmd = tmbae::Subcommand::Trajectory;
    else if (sc_rep->parsed()) spec.cmd = tmbae::Subcommand::Reproduce;
    else if (sc_model->parsed()) spec.cmd = tmbae::Subcommand::Model;

    const auto result = tmbae::run(spec);
    for (const auto& path : result.artifacts)
      std::cout << path.string() << "\n";
    return 0;
  } catch (const tmbae::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const tmbae::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
