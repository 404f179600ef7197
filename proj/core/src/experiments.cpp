#include "tmbae/experiments.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "tmbae/conditional.hpp"
#include "tmbae/sensing.hpp"
#include "tmbae/spectra.hpp"
#include "tmbae/trajectory.hpp"

namespace tmbae {

namespace fs = std::filesystem;

ModelConfig config_for(const DerivedParams& dp, bool compensated) {
  if (compensated) return {ModelTag::AsymmetricCompensated, Basis::Rotated};
  if (std::abs(dp.p) < 1e-12 && std::abs(dp.d) < 1e-12)
    return {ModelTag::Symmetric, Basis::Rotated};
  return {ModelTag::AsymmetricOriginal, Basis::Rotated};
}

namespace {

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) /
                              static_cast<double>(n - 1));
  return g;
}

fs::path prepare_out_dir(const ExperimentSpec& spec) {
  fs::path dir = spec.out_dir;
  if (dir.empty()) {
    if (const char* root = std::getenv("TMBAE_OUTPUT_ROOT")) dir = root;
    else dir = ".";
  }
  fs::create_directories(dir);
  return dir;
}

RunResult run_spectra(const ExperimentSpec& spec, const DerivedParams& dp,
                      const fs::path& dir) {
  const LinearModel model = build(dp, config_for(dp, spec.compensated));
  const SpectrumSeries s = measured_spectrum(model, dp, default_grid(model, dp));
  CsvWriter csv({"omega_over_gamma", "S_th", "S_ba", "S_imp", "S_total"});
  for (size_t i = 0; i < s.omega.size(); ++i)
    csv.add_row({s.omega[i], s.th[i], s.ba[i], s.imp[i], s.total[i]});
  RunResult out;
  out.artifacts.push_back(dir / "spectra.csv");
  csv.write(out.artifacts.back());
  write_sidecar(dir / "spectra.meta.json", spec.params, dp);
  return out;
}

RunResult run_sense(const ExperimentSpec& spec, const DerivedParams& dp,
                    const fs::path& dir) {
  CsvWriter csv({"delta_over_gamma", "n_aux", "n_ba", "n_imp", "n_total",
                 "SQL", "fullQL"});
  const LinearModel model = build(dp, config_for(dp, spec.compensated));
  std::vector<double> deltas = spec.deltas;
  if (spec.sense_case == "resonant") deltas = {0.0};
  if (spec.sense_sweep_C && spec.sense_case != "resonant")
    deltas = log_grid(3.0, 300.0, 41);
  for (double delta : deltas) {
    const AddedNoiseLedger led = added_noise(dp, model, delta);
    const QuantumLimits ql = quantum_limits(delta / (1.0 + dp.d));
    csv.add_row({delta, led.aux, led.ba, led.imp, led.total, ql.standard,
                 ql.full});
  }
  RunResult out;
  out.artifacts.push_back(dir / "sense.csv");
  csv.write(out.artifacts.back());
  write_sidecar(dir / "sense.meta.json", spec.params, dp,
                {{"case", spec.sense_case}});
  return out;
}

RunResult run_conditional(const ExperimentSpec& spec, const DerivedParams& dp,
                          const fs::path& dir) {
  std::vector<double> Cs =
      spec.C_sweep.empty() ? log_grid(0.2, 2e4, 81) : spec.C_sweep;
  CsvWriter csv({"C", "V_Xp", "V_Pm", "duan", "E_N", "entangled"});
  const ModelConfig cfg = config_for(dp, spec.compensated);
  for (double C : Cs) {
    const DerivedParams dpc = with_cooperativity(dp, C);
    const CareResult care = solve_care(sme_coefficients(dpc, cfg));
    const DuanResult du = duan(care.Sigma, dpc.theta);
    const double en = log_negativity(care.Sigma, dpc.theta);
    csv.add_row({C, care.Sigma(0, 0), care.Sigma(1, 1), du.value, en,
                 du.entangled ? 1.0 : 0.0});
  }
  RunResult out;
  out.artifacts.push_back(dir / "conditional.csv");
  csv.write(out.artifacts.back());
  write_sidecar(dir / "conditional.meta.json", spec.params, dp);
  return out;
}

RunResult run_feedback(const ExperimentSpec& spec, const DerivedParams& dp,
                       const fs::path& dir) {
  const ModelConfig cfg = config_for(dp, spec.compensated);
  const CareResult care = solve_care(sme_coefficients(dp, cfg));
  CsvWriter csv({"alpha", "V_fb_Xp", "V_fb_Pm", "V_cond_Xp", "V_cond_Pm"});
  for (double alpha : spec.alphas) {
    const auto vars = closedloop_variances(
        feedback_model(dp, cfg, care.Sigma, {alpha, true}));
    csv.add_row({alpha, vars.vfb_Xp, vars.vfb_Pm, care.Sigma(0, 0),
                 care.Sigma(1, 1)});
  }
  RunResult out;
  out.artifacts.push_back(dir / "feedback.csv");
  csv.write(out.artifacts.back());
  write_sidecar(dir / "feedback.meta.json", spec.params, dp);
  return out;
}

RunResult run_trajectory(const ExperimentSpec& spec, const DerivedParams& dp,
                         const fs::path& dir) {
  const ModelConfig cfg = config_for(dp, spec.compensated);
  const CareResult care = solve_care(sme_coefficients(dp, cfg));
  TrajectoryOptions opts;
  opts.seed = spec.seed;
  opts.duration = spec.duration;
  opts.dt = spec.dt;
  opts.alpha = spec.alpha;
  if (spec.per_trajectory_csv) opts.store_stride = 0;
  const auto records = ensemble(dp, cfg, care.Sigma, opts, spec.n_trajectories);
  const EnsembleStats st = ensemble_stats(records);

  nlohmann::ordered_json j;
  j["n_trajectories"] = st.n;
  j["seed"] = spec.seed;
  j["alpha"] = spec.alpha;
  auto put = [&j](const char* k, const MeanWithError& m) {
    j[k] = {{"mean", m.mean}, {"se", m.se}};
  };
  put("truth_x2", st.truth_x2);
  put("truth_p2", st.truth_p2);
  put("estimate_x2", st.est_x2);
  put("filter_error_x2", st.err_x2);
  put("record_duan", st.rec_duan);
  put("innovation_var", st.innovation_var);
  put("innovation_lag1", st.innovation_lag1);
  j["predictions"] = {{"V_cond_Xp", care.Sigma(0, 0)},
                      {"V_cond_Pm", care.Sigma(1, 1)},
                      {"duan_care", care.Sigma(0, 0) + care.Sigma(1, 1)}};

  RunResult out;
  out.artifacts.push_back(dir / "trajectory_summary.json");
  std::ofstream js(out.artifacts.back(), std::ios::binary);
  js << j.dump(2) << "\n";
  js.close();

  if (spec.per_trajectory_csv) {
    for (size_t i = 0; i < records.size(); ++i) {
      CsvWriter csv({"t", "x_plus", "p_minus", "x_minus", "p_plus",
                     "est_x_plus", "est_p_minus", "dr"});
      const auto& r = records[i];
      for (size_t k = 0; k < r.t.size(); ++k)
        csv.add_row({r.t[k], r.truth[k](0), r.truth[k](1), r.truth[k](2),
                     r.truth[k](3), r.estimate[k](0), r.estimate[k](1),
                     r.dr[k]});
      const fs::path p = dir / ("trajectory_" + std::to_string(i) + ".csv");
      csv.write(p);
      out.artifacts.push_back(p);
    }
  }
  write_sidecar(dir / "trajectory.meta.json", spec.params, dp,
                {{"seed", std::to_string(spec.seed)}});
  return out;
}

RunResult run_model_dump(const ExperimentSpec& spec, const DerivedParams& dp,
                         const fs::path& dir) {
  ModelConfig cfg = config_for(dp, spec.compensated);
  if (spec.original_basis) {
    cfg.tag = ModelTag::AsymmetricOriginal;
    cfg.basis = Basis::Original;
  }
  const LinearModel model = build(dp, cfg);
  nlohmann::ordered_json j;
  j["version"] = version();
  j["tag"] = spec.original_basis ? "asymmetric-original-basis"
             : spec.compensated  ? "compensated"
             : (cfg.tag == ModelTag::Symmetric ? "symmetric" : "asymmetric");
  j["basis_order"] = {"X+", "P-", "X-", "P+"};
  j["units"] = "gamma";
  auto mat = [](const Mat4& m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (int i = 0; i < 4; ++i) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (int k = 0; k < 4; ++k) row.push_back(m(i, k));
      rows.push_back(row);
    }
    return rows;
  };
  j["M"] = mat(model.M);
  j["N"] = mat(model.N);
  j["ba"] = {model.ba(0), model.ba(1), model.ba(2), model.ba(3)};
  j["theta"] = model.theta;
  j["gamma"] = model.gamma;
  j["Omega_eff"] = model.Omega_eff;
  j["spectral_abscissa"] = stability(model);

  RunResult out;
  out.artifacts.push_back(dir / "model.json");
  std::ofstream js(out.artifacts.back(), std::ios::binary);
  js << j.dump(2) << "\n";
  write_sidecar(dir / "model.meta.json", spec.params, dp);
  return out;
}

// --- reproduce targets -----------------------------------------------------

RunResult reproduce_fig_spectra(const ExperimentSpec& spec, const fs::path& dir) {
  // Back-action spectra near +Omega for the reference asymmetry pairs,
  // matched pairs dashed in the original figure.
  const std::vector<std::pair<double, double>> pairs = {
      {0.0, 0.0},  {0.05, 0.025}, {0.05, -0.025}, {0.2, 0.1},
      {0.2, -0.1}, {1.0, 0.414},  {1.0, -0.414}};
  CsvWriter csv({"d", "Gd_over_G", "omega_over_gamma", "S_ba", "S_total"});
  DerivedParams dp_meta{};
  for (auto [d, r] : pairs) {
    DimensionlessSpec ds;
    ds.d = d;
    ds.Gd_over_G = r;
    const SystemParams sp = from_dimensionless(ds);
    const DerivedParams dp = derive(sp);
    dp_meta = dp;
    const ModelConfig cfg = (d == 0.0 && r == 0.0)
                                ? ModelConfig{ModelTag::Symmetric, Basis::Rotated}
                                : ModelConfig{ModelTag::AsymmetricOriginal,
                                              Basis::Rotated};
    const LinearModel model = build(dp, cfg);
    const double om = dp.omega_n();
    for (double w = om - 10.0; w <= om + 10.0 + 1e-9; w += 0.05) {
      const double ba = backaction_spectrum(model, dp.C_tilde, dp.nbar_c, w);
      const double th = thermal_spectrum(model, dp.nbar_th + dp.nbar_d,
                                         dp.nbar_th - dp.nbar_d, w);
      csv.add_row({d, r, w, ba, th + ba + imprecision_level(dp)});
    }
  }
  RunResult out;
  out.artifacts.push_back(dir / "fig_spectra.csv");
  csv.write(out.artifacts.back());
  write_sidecar(dir / "fig_spectra.meta.json", spec.params, dp_meta,
                {{"target", "fig-spectra"}});
  return out;
}

RunResult reproduce_fig_added_noise(const ExperimentSpec& spec,
                                    const fs::path& dir) {
  CsvWriter csv({"gamma_b_over_gamma_a", "d", "n_add_r0", "n_add_r162",
                 "n_add_r414", "n_aux_matched", "n_add_detuned_opt"});
  const std::vector<double> ratios = log_grid(0.02, 50.0, 61);
  DerivedParams dp_meta{};
  for (double x : ratios) {
    const double d = (1.0 - x) / (1.0 + x);
    std::vector<double> row{x, d};
    for (double r : {0.0, -0.162, -0.414}) {
      DimensionlessSpec ds;
      ds.d = d;
      ds.Gd_over_G = r;
      const DerivedParams dp = derive(from_dimensionless(ds));
      dp_meta = dp;
      const ModelConfig cfg{(d == 0.0 && r == 0.0) ? ModelTag::Symmetric
                                                   : ModelTag::AsymmetricOriginal,
                            Basis::Rotated};
      row.push_back(added_noise(dp, build(dp, cfg), 0.0).total);
    }
    {  // aux floor at matched coupling for this damping asymmetry
      DimensionlessSpec ds;
      ds.d = d;
      ds.p = -d;
      const DerivedParams dp = derive(from_dimensionless(ds));
      const ModelConfig cfg{std::abs(d) < 1e-12 ? ModelTag::Symmetric
                                                : ModelTag::AsymmetricOriginal,
                            Basis::Rotated};
      row.push_back(added_noise(dp, build(dp, cfg), 0.0).aux);
    }
    {  // detuned, p = 0, measurement strength optimized (Delta = 100 gamma)
      DimensionlessSpec ds;
      ds.d = d;
      const DerivedParams dp = derive(from_dimensionless(ds));
      row.push_back(std::abs(d) < 1e-6
                        ? 0.5
                        : added_noise_closed(dp, LedgerCase::DetunedCompensated,
                                             100.0)
                              .aux +
                              1.0 / std::sqrt(2.0) * std::abs(d) / (1.0 + d));
    }
    csv.add_row(row);
  }
  RunResult out;
  out.artifacts.push_back(dir / "fig_added_noise.csv");
  csv.write(out.artifacts.back());
  write_sidecar(dir / "fig_added_noise.meta.json", spec.params, dp_meta,
                {{"target", "fig-added-noise"}});
  return out;
}

RunResult reproduce_fig_duan(const ExperimentSpec& spec, const fs::path& dir) {
  CsvWriter csv({"C", "nbar_th", "duan_asymptotic", "duan_care", "V_Xp",
                 "V_Pm", "threshold"});
  const auto Cs = log_grid(0.2, 2e4, 121);
  const DerivedParams dp0 = derive(spec.params);
  for (double nth : {0.0, 1.0, 25.0}) {
    DimensionlessSpec ds;
    ds.nbar_a = ds.nbar_b = nth;
    const SystemParams sp = from_dimensionless(ds);
    for (double C : Cs) {
      const DerivedParams dp = with_cooperativity(derive(sp), C);
      const CareResult care =
          solve_care(sme_coefficients(dp, {ModelTag::Symmetric, Basis::Rotated}));
      csv.add_row({C, nth, duan_asymptotic(C, nth, dp.eta),
                   care.Sigma(0, 0) + care.Sigma(1, 1), care.Sigma(0, 0),
                   care.Sigma(1, 1), entanglement_threshold(nth, dp.eta)});
    }
  }
  RunResult out;
  out.artifacts.push_back(dir / "fig_duan.csv");
  csv.write(out.artifacts.back());
  write_sidecar(dir / "fig_duan.meta.json", spec.params, dp0,
                {{"target", "fig-duan"}});
  return out;
}

RunResult reproduce_fig_duan_asymmetry(const ExperimentSpec& spec,
                                       const fs::path& dir) {
  CsvWriter csv({"Gd_over_G", "nbar_th", "V_Pm_orig", "duan_orig",
                 "V_Pm_comp", "duan_comp", "bound"});
  DerivedParams dp_meta{};
  for (double nth : {0.0, 5.0}) {
    for (double r = -0.875; r <= 0.8751; r += 0.025) {
      DimensionlessSpec ds;
      ds.C = 100.0;
      ds.Gd_over_G = r;
      ds.nbar_a = ds.nbar_b = nth;
      const DerivedParams dp = derive(from_dimensionless(ds));
      dp_meta = dp;
      const ModelTag tag = std::abs(r) < 1e-12 ? ModelTag::Symmetric
                                               : ModelTag::AsymmetricOriginal;
      const CareResult orig =
          solve_care(sme_coefficients(dp, {tag, Basis::Rotated}));
      const ModelTag ctag = std::abs(r) < 1e-12
                                ? ModelTag::Symmetric
                                : ModelTag::AsymmetricCompensated;
      const CareResult comp =
          solve_care(sme_coefficients(dp, {ctag, Basis::Rotated}));
      csv.add_row({r, nth, orig.Sigma(1, 1),
                   orig.Sigma(0, 0) + orig.Sigma(1, 1), comp.Sigma(1, 1),
                   comp.Sigma(0, 0) + comp.Sigma(1, 1),
                   std::cos(2.0 * dp.theta)});
    }
  }
  RunResult out;
  out.artifacts.push_back(dir / "fig_duan_asymmetry.csv");
  csv.write(out.artifacts.back());
  write_sidecar(dir / "fig_duan_asymmetry.meta.json", spec.params, dp_meta,
                {{"target", "fig-duan-asymmetry"}});
  return out;
}

RunResult reproduce_fig_feedback(const ExperimentSpec& spec,
                                 const fs::path& dir) {
  DimensionlessSpec ds;
  ds.Gd_over_G = 0.05;
  ds.nbar_a = ds.nbar_b = 25.0;
  const DerivedParams dp = derive(from_dimensionless(ds));
  const ModelConfig cfg{ModelTag::AsymmetricOriginal, Basis::Rotated};
  const CareResult care = solve_care(sme_coefficients(dp, cfg));
  CsvWriter csv({"alpha", "V_fb_Xp", "V_fb_Pm", "V_cond_Xp", "V_cond_Pm"});
  std::vector<double> alphas{0.0};
  for (double a : log_grid(0.1, 1000.0, 41)) alphas.push_back(a);
  for (double a : alphas) {
    const auto vars =
        closedloop_variances(feedback_model(dp, cfg, care.Sigma, {a, true}));
    csv.add_row({a, vars.vfb_Xp, vars.vfb_Pm, care.Sigma(0, 0),
                 care.Sigma(1, 1)});
  }
  RunResult out;
  out.artifacts.push_back(dir / "fig_feedback.csv");
  csv.write(out.artifacts.back());
  write_sidecar(dir / "fig_feedback.meta.json", spec.params, dp,
                {{"target", "fig-feedback"}});
  return out;
}

}  // namespace

RunResult run(const ExperimentSpec& spec) {
  const fs::path dir = prepare_out_dir(spec);
  const DerivedParams dp = derive(spec.params);
  switch (spec.cmd) {
    case Subcommand::Spectra: return run_spectra(spec, dp, dir);
    case Subcommand::Sense: return run_sense(spec, dp, dir);
    case Subcommand::Conditional: return run_conditional(spec, dp, dir);
    case Subcommand::Feedback: return run_feedback(spec, dp, dir);
    case Subcommand::Trajectory: return run_trajectory(spec, dp, dir);
    case Subcommand::Model: return run_model_dump(spec, dp, dir);
    case Subcommand::Reproduce: {
      if (spec.reproduce_target == "fig-spectra")
        return reproduce_fig_spectra(spec, dir);
      if (spec.reproduce_target == "fig-added-noise")
        return reproduce_fig_added_noise(spec, dir);
      if (spec.reproduce_target == "fig-duan")
        return reproduce_fig_duan(spec, dir);
      if (spec.reproduce_target == "fig-duan-asymmetry")
        return reproduce_fig_duan_asymmetry(spec, dir);
      if (spec.reproduce_target == "fig-feedback")
        return reproduce_fig_feedback(spec, dir);
      throw ConfigError("run: unknown reproduce target '" +
                        spec.reproduce_target + "'");
    }
  }
  throw ConfigError("run: unknown subcommand");
}

}  // namespace tmbae
