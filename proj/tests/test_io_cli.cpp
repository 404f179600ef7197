#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "tmbae/experiments.hpp"

using namespace tmbae;
using Catch::Approx;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() / ("tmbae_test_" + tag);
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("parameter JSON round trip", "[io]") {
  SystemParams sp = from_dimensionless({});
  sp.nbar_a = 3.25;
  sp.Lambda_override = kTwoPi * 17.0;
  const std::string text = params_to_json(sp);
  const SystemParams back = params_from_json(text);
  CHECK(back.omega_a == Approx(sp.omega_a).epsilon(1e-14));
  CHECK(back.kappa == Approx(sp.kappa).epsilon(1e-14));
  CHECK(back.g_a == Approx(sp.g_a).epsilon(1e-14));
  CHECK(back.nbar_a == 3.25);
  REQUIRE(back.Lambda_override.has_value());
  CHECK(*back.Lambda_override == Approx(kTwoPi * 17.0).epsilon(1e-14));
}

TEST_CASE("parameter JSON units and errors", "[io]") {
  const SystemParams sp =
      params_from_json(R"({"omega_a": 10020000, "omega_b": 9980000,
        "kappa": 200000, "gamma_a": 100, "gamma_b": 100,
        "g_a": 25, "g_b": 25, "cbar": 1000})");
  CHECK(sp.kappa == Approx(kTwoPi * 200e3).epsilon(1e-14));
  CHECK(sp.eta == 1.0);  // default
  CHECK_THROWS_AS(params_from_json("{\"omega_a\": 1}"), ConfigError);
  CHECK_THROWS_AS(params_from_json("not json"), ConfigError);
}

TEST_CASE("CSV writer is deterministic", "[io]") {
  CsvWriter a({"x", "y"});
  a.add_row({1.0, 0.1234567890123456789});
  a.add_row({-2.5e-300, 3.0});
  CsvWriter b({"x", "y"});
  b.add_row({1.0, 0.1234567890123456789});
  b.add_row({-2.5e-300, 3.0});
  CHECK(a.str() == b.str());
  CHECK(a.str().substr(0, 4) == "x,y\n");
  CHECK_THROWS_AS(a.add_row({1.0}), ConfigError);
}

TEST_CASE("experiment runs write byte-identical artifacts", "[io][cli]") {
  TempDir dir("spectra");
  ExperimentSpec spec;
  spec.cmd = Subcommand::Spectra;
  spec.params = from_dimensionless({});
  spec.out_dir = dir.path;
  const RunResult r1 = run(spec);
  REQUIRE(!r1.artifacts.empty());
  const std::string first = slurp(r1.artifacts.front());
  const RunResult r2 = run(spec);
  CHECK(slurp(r2.artifacts.front()) == first);
  CHECK(first.substr(0, first.find('\n')) ==
        "omega_over_gamma,S_th,S_ba,S_imp,S_total");
  // sidecar embeds the resolved parameters and version stamp
  const std::string meta = slurp(dir.path / "spectra.meta.json");
  CHECK(meta.find("\"version\"") != std::string::npos);
  CHECK(meta.find("\"fingerprint\"") != std::string::npos);
  CHECK(meta.find("\"system_params_hz\"") != std::string::npos);
}

TEST_CASE("sense run emits the ledger columns", "[io][cli]") {
  TempDir dir("sense");
  ExperimentSpec spec;
  spec.cmd = Subcommand::Sense;
  spec.sense_case = "detuned";
  DimensionlessSpec ds;
  ds.Omega_over_gamma = 2000.0;
  spec.params = from_dimensionless(ds);
  spec.out_dir = dir.path;
  const RunResult r = run(spec);
  const std::string csv = slurp(r.artifacts.front());
  CHECK(csv.substr(0, csv.find('\n')) ==
        "delta_over_gamma,n_aux,n_ba,n_imp,n_total,SQL,fullQL");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);  // header + 5 deltas
}

TEST_CASE("model dump carries the matrices", "[io][cli]") {
  TempDir dir("model");
  ExperimentSpec spec;
  spec.cmd = Subcommand::Model;
  DimensionlessSpec ds;
  ds.p = 0.1;
  ds.d = 0.2;
  spec.params = from_dimensionless(ds);
  spec.out_dir = dir.path;
  run(spec);
  const std::string j = slurp(dir.path / "model.json");
  CHECK(j.find("\"M\"") != std::string::npos);
  CHECK(j.find("\"N\"") != std::string::npos);
  CHECK(j.find("\"ba\"") != std::string::npos);
  CHECK(j.find("\"spectral_abscissa\"") != std::string::npos);
}

TEST_CASE("config_for picks the tag from the parameters", "[io][cli]") {
  CHECK(config_for(derive(from_dimensionless({})), false).tag ==
        ModelTag::Symmetric);
  DimensionlessSpec ds;
  ds.d = 0.1;
  CHECK(config_for(derive(from_dimensionless(ds)), false).tag ==
        ModelTag::AsymmetricOriginal);
  CHECK(config_for(derive(from_dimensionless(ds)), true).tag ==
        ModelTag::AsymmetricCompensated);
}

TEST_CASE("unknown reproduce target is a configuration error", "[io][cli]") {
  ExperimentSpec spec;
  spec.cmd = Subcommand::Reproduce;
  spec.reproduce_target = "fig-nonsense";
  spec.params = from_dimensionless({});
  TempDir dir("badrep");
  spec.out_dir = dir.path;
  CHECK_THROWS_AS(run(spec), ConfigError);
}

TEST_CASE("fig-duan data set has the advertised crossings", "[io][cli]") {
  TempDir dir("duan");
  ExperimentSpec spec;
  spec.cmd = Subcommand::Reproduce;
  spec.reproduce_target = "fig-duan";
  spec.params = from_dimensionless({});
  spec.out_dir = dir.path;
  run(spec);
  std::ifstream in(dir.path / "fig_duan.csv");
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "C,nbar_th,duan_asymptotic,duan_care,V_Xp,V_Pm,threshold");
  // locate the asymptotic-statistic crossing of 1 per temperature
  std::map<double, double> crossing;
  std::map<double, std::pair<double, double>> prev;  // nth -> (C, duan)
  std::string line;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::vector<double> v;
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
    REQUIRE(v.size() == 7);
    const double C = v[0], nth = v[1], du = v[2];
    auto it = prev.find(nth);
    if (it != prev.end() && it->second.second > 1.0 && du <= 1.0) {
      // log-linear interpolation of the crossing
      const double c0 = it->second.first, d0 = it->second.second;
      const double f = (d0 - 1.0) / (d0 - du);
      crossing[nth] = c0 * std::pow(C / c0, f);
    }
    prev[nth] = {C, du};
  }
  REQUIRE(crossing.size() == 3);
  CHECK(crossing[0.0] == Approx(1.0).epsilon(0.05));
  CHECK(crossing[1.0] == Approx(3.0).epsilon(0.05));
  CHECK(crossing[25.0] == Approx(51.0).epsilon(0.05));
}
