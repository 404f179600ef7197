#include "tmbae/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tmbae {

using ordered_json = nlohmann::ordered_json;

std::string version() {
#ifdef TMBAE_VERSION
  return "tmbae " TMBAE_VERSION;
#else
  return "tmbae dev";
#endif
}

namespace {

constexpr const char* kHzFields[] = {"omega_a", "omega_b", "kappa", "gamma_a",
                                     "gamma_b", "g_a", "g_b"};

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

SystemParams params_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("params_from_json: parse failure: ") + e.what());
  }
  SystemParams sp;
  auto hz = [&j](const char* key, double& out) {
    if (j.contains(key)) out = j.at(key).get<double>() * kTwoPi;
  };
  hz("omega_a", sp.omega_a);
  hz("omega_b", sp.omega_b);
  hz("kappa", sp.kappa);
  hz("gamma_a", sp.gamma_a);
  hz("gamma_b", sp.gamma_b);
  hz("g_a", sp.g_a);
  hz("g_b", sp.g_b);
  if (j.contains("cbar")) sp.cbar = j.at("cbar").get<double>();
  if (j.contains("nbar_a")) sp.nbar_a = j.at("nbar_a").get<double>();
  if (j.contains("nbar_b")) sp.nbar_b = j.at("nbar_b").get<double>();
  if (j.contains("nbar_c")) sp.nbar_c = j.at("nbar_c").get<double>();
  if (j.contains("eta")) sp.eta = j.at("eta").get<double>();
  if (j.contains("Lambda_override") && !j.at("Lambda_override").is_null())
    sp.Lambda_override = j.at("Lambda_override").get<double>() * kTwoPi;
  for (const char* key : kHzFields)
    if (!j.contains(key))
      throw ConfigError(std::string("params_from_json: missing key ") + key);
  return sp;
}

SystemParams params_from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("params_from_json_file: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return params_from_json(ss.str());
}

std::string params_to_json(const SystemParams& sp) {
  ordered_json j;
  j["omega_a"] = sp.omega_a / kTwoPi;
  j["omega_b"] = sp.omega_b / kTwoPi;
  j["kappa"] = sp.kappa / kTwoPi;
  j["gamma_a"] = sp.gamma_a / kTwoPi;
  j["gamma_b"] = sp.gamma_b / kTwoPi;
  j["g_a"] = sp.g_a / kTwoPi;
  j["g_b"] = sp.g_b / kTwoPi;
  j["cbar"] = sp.cbar;
  j["nbar_a"] = sp.nbar_a;
  j["nbar_b"] = sp.nbar_b;
  j["nbar_c"] = sp.nbar_c;
  j["eta"] = sp.eta;
  if (sp.Lambda_override)
    j["Lambda_override"] = *sp.Lambda_override / kTwoPi;
  else
    j["Lambda_override"] = nullptr;
  return j.dump(2) + "\n";
}

CsvWriter::CsvWriter(std::vector<std::string> columns)
    : columns_(std::move(columns)) {}

void CsvWriter::add_row(const std::vector<double>& values) {
  if (values.size() != columns_.size())
    throw ConfigError("CsvWriter: row width does not match the header");
  rows_.push_back(values);
}

std::string CsvWriter::str() const {
  std::string out;
  for (size_t i = 0; i < columns_.size(); ++i) {
    out += columns_[i];
    out += (i + 1 == columns_.size()) ? '\n' : ',';
  }
  for (const auto& row : rows_) {
    for (size_t i = 0; i < row.size(); ++i) {
      out += format_double(row[i]);
      out += (i + 1 == row.size()) ? '\n' : ',';
    }
  }
  return out;
}

void CsvWriter::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("CsvWriter: cannot open " + path.string());
  out << str();
}

void write_sidecar(const std::filesystem::path& path, const SystemParams& sp,
                   const DerivedParams& dp,
                   const std::vector<std::pair<std::string, std::string>>& extra) {
  ordered_json j;
  j["version"] = version();
  j["system_params_hz"] = ordered_json::parse(params_to_json(sp));
  ordered_json d;
  d["gamma"] = dp.gamma;
  d["Omega"] = dp.Omega;
  d["Omega_tilde"] = dp.Omega_tilde;
  d["kappa"] = dp.kappa;
  d["G"] = dp.G;
  d["G_d"] = dp.G_d;
  d["G_tilde"] = dp.G_tilde;
  d["theta"] = dp.theta;
  d["p"] = dp.p;
  d["d"] = dp.d;
  d["C"] = dp.C;
  d["C_tilde"] = dp.C_tilde;
  d["Gamma"] = dp.Gamma;
  d["nbar_th"] = dp.nbar_th;
  d["nbar_d"] = dp.nbar_d;
  d["nbar_tot"] = dp.nbar_tot;
  d["nbar_c"] = dp.nbar_c;
  d["eta"] = dp.eta;
  d["Lambda"] = dp.Lambda;
  d["d_clamped"] = dp.d_clamped;
  d["units"] = "rad/s";
  j["derived_params"] = d;
  j["fingerprint"] = fingerprint(dp);
  for (const auto& [k, v] : extra) j[k] = v;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("write_sidecar: cannot open " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace tmbae
