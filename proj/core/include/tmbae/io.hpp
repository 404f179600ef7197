#pragma once

#include <filesystem>

#include "tmbae/params.hpp"

namespace tmbae {

std::string version();

// JSON parameter files use the SystemParams field names with frequencies and
// rates in Hz; conversion to angular units happens here.
SystemParams params_from_json(const std::string& text);
SystemParams params_from_json_file(const std::filesystem::path& path);
std::string params_to_json(const SystemParams& sp);

// Deterministic CSV: header row plus %.17g-formatted values, so identical
// inputs give byte-identical files.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void add_row(const std::vector<double>& values);
  void write(const std::filesystem::path& path) const;
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

// JSON sidecar with the fully resolved parameter set (system + derived), the
// version stamp, the seed, and the parameter fingerprint.
void write_sidecar(const std::filesystem::path& path, const SystemParams& sp,
                   const DerivedParams& dp,
                   const std::vector<std::pair<std::string, std::string>>& extra = {});

}  // namespace tmbae
