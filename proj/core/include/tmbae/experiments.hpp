#pragma once

#include <filesystem>

#include "tmbae/io.hpp"
#include "tmbae/linmodel.hpp"

namespace tmbae {

enum class Subcommand {
  Spectra,
  Sense,
  Conditional,
  Feedback,
  Trajectory,
  Reproduce,
  Model,
};

struct ExperimentSpec {
  Subcommand cmd = Subcommand::Spectra;
  SystemParams params;
  std::filesystem::path out_dir;
  std::uint64_t seed = 1;

  bool compensated = false;       // use the compensated configuration
  bool original_basis = false;    // model dump only

  // sense
  std::string sense_case = "resonant";  // resonant|detuned
  std::vector<double> deltas{0.0, 10.0, 30.0, 100.0, 300.0};
  bool sense_sweep_C = false;

  // conditional
  std::vector<double> C_sweep;  // empty -> log grid 0.2 .. 2e4

  // feedback
  std::vector<double> alphas{0.0, 1.0, 3.0, 10.0, 30.0, 100.0};

  // trajectory
  std::size_t n_trajectories = 100;
  double duration = 0.0;  // seconds; 0 -> default
  double dt = 0.0;        // seconds; 0 -> default
  double alpha = 0.0;
  bool per_trajectory_csv = false;

  std::string reproduce_target;  // fig-spectra|fig-added-noise|fig-duan|
                                 // fig-duan-asymmetry|fig-feedback
};

struct RunResult {
  std::vector<std::filesystem::path> artifacts;
};

// Executes the experiment and writes CSV artifacts plus JSON sidecars into
// out_dir. Throws ConfigError for invalid specs and NumericalError when a
// solver misses its contract; the CLI maps these to exit codes 2 and 3.
RunResult run(const ExperimentSpec& spec);

// Configuration implied by the parameter set: symmetric when p = d = 0,
// otherwise the rotated asymmetric model (compensated on request).
ModelConfig config_for(const DerivedParams& dp, bool compensated);

}  // namespace tmbae
