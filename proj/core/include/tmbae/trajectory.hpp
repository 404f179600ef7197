#pragma once

#include <cstdint>

#include "tmbae/closedloop.hpp"

namespace tmbae {

// Counter-based stream: value(k) = mix(base + k * golden). Substreams derived
// from (seed, index) are independent of the parallel schedule, so ensembles
// are reproducible under any thread layout.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  double uniform();  // [0, 1)
  double normal();   // Box-Muller, portable across standard libraries

  static std::uint64_t splitmix64(std::uint64_t x);

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct TrajectoryOptions {
  double duration = 0.0;     // seconds; 0 -> 200 / gamma_tilde
  double dt = 0.0;           // seconds; 0 -> the precondition bound
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;  // substream index within the ensemble
  double alpha = 0.0;
  bool include_pm = true;
  bool zero_noise = false;   // deterministic flow, all increments forced to 0
  // start from a sample of the joint stationary law (removes burn-in bias);
  // disabled automatically for zero-noise runs and explicit initial states
  bool stationary_start = true;
  Vec4 truth0 = Vec4::Zero();
  std::size_t store_stride = 0;  // 0 -> about 2048 stored samples
};

// Time-averaged second moments over the second half of the run, plus
// innovation and record-demodulation statistics.
struct TrajectorySummary {
  std::size_t steps = 0;
  double dt_n = 0.0;           // step in units of 1/gamma
  double gamma_tilde_n = 1.0;  // filter decay rate 1 + 4 eta Gamma V, gamma units
  double truth_x2 = 0.0, truth_p2 = 0.0;
  double est_x2 = 0.0, est_p2 = 0.0;
  double err_x2 = 0.0, err_p2 = 0.0;    // exact filter error
  double rec_err_x2 = 0.0, rec_err_p2 = 0.0;  // record-demodulated estimate
  double innovation_var = 0.0;
  double innovation_lag1 = 0.0;
};

struct TrajectoryRecord {
  std::vector<double> t;  // seconds, subsampled
  std::vector<Vec4> truth;
  std::vector<Vec4> estimate;
  std::vector<double> dr;  // record increment at the stored steps
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double dt = 0.0;  // seconds
  std::string params_hash;
  TrajectorySummary summary;
};

// dt bound from the precondition: min(1/Omega_eff, 1/(gamma (1 + C~)),
// 1/(4 eta Gamma V)) / 50, in seconds.
double default_dt(const DerivedParams& dp, const Mat4& Sigma_ss,
                  const ModelConfig& config);

// Exact-propagator integration of the coupled truth+filter system driven by
// a synthetic homodyne record. The homogeneous flow uses expm(A dt) (plain
// Euler is unstable at the dt bound once Omega^2 dt > gamma); the noise
// injection is Euler-level, keeping weak first order.
TrajectoryRecord simulate(const DerivedParams& dp, const ModelConfig& config,
                          const Mat4& Sigma_ss, const TrajectoryOptions& opts);

std::vector<TrajectoryRecord> ensemble(const DerivedParams& dp,
                                       const ModelConfig& config,
                                       const Mat4& Sigma_ss,
                                       const TrajectoryOptions& opts,
                                       std::size_t n_trajectories);

struct MeanWithError {
  double mean = 0.0;
  double se = 0.0;
};

struct EnsembleStats {
  std::size_t n = 0;
  MeanWithError truth_x2, truth_p2, est_x2, err_x2, rec_duan;
  MeanWithError innovation_var, innovation_lag1;
};

EnsembleStats ensemble_stats(const std::vector<TrajectoryRecord>& records);

// Duan statistic from the demodulated record alone: pooled
// Var(x - X_rec) + Var(p - P_rec). Throws NumericalError when the records are
// shorter than 20 filter time constants.
MeanWithError record_duan_estimate(const std::vector<TrajectoryRecord>& records);

}  // namespace tmbae
