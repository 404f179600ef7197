#include "tmbae/trajectory.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <complex>
#include <thread>
#include <unsupported/Eigen/MatrixFunctions>

namespace tmbae {

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) {
  base_ = splitmix64(splitmix64(seed) ^ splitmix64(0x9e3779b97f4a7c15ull + stream));
}

std::uint64_t CounterRng::splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double CounterRng::uniform() {
  const std::uint64_t v = splitmix64(base_ + 0x9e3779b97f4a7c15ull * ++counter_);
  return static_cast<double>(v >> 11) * 0x1.0p-53;
}

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(kTwoPi * u2);
  has_spare_ = true;
  return r * std::cos(kTwoPi * u2);
}

namespace {

Mat4 psd_sqrt(const Mat4& m) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(m);
  Vec4 ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double default_dt(const DerivedParams& dp, const Mat4& Sigma_ss,
                  const ModelConfig& config) {
  const LinearModel model = build(dp, config);
  const double om_eff = std::max(model.omega_eff_n(), 1e-12);
  const double gamma_rate = 1.0 + dp.C_tilde;
  const double meas_rate = 4.0 * dp.eta * (dp.Gamma / dp.gamma) * Sigma_ss(0, 0);
  const double bound_n =
      std::min({1.0 / om_eff, 1.0 / gamma_rate, 1.0 / std::max(meas_rate, 1e-12)}) /
      50.0;
  return bound_n / dp.gamma;
}

TrajectoryRecord simulate(const DerivedParams& dp, const ModelConfig& config,
                          const Mat4& Sigma_ss, const TrajectoryOptions& opts) {
  const double Gamma_n = dp.Gamma / dp.gamma;
  if (!(dp.eta * Gamma_n > 0.0))
    throw ConfigError("simulate: measurement rate must be positive");

  const double dt_bound = default_dt(dp, Sigma_ss, config);
  const double dt = opts.dt > 0.0 ? opts.dt : dt_bound;
  if (dt > dt_bound * (1.0 + 1e-9))
    throw ConfigError("simulate: dt exceeds the stability/accuracy bound");

  ClosedLoopModel loop = feedback_model(dp, config, Sigma_ss,
                                        {opts.alpha, opts.include_pm});
  const double dt_n = dt * dp.gamma;
  const Mat8 F = (loop.drift() * dt_n).exp();
  const Mat4 B = psd_sqrt(loop.Ltruth);

  const double V = Sigma_ss(0, 0);
  const double root_meas = std::sqrt(4.0 * dp.eta * Gamma_n);
  const double gain = 4.0 * dp.eta * Gamma_n * V;  // demodulation kernel gain
  const double gamma_tilde = 1.0 + gain;
  const double duration =
      opts.duration > 0.0 ? opts.duration : 200.0 / (gamma_tilde * dp.gamma);
  const std::size_t nsteps =
      static_cast<std::size_t>(std::ceil(duration / dt));
  const std::size_t burn = nsteps / 2;
  const std::size_t stride =
      opts.store_stride > 0 ? opts.store_stride
                            : std::max<std::size_t>(1, nsteps / 2048);

  // demodulate at the effective resonance; decay at half the effective
  // filter rate gamma_tilde = gamma + 4 eta Gamma V
  const LinearModel lin = build(dp, config);
  const std::complex<double> step_phase =
      std::exp(std::complex<double>(-0.5 * gamma_tilde, lin.omega_eff_n()) * dt_n);

  CounterRng rng(opts.seed, opts.stream);
  const double sdt = std::sqrt(dt_n);

  TrajectoryRecord rec;
  rec.seed = opts.seed;
  rec.stream = opts.stream;
  rec.dt = dt;
  rec.params_hash = fingerprint(dp);
  rec.summary.steps = nsteps;
  rec.summary.dt_n = dt_n;
  rec.summary.gamma_tilde_n = gamma_tilde;

  Vec8 y = Vec8::Zero();
  y.tail<4>() = opts.truth0;
  const bool use_stationary = opts.stationary_start && !opts.zero_noise &&
                              opts.truth0.cwiseAbs().maxCoeff() == 0.0;
  if (use_stationary) {
    const Mat8 xi_ss = closedloop_covariance(loop);
    Eigen::SelfAdjointEigenSolver<Mat8> es(xi_ss);
    const Mat8 root = es.eigenvectors() *
                      es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                      es.eigenvectors().transpose();
    Vec8 xi0;
    for (int i = 0; i < 8; ++i) xi0(i) = rng.normal();
    y = root * xi0;
  }
  std::complex<double> z = 0.0;

  double s_tx2 = 0, s_tp2 = 0, s_ex2 = 0, s_ep2 = 0, s_fx2 = 0, s_fp2 = 0;
  double s_rx2 = 0, s_rp2 = 0;
  double s_in2 = 0, s_in_lag = 0, prev_innov = 0;
  std::size_t n_stat = 0, n_lag = 0;

  for (std::size_t k = 0; k < nsteps; ++k) {
    const double dW = opts.zero_noise ? 0.0 : sdt * rng.normal();
    Vec4 xi = Vec4::Zero();
    if (!opts.zero_noise)
      for (int i = 0; i < 4; ++i) xi(i) = sdt * rng.normal();

    const double dr = y(4) * dt_n + dW / root_meas;
    const double innov = root_meas * (dr - y(0) * dt_n) / sdt;

    y = (F * y).eval();
    y.head<4>() += loop.Q * dW;
    y.tail<4>() += B * xi;
    z = z * step_phase + dr;

    if (k % 4096 == 0 && !y.allFinite())
      throw NumericalError("simulate: non-finite state at step " +
                           std::to_string(k));

    if (k % stride == 0) {
      rec.t.push_back((k + 1) * dt);
      rec.estimate.push_back(y.head<4>());
      rec.truth.push_back(y.tail<4>());
      rec.dr.push_back(dr);
    }

    if (k >= burn) {
      const double xr = gain * z.real();
      const double pr = -gain * z.imag();
      s_tx2 += y(4) * y(4);
      s_tp2 += y(5) * y(5);
      s_ex2 += y(0) * y(0);
      s_ep2 += y(1) * y(1);
      s_fx2 += (y(4) - y(0)) * (y(4) - y(0));
      s_fp2 += (y(5) - y(1)) * (y(5) - y(1));
      s_rx2 += (y(4) - xr) * (y(4) - xr);
      s_rp2 += (y(5) - pr) * (y(5) - pr);
      s_in2 += innov * innov;
      if (n_stat > 0) {
        s_in_lag += innov * prev_innov;
        ++n_lag;
      }
      prev_innov = innov;
      ++n_stat;
    }
  }

  if (n_stat == 0) throw ConfigError("simulate: duration too short");
  auto& s = rec.summary;
  s.truth_x2 = s_tx2 / n_stat;
  s.truth_p2 = s_tp2 / n_stat;
  s.est_x2 = s_ex2 / n_stat;
  s.est_p2 = s_ep2 / n_stat;
  s.err_x2 = s_fx2 / n_stat;
  s.err_p2 = s_fp2 / n_stat;
  s.rec_err_x2 = s_rx2 / n_stat;
  s.rec_err_p2 = s_rp2 / n_stat;
  s.innovation_var = s_in2 / n_stat;
  s.innovation_lag1 = n_lag ? (s_in_lag / n_lag) / std::max(s.innovation_var, 1e-300)
                            : 0.0;
  return rec;
}

std::vector<TrajectoryRecord> ensemble(const DerivedParams& dp,
                                       const ModelConfig& config,
                                       const Mat4& Sigma_ss,
                                       const TrajectoryOptions& opts,
                                       std::size_t n_trajectories) {
  std::vector<TrajectoryRecord> out(n_trajectories);
  std::atomic<std::size_t> next{0};
  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(n_trajectories)));
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_trajectories) return;
      TrajectoryOptions o = opts;
      o.stream = i;
      o.store_stride = opts.store_stride > 0 ? opts.store_stride
                                             : std::numeric_limits<std::size_t>::max();
      out[i] = simulate(dp, config, Sigma_ss, o);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 0; i + 1 < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return out;
}

namespace {
MeanWithError mean_se(const std::vector<double>& xs) {
  MeanWithError m;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) m.mean += x;
  m.mean /= n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return m;
}
}  // namespace

EnsembleStats ensemble_stats(const std::vector<TrajectoryRecord>& records) {
  if (records.empty()) throw ConfigError("ensemble_stats: empty ensemble");
  EnsembleStats st;
  st.n = records.size();
  std::vector<double> a, b, c, d, e, f, g;
  for (const auto& r : records) {
    a.push_back(r.summary.truth_x2);
    b.push_back(r.summary.truth_p2);
    c.push_back(r.summary.est_x2);
    d.push_back(r.summary.err_x2);
    e.push_back(r.summary.rec_err_x2 + r.summary.rec_err_p2);
    f.push_back(r.summary.innovation_var);
    g.push_back(r.summary.innovation_lag1);
  }
  st.truth_x2 = mean_se(a);
  st.truth_p2 = mean_se(b);
  st.est_x2 = mean_se(c);
  st.err_x2 = mean_se(d);
  st.rec_duan = mean_se(e);
  st.innovation_var = mean_se(f);
  st.innovation_lag1 = mean_se(g);
  return st;
}

MeanWithError record_duan_estimate(const std::vector<TrajectoryRecord>& records) {
  if (records.empty()) throw ConfigError("record_duan_estimate: empty ensemble");
  std::vector<double> vals;
  for (const auto& r : records) {
    // record length must greatly exceed the filter time constant
    if (r.summary.steps * r.summary.dt_n * r.summary.gamma_tilde_n < 20.0)
      throw NumericalError("record_duan_estimate: record shorter than 20 "
                           "filter time constants");
    vals.push_back(r.summary.rec_err_x2 + r.summary.rec_err_p2);
  }
  return mean_se(vals);
}

}  // namespace tmbae
