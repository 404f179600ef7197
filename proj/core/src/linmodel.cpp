#include "tmbae/linmodel.hpp"

#include <cmath>

namespace tmbae {

namespace {

Mat4 rotating_block(double om) {
  Mat4 m = Mat4::Zero();
  m(0, 0) = m(1, 1) = m(2, 2) = m(3, 3) = -0.5;
  m(0, 1) = om;
  m(1, 0) = -om;
  m(2, 3) = om;
  m(3, 2) = -om;
  return m;
}

void add_damping_asymmetry(Mat4& m, double d) {
  m(0, 2) = m(2, 0) = m(1, 3) = m(3, 1) = -0.5 * d;
}

Mat4 noise_weights(double d) {
  const double gp = 0.5 * (std::sqrt(1.0 + d) + std::sqrt(1.0 - d));
  const double gm = 0.5 * (std::sqrt(1.0 + d) - std::sqrt(1.0 - d));
  Mat4 n = Mat4::Identity() * gp;
  n(0, 2) = n(2, 0) = n(1, 3) = n(3, 1) = gm;
  return n;
}

}  // namespace

Vec4c ForceWeight::harmonic_vector() const {
  using namespace std::complex_literals;
  Vec4c v;
  v << 1i * c_minus, c_plus, 1i * c_plus, c_minus;
  return -0.5 * v;
}

Mat4 rotation_matrix(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat4 r = Mat4::Zero();
  r(0, 0) = c; r(0, 2) = -s;
  r(1, 1) = c; r(1, 3) = s;
  r(2, 0) = s; r(2, 2) = c;
  r(3, 1) = -s; r(3, 3) = c;
  return r;
}

LinearModel build(const DerivedParams& dp, const ModelConfig& config) {
  constexpr double kSymTol = 1e-12;
  const double om = dp.omega_n();
  const double omt = dp.omega_tilde_n();

  LinearModel model;
  model.config = config;
  model.theta = dp.theta;
  model.gamma = dp.gamma;
  model.p = dp.p;
  model.d = dp.d;
  model.N = noise_weights(dp.d);

  switch (config.tag) {
    case ModelTag::Symmetric: {
      if (std::abs(dp.p) > kSymTol || std::abs(dp.d) > kSymTol)
        throw ConfigError("build: Symmetric tag requires p = 0 and d = 0");
      model.M = rotating_block(om);
      model.ba = {0.0, 0.0, 0.0, -dp.G / dp.gamma};
      model.Omega_eff = dp.Omega;
      break;
    }
    case ModelTag::AsymmetricOriginal: {
      if (config.basis == Basis::Original) {
        model.M = rotating_block(om);
        add_damping_asymmetry(model.M, dp.d);
        model.ba = {0.0, dp.G_d / dp.gamma, 0.0, -dp.G / dp.gamma};
        model.theta = 0.0;  // matrices are expressed on unrotated quadratures
      } else {
        model.M = rotating_block(omt);
        add_damping_asymmetry(model.M, dp.d);
        const double po = dp.p * omt;
        model.M(0, 3) = -po;
        model.M(1, 2) = -po;
        model.M(2, 1) = po;
        model.M(3, 0) = po;
        model.ba = {0.0, 0.0, 0.0, -dp.G_tilde / dp.gamma};
      }
      model.Omega_eff = dp.Omega;
      break;
    }
    case ModelTag::AsymmetricCompensated: {
      if (config.basis == Basis::Original)
        throw ConfigError("build: compensated model is defined on the rotated basis");
      model.M = rotating_block(omt);
      add_damping_asymmetry(model.M, dp.d);
      const double po = dp.p * omt;
      model.M(0, 3) = -po;
      model.M(1, 2) = -po;
      model.M(2, 1) = po;
      model.M(3, 0) = po;
      // Parametric drive Lambda*(P-^2 + P+^2 - X+^2 - X-^2) adds 2*Lambda on
      // the canonical cross slots; Lambda = p*Omega_tilde/2 cancels the
      // couplings into the measured subsystem exactly.
      const double two_lambda = 2.0 * dp.lambda_n();
      model.M(0, 3) += two_lambda;
      model.M(1, 2) += two_lambda;
      model.M(2, 1) += two_lambda;
      model.M(3, 0) += two_lambda;
      model.ba = {0.0, 0.0, 0.0, -dp.G_tilde / dp.gamma};
      model.Omega_eff = dp.Omega_tilde;
      break;
    }
  }
  return model;
}

Mat4c susceptibility(const LinearModel& model, double omega_n) {
  using namespace std::complex_literals;
  Mat4c a = model.M.cast<std::complex<double>>();
  a += 1i * omega_n * Mat4c::Identity();
  Mat4c chi = a.partialPivLu().solve(Mat4c::Identity());
  // one step of iterative refinement keeps the defining residual at rounding
  // level even on resonance
  chi += chi * (Mat4c::Identity() - a * chi);
  const double resid = (a * chi - Mat4c::Identity()).cwiseAbs().maxCoeff();
  const double scale =
      1.0 + a.cwiseAbs().maxCoeff() * chi.cwiseAbs().maxCoeff();
  if (!(resid < 1e-8 * scale))
    throw NumericalError("susceptibility: singular drift at omega/gamma = " +
                         std::to_string(omega_n) + " (residual " +
                         std::to_string(resid) + ")");
  return chi;
}

Mat4c thermal_susceptibility(const LinearModel& model, double omega_n) {
  return susceptibility(model, omega_n) * model.N.cast<std::complex<double>>();
}

ForceWeight force_weight(const DerivedParams& dp) {
  const double c = std::cos(dp.theta), s = std::sin(dp.theta);
  return ForceWeight{dp.theta, c - s, c + s};
}

double stability(const LinearModel& model) {
  Eigen::EigenSolver<Mat4> es(model.M, /*computeEigenvectors=*/false);
  return es.eigenvalues().real().maxCoeff() * model.gamma;
}

}  // namespace tmbae
