#include "tmbae/closedloop.hpp"

#include <cmath>

namespace tmbae {

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A,
                               const Eigen::MatrixXd& RHS) {
  const auto n = A.rows();
  if (A.cols() != n || RHS.rows() != n || RHS.cols() != n)
    throw ConfigError("solve_lyapunov: dimension mismatch");
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/false);
  if (es.eigenvalues().real().maxCoeff() >= 0.0)
    throw std::domain_error("solve_lyapunov: drift is not Hurwitz");

  // vec(A X + X A^T) = (I (x) A + A (x) I) vec(X), column-major stacking
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
  for (Eigen::Index j = 0; j < n; ++j)
    K.block(j * n, j * n, n, n) += A;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index r = 0; r < n; ++r)
        K(r + i * n, r + j * n) += A(i, j);

  const auto lu = K.partialPivLu();
  auto solve_once = [&](const Eigen::MatrixXd& rhs_mat) {
    Eigen::VectorXd rhs(n * n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) rhs(i + j * n) = -rhs_mat(i, j);
    const Eigen::VectorXd v = lu.solve(rhs);
    Eigen::MatrixXd x(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) x(i, j) = v(i + j * n);
    return x;
  };

  Eigen::MatrixXd X = solve_once(RHS);
  X = 0.5 * (X + X.transpose()).eval();
  // one step of iterative refinement pushes the residual to rounding level
  Eigen::MatrixXd R = A * X + X * A.transpose() + RHS;
  X += solve_once(R);
  X = 0.5 * (X + X.transpose()).eval();

  // backward-error criterion: the residual of a correctly rounded solution
  // scales with ||A|| ||X||
  const double resid = (A * X + X * A.transpose() + RHS).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, X.cwiseAbs().maxCoeff()) *
                       (1.0 + A.cwiseAbs().maxCoeff());
  if (!(resid <= 1e-11 * scale))
    throw NumericalError("solve_lyapunov: residual " + std::to_string(resid) +
                         " misses the contract");
  return X;
}

Mat4 estimate_fluctuations(const Mat4& M, const Mat4& Sigma, double eta,
                           double Gamma_n) {
  const Vec4 q = std::sqrt(4.0 * eta * Gamma_n) * Sigma.col(0);
  return solve_lyapunov(M, q * q.transpose());
}

VarianceReport total_variance(const DerivedParams& dp,
                              const ModelConfig& config) {
  const SMECoefficients sme = sme_coefficients(dp, config);
  const CareResult care = solve_care(sme);
  const Mat4 fluct =
      estimate_fluctuations(sme.M, care.Sigma, sme.eta, sme.Gamma_n);
  VarianceReport rep;
  rep.conditional = care.Sigma.diagonal();
  rep.estimate_fluct = fluct.diagonal();
  rep.total = rep.conditional + rep.estimate_fluct;
  return rep;
}

Mat8 ClosedLoopModel::diffusion() const {
  Mat8 d = Mat8::Zero();
  d.topLeftCorner<4, 4>() = Q * Q.transpose();
  d.bottomRightCorner<4, 4>() = Ltruth;
  return d;
}

ClosedLoopModel feedback_model(const DerivedParams& dp,
                               const ModelConfig& config, const Mat4& Sigma_ss,
                               const FeedbackOptions& options) {
  if (options.alpha < 0.0)
    throw std::domain_error("feedback_model: alpha must be >= 0");
  const SMECoefficients sme = sme_coefficients(dp, config);

  ClosedLoopModel model;
  model.options = options;
  model.theta = sme.theta;
  model.Q = std::sqrt(4.0 * sme.eta * sme.Gamma_n) * Sigma_ss.col(0);
  model.Ltruth = sme.diffusion();

  Mat4 F = Mat4::Zero();
  F(0, 0) = 0.5 * options.alpha;
  if (options.include_pm) F(1, 1) = 0.5 * options.alpha;

  const double root = std::sqrt(4.0 * sme.eta * sme.Gamma_n);
  Mat4 innovation = Mat4::Zero();
  innovation.col(0) = root * model.Q;  // rank-1 coupling through the record

  // dY = -S Y + noise; estimates couple to the truth only through the record.
  model.S.topLeftCorner<4, 4>() = -sme.M + F + innovation;
  model.S.topRightCorner<4, 4>() = -innovation;
  model.S.bottomLeftCorner<4, 4>() = F;
  model.S.bottomRightCorner<4, 4>() = -sme.M;
  return model;
}

Mat8 closedloop_covariance(const ClosedLoopModel& model) {
  return solve_lyapunov(model.drift(), model.diffusion());
}

ClosedLoopVariances closedloop_variances(const ClosedLoopModel& model) {
  const Mat8 xi = closedloop_covariance(model);
  return {xi(4, 4), xi(5, 5), xi(0, 0), xi(1, 1)};
}

std::pair<double, double> feedback_force_profile(const DerivedParams& dp,
                                                 double alpha, double Xbar,
                                                 double Pbar, double omega_m,
                                                 double t) {
  const double c = std::cos(dp.theta), s = std::sin(dp.theta);
  const double amp = alpha * dp.gamma / std::sqrt(2.0);
  const double sin_t = std::sin(omega_m * t), cos_t = std::cos(omega_m * t);
  const double fa = amp * (c - s) * Xbar * sin_t + amp * (c + s) * Pbar * cos_t;
  const double fb = amp * (c + s) * Xbar * sin_t + amp * (c - s) * Pbar * cos_t;
  return {fa, fb};
}

}  // namespace tmbae
