#pragma once

#include "tmbae/conditional.hpp"

namespace tmbae {

// Solves A X + X A^T = -RHS by a dense Kronecker linear solve (n <= 8).
// A must be Hurwitz; RHS symmetric PSD gives symmetric PSD X. Throws
// std::domain_error for non-Hurwitz A, NumericalError if the residual
// exceeds 1e-11 * max(1, ||X||_inf).
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A,
                               const Eigen::MatrixXd& RHS);

// Second moments of the best-estimate vector: M Sb + Sb M^T = -Q Q^T with
// Q = sqrt(4 eta Gamma) * (first column of Sigma).
Mat4 estimate_fluctuations(const Mat4& M, const Mat4& Sigma, double eta,
                           double Gamma_n);

struct VarianceReport {
  Vec4 conditional = Vec4::Zero();
  Vec4 estimate_fluct = Vec4::Zero();
  Vec4 total = Vec4::Zero();  // conditional + estimate_fluct, elementwise
};

VarianceReport total_variance(const DerivedParams& dp,
                              const ModelConfig& config);

struct FeedbackOptions {
  double alpha = 0.0;            // feedback gain, in units of gamma/2 damping
  bool include_pm = true;        // also damp the P- estimate component
};

// Coupled estimate+truth Ornstein-Uhlenbeck model, basis
// (Xbar+, Pbar-, Xbar-, Pbar+ | x+, p-, x-, p+), gamma = 1 units.
// Convention: dY = -S Y dt + (noise), diffusion() is the noise covariance
// rate with the shared measurement Wiener accounted once.
struct ClosedLoopModel {
  Mat8 S = Mat8::Zero();
  Vec4 Q = Vec4::Zero();          // measurement noise weights on the estimates
  Mat4 Ltruth = Mat4::Zero();     // mechanical + back-action diffusion
  FeedbackOptions options;
  double theta = 0.0;

  Mat8 drift() const { return -S; }
  Mat8 diffusion() const;
};

ClosedLoopModel feedback_model(const DerivedParams& dp,
                               const ModelConfig& config, const Mat4& Sigma_ss,
                               const FeedbackOptions& options);

// Full 8x8 stationary covariance; truth-block diagonal entries are the
// closed-loop variances V^fb.
Mat8 closedloop_covariance(const ClosedLoopModel& model);

struct ClosedLoopVariances {
  double vfb_Xp = 0.0;
  double vfb_Pm = 0.0;
  double est_Xp = 0.0;
  double est_Pm = 0.0;
};

ClosedLoopVariances closedloop_variances(const ClosedLoopModel& model);

// Lab-frame feedback forces on oscillators a and b at time t for given
// estimates (diagnostic; the covariance math stays in the rotating frame).
std::pair<double, double> feedback_force_profile(const DerivedParams& dp,
                                                 double alpha, double Xbar,
                                                 double Pbar, double omega_m,
                                                 double t);

}  // namespace tmbae
