#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

namespace manipsyn {

/// Minimization problem over a box, with optional smooth equality
/// constraints. The gradient is optional; forward finite differences are
/// used when absent. The objective may return +inf to reject a point
/// (treated as a line-search rejection, never a crash).
struct BoxProblem {
  std::function<double(const Eigen::VectorXd&)> objective;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;  // optional
  Eigen::VectorXd lower, upper;

  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> equality;  // h(x) = 0, optional
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> equality_jacobian;  // optional
  int equality_count = 0;
};

struct Tolerances {
  double constraint = 1e-6;
  double function = 1e-6;
  double step = 1e-10;
};

struct OptOptions {
  Tolerances tol;
  double barrier_initial = 0.1;   // c0
  double barrier_shrink = 0.1;    // c <- c * shrink per outer round
  double barrier_min = 1e-9;
  double boundary_fraction = 0.995;  // tau in the fraction-to-boundary rule
  int max_iterations = 400;          // total Newton iterations
  int max_inner_iterations = 60;     // per barrier value
  double fd_step = 0.0;              // 0 -> sqrt(machine epsilon)
};

enum class OptStatus { Converged, StepTolerance, MaxIterations, LineSearchFailure };

struct OptResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
  double kkt_residual = 0.0;
  OptStatus status = OptStatus::MaxIterations;
};

/// Log-barrier interior-point minimizer with slack variables, a BFGS
/// approximation of the Lagrangian Hessian, Newton steps on the perturbed
/// KKT system and a fraction-to-boundary line search. x0 is clipped strictly
/// inside the box if needed.
OptResult interior_point_minimize(const BoxProblem& problem, const Eigen::VectorXd& x0,
                                  const OptOptions& options = {});

/// Forward finite-difference gradient, step fd_step * max(1, |x_i|)
/// (backward fallback when the forward point evaluates to +inf).
Eigen::VectorXd forward_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double fd_step = 0.0);

}  // namespace manipsyn
