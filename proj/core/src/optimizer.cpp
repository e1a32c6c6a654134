#include "manipsyn/optimizer.hpp"

#include <cmath>
#include <limits>

namespace manipsyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double default_fd_step(double requested) {
  return requested > 0 ? requested : std::sqrt(std::numeric_limits<double>::epsilon());
}

}  // namespace

Eigen::VectorXd forward_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double fd_step) {
  const double base = f(x);
  const double step0 = default_fd_step(fd_step);
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (int i = 0; i < x.size(); ++i) {
    const double h = step0 * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    double fp = f(probe);
    if (std::isfinite(fp) && std::isfinite(base)) {
      g[i] = (fp - base) / h;
    } else {
      probe[i] = x[i] - h;
      fp = f(probe);
      g[i] = (std::isfinite(fp) && std::isfinite(base)) ? (base - fp) / h : 0.0;
    }
    probe[i] = x[i];
  }
  return g;
}

OptResult interior_point_minimize(const BoxProblem& problem, const Eigen::VectorXd& x0,
                                  const OptOptions& options) {
  const int n = static_cast<int>(x0.size());
  const int m = 2 * n;  // lower and upper bound inequalities
  const int p = problem.equality_count;

  auto grad = [&](const Eigen::VectorXd& x) {
    return problem.gradient ? problem.gradient(x)
                            : forward_difference_gradient(problem.objective, x, options.fd_step);
  };
  auto eq = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return p > 0 ? problem.equality(x) : Eigen::VectorXd(0);
  };
  auto eq_jac = [&](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    if (p == 0) return Eigen::MatrixXd(0, n);
    if (problem.equality_jacobian) return problem.equality_jacobian(x);
    Eigen::MatrixXd jac(p, n);
    const Eigen::VectorXd h0 = problem.equality(x);
    Eigen::VectorXd probe = x;
    const double step0 = default_fd_step(options.fd_step);
    for (int i = 0; i < n; ++i) {
      const double h = step0 * std::max(1.0, std::abs(x[i]));
      probe[i] = x[i] + h;
      jac.col(i) = (problem.equality(probe) - h0) / h;
      probe[i] = x[i];
    }
    return jac;
  };

  // g(x) = [lower - x; x - upper] <= 0 with constant Jacobian [-I; I].
  auto ineq = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(m);
    g.head(n) = problem.lower - x;
    g.tail(n) = x - problem.upper;
    return g;
  };
  Eigen::MatrixXd grad_g(m, n);
  grad_g << -Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Identity(n, n);

  // Clip strictly inside the box.
  Eigen::VectorXd x = x0;
  for (int i = 0; i < n; ++i) {
    const double margin = 1e-8 * (problem.upper[i] - problem.lower[i]);
    x[i] = std::min(std::max(x[i], problem.lower[i] + margin), problem.upper[i] - margin);
  }

  Eigen::VectorXd s = -ineq(x);
  double c = options.barrier_initial;
  Eigen::VectorXd y = (c * s.cwiseInverse()).cwiseMax(1e-10);  // inequality multipliers
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(p);

  Eigen::MatrixXd hess = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g_obj = grad(x);
  double f_val = problem.objective(x);

  auto kkt_residual = [&](double barrier) {
    Eigen::VectorXd r_x = g_obj + grad_g.transpose() * y;
    if (p > 0) r_x += eq_jac(x).transpose() * lambda;
    const Eigen::VectorXd r_s = s.cwiseProduct(y).array() - barrier;
    const Eigen::VectorXd r_g = ineq(x) + s;
    double norm = std::max(r_x.lpNorm<Eigen::Infinity>(), r_s.lpNorm<Eigen::Infinity>());
    if (p > 0) norm = std::max(norm, eq(x).lpNorm<Eigen::Infinity>());
    return std::max(norm, r_g.lpNorm<Eigen::Infinity>());
  };

  auto merit = [&](const Eigen::VectorXd& xx, const Eigen::VectorXd& ss, double barrier,
                   double rho) {
    const double fv = problem.objective(xx);
    if (!std::isfinite(fv)) return kInf;
    if ((ss.array() <= 0).any()) return kInf;
    double phi = fv - barrier * ss.array().log().sum();
    phi += rho * (ineq(xx) + ss).lpNorm<1>();
    if (p > 0) phi += rho * eq(xx).lpNorm<1>();
    return std::isfinite(phi) ? phi : kInf;
  };

  OptResult result;
  int total_iters = 0;
  bool step_tol_hit = false;
  bool solver_breakdown = false;
  bool out_of_iterations = false;

  while (true) {
    const double inner_tol = std::max(0.1 * c, options.tol.function);
    for (int inner = 0; inner < options.max_inner_iterations; ++inner) {
      if (total_iters >= options.max_iterations) {
        out_of_iterations = true;
        break;
      }
      if (kkt_residual(c) <= inner_tol) break;

      const Eigen::MatrixXd grad_h = eq_jac(x);

      // Perturbed KKT system in (dx, ds, dlambda, dy).
      const int dim = n + m + p + m;
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dim, dim);
      Eigen::VectorXd rhs(dim);
      kkt.block(0, 0, n, n) = hess;
      if (p > 0) {
        kkt.block(0, n + m, n, p) = grad_h.transpose();
        kkt.block(n + m, 0, p, n) = grad_h;
      }
      kkt.block(0, n + m + p, n, m) = grad_g.transpose();
      kkt.block(n, n, m, m).diagonal() = y;
      kkt.block(n, n + m + p, m, m).diagonal() = s;
      kkt.block(n + m + p, 0, m, n) = grad_g;
      kkt.block(n + m + p, n, m, m).diagonal().setOnes();

      Eigen::VectorXd r_x = g_obj + grad_g.transpose() * y;
      if (p > 0) r_x += grad_h.transpose() * lambda;
      rhs.segment(0, n) = -r_x;
      rhs.segment(n, m) = -(s.cwiseProduct(y).array() - c).matrix();
      if (p > 0) rhs.segment(n + m, p) = -eq(x);
      rhs.segment(n + m + p, m) = -(ineq(x) + s);

      const Eigen::VectorXd d = kkt.partialPivLu().solve(rhs);
      if (!d.allFinite()) {
        solver_breakdown = true;
        break;
      }
      const Eigen::VectorXd dx = d.segment(0, n);
      const Eigen::VectorXd ds = d.segment(n, m);
      const Eigen::VectorXd dl = p > 0 ? Eigen::VectorXd(d.segment(n + m, p)) : Eigen::VectorXd(0);
      const Eigen::VectorXd dy = d.segment(n + m + p, m);

      // Fraction-to-boundary caps: s + a ds >= (1 - tau) s, same rule for y.
      const double tau = options.boundary_fraction;
      double alpha_s = 1.0, alpha_y = 1.0;
      for (int i = 0; i < m; ++i) {
        if (ds[i] < 0) alpha_s = std::min(alpha_s, -tau * s[i] / ds[i]);
        if (dy[i] < 0) alpha_y = std::min(alpha_y, -tau * y[i] / dy[i]);
      }

      const double rho = 10.0 * std::max(1.0, y.lpNorm<Eigen::Infinity>());
      const double phi0 = merit(x, s, c, rho);
      double alpha = alpha_s;
      bool accepted = false;
      for (int bt = 0; bt < 40 && alpha > 0; ++bt) {
        if (merit(x + alpha * dx, s + alpha * ds, c, rho) < phi0) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;  // stalled at this barrier level; shrink and retry

      const Eigen::VectorXd x_prev = x;
      const Eigen::VectorXd g_prev = g_obj;
      x += alpha * dx;
      s += alpha * ds;
      y += alpha_y * dy;
      if (p > 0) lambda += alpha_y * dl;
      y = y.cwiseMax(1e-14);

      f_val = problem.objective(x);
      g_obj = grad(x);
      ++total_iters;

      // BFGS update of the Lagrangian Hessian approximation.
      const Eigen::VectorXd step_vec = x - x_prev;
      const Eigen::VectorXd y_vec = g_obj - g_prev;
      const double sy = y_vec.dot(step_vec);
      if (y_vec.allFinite() && sy > 1e-10 * step_vec.norm() * y_vec.norm()) {
        const Eigen::VectorXd hs = hess * step_vec;
        const double shs = step_vec.dot(hs);
        if (shs > 0) hess += y_vec * y_vec.transpose() / sy - hs * hs.transpose() / shs;
      }

      if ((alpha * dx).lpNorm<Eigen::Infinity>() < options.tol.step) {
        step_tol_hit = true;
        break;
      }
    }
    if (step_tol_hit || solver_breakdown || out_of_iterations) break;
    if (c <= options.barrier_min) break;
    c = std::max(c * options.barrier_shrink, options.barrier_min);
  }

  result.x = x;
  result.f = f_val;
  result.iterations = total_iters;
  result.kkt_residual = kkt_residual(options.barrier_min);
  if (result.kkt_residual <= options.tol.function) {
    result.status = OptStatus::Converged;
    result.converged = true;
  } else if (step_tol_hit) {
    result.status = OptStatus::StepTolerance;
    result.converged = true;  // progress exhausted; MATLAB-style normal exit
  } else if (solver_breakdown) {
    result.status = OptStatus::LineSearchFailure;
  } else {
    result.status = OptStatus::MaxIterations;
  }
  return result;
}

}  // namespace manipsyn
