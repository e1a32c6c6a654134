#pragma once

#include <Eigen/Dense>
#include <optional>

#include "manipsyn/jacobian.hpp"
#include "manipsyn/topology.hpp"

namespace manipsyn {

struct MetricReport {
  double mu = 0.0;       // manipulability of the unscaled Jacobian
  double mu_bar = 0.0;   // product of singular values of the scaled Jacobian
  double kappa = 1.0;    // condition number of the scaled Jacobian (inf if rank-deficient)
  double characteristic_length = 1.0;
  Eigen::VectorXd singular_values;  // of the scaled Jacobian, descending
  bool all_prismatic = false;       // no scaling applied (S = I)
  bool degenerate_scaling = false;  // L = 0: mu_bar undefined, kappa unscaled
};

/// Manipulability sqrt(det(J J^T)) when n_joints > n_task, else
/// sqrt(det(J^T J)); equals the product of singular values. Returns 0 at
/// rank deficiency.
double manipulability(const Eigen::MatrixXd& j);

/// Mean effective distance from the task point: |(r - a) x n| for each
/// revolute/cylindrical joint, |r - a| for each spherical joint; prismatic
/// joints contribute nothing. Throws Error{AllPrismatic} when every joint is
/// prismatic (scaling is not needed in that case).
double characteristic_length(const Topology& t, const Configuration& cfg);

/// Applies S = diag(1/L,...,1/L, 1,...,1) over the first linear_rows rows and
/// reports metrics of the scaled Jacobian. L = nullopt means the
/// all-prismatic case (S = I). L = 0 flags degenerate scaling: kappa falls
/// back to the unscaled Jacobian and mu_bar is NaN.
MetricReport scaled_metrics(const Eigen::MatrixXd& j, std::optional<double> length,
                            int linear_rows);

/// characteristic_length + scaled_metrics in one step, resolving the
/// all-prismatic case internally.
MetricReport evaluate_metrics(const Topology& t, const Configuration& cfg,
                              const Eigen::MatrixXd& j_reduced,
                              TaskSpace task = TaskSpace::Spatial6);

}  // namespace manipsyn
