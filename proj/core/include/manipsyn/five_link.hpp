#pragma once

#include <Eigen/Dense>

#include "manipsyn/error.hpp"

namespace manipsyn {

/// Planar five-link revolute closed chain described by absolute link angles.
/// Links 2..5 run around the loop from the first grounded pivot; the
/// end-effector is link 4 with the task point at its midpoint, and the two
/// grounded revolute joints (driving links 2 and 5) are actuated.
struct FiveLinkConfig {
  double l2 = 1, l3 = 1, l4 = 1, l5 = 1;          // link lengths
  double theta2 = 0, theta3 = 0, theta4 = 0, theta5 = 0;  // absolute angles
};

/// Closed-form 3x2 Jacobian mapping the two actuated joint rates to
/// (vx, vy, wz) of the task point, derived by static force balance; its
/// transpose maps (Fx, Fy, Mz) to the two actuator torques.
/// Throws Error{SingularConfiguration} when |sin(theta3 - theta4)| < tol.
Eigen::Matrix<double, 3, 2> five_link_jacobian(const FiveLinkConfig& c, double tol = 1e-9);

}  // namespace manipsyn
