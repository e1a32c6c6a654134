#include "manipsyn/five_link.hpp"

#include <cmath>

namespace manipsyn {

Eigen::Matrix<double, 3, 2> five_link_jacobian(const FiveLinkConfig& c, double tol) {
  using std::cos;
  using std::sin;
  const double denom = sin(c.theta3 - c.theta4);
  if (std::abs(denom) < tol)
    throw Error(ErrorCode::SingularConfiguration,
                "links 3 and 4 are parallel: sin(theta3 - theta4) = " + std::to_string(denom));

  Eigen::Matrix<double, 3, 2> j;
  j(0, 0) = c.l2 * sin(c.theta4) * sin(c.theta2 - c.theta3) / (2 * denom);
  j(1, 0) = -c.l2 * sin(c.theta2 - c.theta3) * cos(c.theta4) / (2 * denom);
  j(2, 0) = c.l2 * sin(c.theta2 - c.theta3) / (c.l4 * denom);
  j(0, 1) = c.l5 *
            (cos(-c.theta3 + c.theta4 + c.theta5) / 2 - cos(c.theta3 - c.theta4 + c.theta5) +
             cos(c.theta3 + c.theta4 - c.theta5) / 2) /
            (2 * denom);
  j(1, 1) = c.l5 *
            (sin(-c.theta3 + c.theta4 + c.theta5) / 2 - sin(c.theta3 - c.theta4 + c.theta5) +
             sin(c.theta3 + c.theta4 - c.theta5) / 2) /
            (2 * denom);
  j(2, 1) = -c.l5 * sin(c.theta3 - c.theta5) / (c.l4 * denom);
  return j;
}

}  // namespace manipsyn
