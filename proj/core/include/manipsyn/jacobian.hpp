#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "manipsyn/topology.hpp"

namespace manipsyn {

/// Numeric placement of one joint: position plus axis angles. The axis is
/// n = (sin(beta)cos(phi), sin(beta)sin(phi), cos(beta)), unit by
/// construction; spherical joints ignore beta/phi.
struct JointPlacement {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double beta = 0.0;
  double phi = 0.0;

  Eigen::Vector3d axis() const {
    return {std::sin(beta) * std::cos(phi), std::sin(beta) * std::sin(phi), std::cos(beta)};
  }
};

/// Placement of every joint (indexed like Topology::joints) plus the task
/// point the twist is taken about.
struct Configuration {
  std::vector<JointPlacement> joints;
  Eigen::Vector3d task_point = Eigen::Vector3d::Zero();
};

/// Row layout of the assembled system. Spatial6 stacks the full twist
/// (vx,vy,vz,wx,wy,wz); Planar3 keeps (vx,vy,wz) for planar mechanisms whose
/// out-of-plane rows vanish identically.
enum class TaskSpace { Spatial6, Planar3 };

/// Twist contribution of one joint, one column per scalar velocity variable
/// in the joint's canonical component order (theta, d | wx, wy, wz).
/// Rows are (v; w), 6 x arity(kind). direction = -1 flips the sign (joint
/// traversed from link_b to link_a).
Eigen::Matrix<double, 6, Eigen::Dynamic> joint_contribution(JointKind kind, int direction,
                                                            const Eigen::Vector3d& position,
                                                            const Eigen::Vector3d& axis,
                                                            const Eigen::Vector3d& task_point);

/// The assembled velocity-transmission system at one configuration:
///   primary description  {v;w} = J1 * theta_a + J2 * Omega       (first path)
///   loop closure         A1 * theta_a + A2 * Omega = 0           (paths 2..N
///                        minus path 1, v-blocks first, then w-blocks, plus
///                        one trailing row per superfluous assembly)
struct JacobianParts {
  Eigen::MatrixXd J1, J2, A1, A2;
  int task_rows = 6;
  int path_count = 1;
  int superfluous_rows = 0;

  /// No passive-elimination system: single path, every velocity actuated.
  bool serial() const { return path_count == 1 && A2.cols() == 0; }
};

/// Builds the system. Throws Error{NonSquareA2} when the loop-closure row
/// count (after the superfluous fix) differs from the passive-variable count.
/// superfluous_fix = false drops the constraint rows, which reproduces the
/// under-determined system a superfluous DOF causes.
JacobianParts assemble_system(const Topology& t, const Configuration& cfg,
                              TaskSpace task = TaskSpace::Spatial6,
                              bool superfluous_fix = true);

struct ReducedJacobian {
  Eigen::MatrixXd J;  // task_rows x n_active
  double det_a2 = 1.0;
};

/// J~ = J1 - J2 A2^-1 A1 (J~ = J1 for the serial case). Throws
/// Error{SingularA2} at a type-2 singularity: |det(A2)| below
/// 1e-12 * ||A2||_F^n.
ReducedJacobian reduced_jacobian(const JacobianParts& parts);

double singular_a2_tolerance(const Eigen::MatrixXd& a2);

/// Type-2 singularity matrices: A~ = det(A2) I, B~ = J2 adj(A2) A1 - det(A2) J1.
/// Defined even when A2 is singular (adjugate via cofactors). Returns nullopt
/// for serial manipulators, where the system has no A2.
struct Type2Matrices {
  Eigen::MatrixXd A_tilde;  // task_rows x task_rows
  Eigen::MatrixXd B_tilde;  // task_rows x n_active
};

std::optional<Type2Matrices> type2_matrices(const JacobianParts& parts);

/// Adjugate by cofactor expansion; exact at singular input, intended for the
/// small matrices of this domain (n <= 7).
Eigen::MatrixXd adjugate(const Eigen::MatrixXd& m);

}  // namespace manipsyn
