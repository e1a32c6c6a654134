#include "manipsyn/jacobian.hpp"

#include <cmath>

namespace manipsyn {

Eigen::Matrix<double, 6, Eigen::Dynamic> joint_contribution(JointKind kind, int direction,
                                                            const Eigen::Vector3d& position,
                                                            const Eigen::Vector3d& axis,
                                                            const Eigen::Vector3d& task_point) {
  Eigen::Matrix<double, 6, Eigen::Dynamic> cols(6, arity(kind));
  const Eigen::Vector3d lever = task_point - position;
  int c = 0;
  for (VelComponent comp : components(kind)) {
    Eigen::Vector3d w, v;
    switch (comp) {
      case VelComponent::ThetaDot:
        w = axis;
        v = axis.cross(lever);
        break;
      case VelComponent::DDot:
        w = Eigen::Vector3d::Zero();
        v = axis;
        break;
      case VelComponent::OmegaX:
      case VelComponent::OmegaY:
      case VelComponent::OmegaZ: {
        w = Eigen::Vector3d::Zero();
        w[static_cast<int>(comp) - static_cast<int>(VelComponent::OmegaX)] = 1.0;
        v = w.cross(lever);
        break;
      }
    }
    cols.col(c).head<3>() = direction * v;
    cols.col(c).tail<3>() = direction * w;
    ++c;
  }
  return cols;
}

namespace {

// Full 6 x n_vars twist matrix of one path, columns in inventory order.
Eigen::MatrixXd path_twist_matrix(const Topology& t, const Configuration& cfg, const Path& path,
                                  const VelocityInventory& inv) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(6, inv.columns());
  for (const PathStep& step : path.steps) {
    const Joint& joint = t.joints()[step.joint];
    const JointPlacement& place = cfg.joints[step.joint];
    auto cols = joint_contribution(joint.kind, step.direction, place.position, place.axis(),
                                   cfg.task_point);
    int c = 0;
    for (VelComponent comp : components(joint.kind)) {
      m.col(inv.column_of({step.joint, comp})) += cols.col(c);
      ++c;
    }
  }
  return m;
}

// Rows of the task layout within the full 6-row twist.
std::vector<int> linear_rows(TaskSpace task) {
  return task == TaskSpace::Planar3 ? std::vector<int>{0, 1} : std::vector<int>{0, 1, 2};
}
std::vector<int> angular_rows(TaskSpace task) {
  return task == TaskSpace::Planar3 ? std::vector<int>{5} : std::vector<int>{3, 4, 5};
}

}  // namespace

JacobianParts assemble_system(const Topology& t, const Configuration& cfg, TaskSpace task,
                              bool superfluous_fix) {
  if (cfg.joints.size() != t.joints().size())
    throw Error(ErrorCode::DimensionMismatch, "configuration does not cover every joint");

  const auto paths = enumerate_paths(t);
  const auto inv = passive_velocity_inventory(t);
  const auto assemblies =
      superfluous_fix ? detect_superfluous(t) : std::vector<SuperfluousAssembly>{};

  const int na = static_cast<int>(inv.active.size());
  const int np = static_cast<int>(inv.passive.size());
  const auto vrows = linear_rows(task);
  const auto wrows = angular_rows(task);
  const int nt = static_cast<int>(vrows.size() + wrows.size());
  const int n_paths = static_cast<int>(paths.size());
  const int m = nt * (n_paths - 1) + static_cast<int>(assemblies.size());

  if (m != np)
    throw Error(ErrorCode::NonSquareA2,
                t.name() + ": " + std::to_string(m) + " closure rows vs " + std::to_string(np) +
                    " passive velocities");

  std::vector<Eigen::MatrixXd> twists;
  twists.reserve(paths.size());
  for (const Path& p : paths) twists.push_back(path_twist_matrix(t, cfg, p, inv));

  JacobianParts parts;
  parts.task_rows = nt;
  parts.path_count = n_paths;
  parts.superfluous_rows = static_cast<int>(assemblies.size());

  Eigen::MatrixXd primary(nt, inv.columns());
  {
    int r = 0;
    for (int row : vrows) primary.row(r++) = twists[0].row(row);
    for (int row : wrows) primary.row(r++) = twists[0].row(row);
  }

  Eigen::MatrixXd closure = Eigen::MatrixXd::Zero(m, inv.columns());
  // Stacked differences (v_i - v_1) for all i, then (w_i - w_1) for all i.
  int r = 0;
  for (int i = 1; i < n_paths; ++i)
    for (int row : vrows) closure.row(r++) = twists[i].row(row) - twists[0].row(row);
  for (int i = 1; i < n_paths; ++i)
    for (int row : wrows) closure.row(r++) = twists[i].row(row) - twists[0].row(row);

  // One row per superfluous assembly: the representative link's absolute
  // angular velocity has no component along the spherical-spherical axis.
  for (const SuperfluousAssembly& sa : assemblies) {
    const Eigen::Vector3d axis_vec = cfg.joints[sa.joint_a].position -
                                     cfg.joints[sa.joint_b].position;
    const Path to_rep = first_path_to_link(t, sa.representative_link);
    for (const PathStep& step : to_rep.steps) {
      const Joint& joint = t.joints()[step.joint];
      const JointPlacement& place = cfg.joints[step.joint];
      auto cols = joint_contribution(joint.kind, step.direction, place.position, place.axis(),
                                     cfg.task_point);
      int c = 0;
      for (VelComponent comp : components(joint.kind)) {
        closure(r, inv.column_of({step.joint, comp})) += cols.col(c).tail<3>().dot(axis_vec);
        ++c;
      }
    }
    ++r;
  }

  parts.J1 = primary.leftCols(na);
  parts.J2 = primary.rightCols(np);
  parts.A1 = closure.leftCols(na);
  parts.A2 = closure.rightCols(np);
  return parts;
}

double singular_a2_tolerance(const Eigen::MatrixXd& a2) {
  if (a2.cols() == 0) return 0.0;
  return 1e-12 * std::pow(a2.norm(), static_cast<double>(a2.cols()));
}

ReducedJacobian reduced_jacobian(const JacobianParts& parts) {
  ReducedJacobian out;
  if (parts.A2.cols() == 0) {
    out.J = parts.J1;
    out.det_a2 = 1.0;  // det of the empty matrix
    return out;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(parts.A2);
  out.det_a2 = lu.determinant();
  if (std::abs(out.det_a2) < singular_a2_tolerance(parts.A2))
    throw Error(ErrorCode::SingularA2, "type-2 singularity: det(A2) = " +
                                           std::to_string(out.det_a2));
  out.J = parts.J1 - parts.J2 * lu.solve(parts.A1);
  return out;
}

Eigen::MatrixXd adjugate(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  if (n == 0) return Eigen::MatrixXd(0, 0);
  if (n == 1) return Eigen::MatrixXd::Ones(1, 1);
  Eigen::MatrixXd adj(n, n);
  Eigen::MatrixXd minor(n - 1, n - 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      int rr = 0;
      for (int r = 0; r < n; ++r) {
        if (r == i) continue;
        int cc = 0;
        for (int c = 0; c < n; ++c) {
          if (c == j) continue;
          minor(rr, cc++) = m(r, c);
        }
        ++rr;
      }
      const double cof = ((i + j) % 2 ? -1.0 : 1.0) * minor.determinant();
      adj(j, i) = cof;  // adj = cofactor matrix transposed
    }
  }
  return adj;
}

std::optional<Type2Matrices> type2_matrices(const JacobianParts& parts) {
  if (parts.serial()) return std::nullopt;
  Type2Matrices out;
  const double det = parts.A2.cols() == 0 ? 1.0 : parts.A2.determinant();
  out.A_tilde = det * Eigen::MatrixXd::Identity(parts.task_rows, parts.task_rows);
  out.B_tilde = parts.J2 * adjugate(parts.A2) * parts.A1 - det * parts.J1;
  return out;
}

}  // namespace manipsyn
