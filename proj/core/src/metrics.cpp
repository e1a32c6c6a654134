#include "manipsyn/metrics.hpp"

#include <cmath>
#include <limits>

namespace manipsyn {

double manipulability(const Eigen::MatrixXd& j) {
  const auto nj = j.cols();
  const auto nt = j.rows();
  const Eigen::MatrixXd gram = nj > nt ? Eigen::MatrixXd(j * j.transpose())
                                       : Eigen::MatrixXd(j.transpose() * j);
  const double det = gram.determinant();
  return det > 0 ? std::sqrt(det) : 0.0;
}

double characteristic_length(const Topology& t, const Configuration& cfg) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t k = 0; k < t.joints().size(); ++k) {
    const Joint& joint = t.joints()[k];
    const JointPlacement& place = cfg.joints[k];
    const Eigen::Vector3d offset = place.position - cfg.task_point;
    switch (joint.kind) {
      case JointKind::Revolute:
      case JointKind::Cylindrical:
        sum += offset.cross(place.axis()).norm();
        ++count;
        break;
      case JointKind::Spherical:
        sum += offset.norm();
        ++count;
        break;
      case JointKind::Prismatic:
        break;
    }
  }
  if (count == 0)
    throw Error(ErrorCode::AllPrismatic, "every joint is prismatic; scaling not needed");
  return sum / count;
}

MetricReport scaled_metrics(const Eigen::MatrixXd& j, std::optional<double> length,
                            int linear_rows) {
  MetricReport report;
  report.mu = manipulability(j);

  Eigen::MatrixXd scaled = j;
  if (!length.has_value()) {
    report.all_prismatic = true;
    report.characteristic_length = 1.0;
  } else if (*length <= 0.0) {
    report.degenerate_scaling = true;
    report.characteristic_length = *length;
  } else {
    report.characteristic_length = *length;
    scaled.topRows(linear_rows) /= *length;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
  report.singular_values = svd.singularValues();
  const auto& sv = report.singular_values;
  const double rank_eps = std::numeric_limits<double>::epsilon() * sv.size() * sv(0);
  if (sv(sv.size() - 1) <= rank_eps)
    report.kappa = std::numeric_limits<double>::infinity();
  else
    report.kappa = sv(0) / sv(sv.size() - 1);
  report.mu_bar = sv.prod();
  if (report.degenerate_scaling) report.mu_bar = std::numeric_limits<double>::quiet_NaN();
  return report;
}

MetricReport evaluate_metrics(const Topology& t, const Configuration& cfg,
                              const Eigen::MatrixXd& j_reduced, TaskSpace task) {
  std::optional<double> length;
  try {
    length = characteristic_length(t, cfg);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AllPrismatic) throw;
  }
  return scaled_metrics(j_reduced, length, task == TaskSpace::Planar3 ? 2 : 3);
}

}  // namespace manipsyn
