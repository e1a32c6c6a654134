#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "manipsyn/jacobian.hpp"
#include "manipsyn/metrics.hpp"
#include "manipsyn/optimizer.hpp"
#include "manipsyn/topology.hpp"

namespace manipsyn {

/// Packing of a topology's free placement parameters into one vector:
/// per joint (declaration order) the position r = (x, y, z) in [0, 10],
/// then beta in [0, pi] and phi in [0, 2*pi] for every axis-bearing joint.
class DesignLayout {
 public:
  explicit DesignLayout(const Topology& t);

  int size() const { return static_cast<int>(lower_.size()); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }

  Configuration unpack(const Eigen::VectorXd& x, const Eigen::Vector3d& task_point) const;
  Eigen::VectorXd pack(const Configuration& cfg) const;

 private:
  std::vector<bool> joint_has_axis_;
  Eigen::VectorXd lower_, upper_;
};

struct SynthesisOptions {
  int n_restarts = 100;                // step-1 multistart size
  double shortlist_cond_max = 1000.0;  // step-1 screen on cond(A~)
  double shortlist_sigma_min = 1e-2;   // step-1 screen on sigma_min(A~)
  std::uint64_t rng_seed = 0;
  Tolerances tol;
  double fd_step = 0.0;          // 0 -> sqrt(machine epsilon)
  int fallback_restart_cap = 50;  // step-3/4 fresh-guess budget
  int max_iterations = 400;       // per local minimization
  double placement_bound = 10.0;  // joints confined to [0, bound]^3
};

/// f1 = sqrt(det(J~^T J~)), negated for minimization; +inf sentinel when the
/// configuration sits at a type-2 singularity (A2 not invertible).
double objective_f1(const Topology& t, const DesignLayout& layout, const Eigen::VectorXd& x,
                    const Eigen::Vector3d& task_point);
double objective_f1(const Topology& t, const Eigen::VectorXd& x,
                    const Eigen::Vector3d& task_point);

/// f2 = sqrt(det(A~^T A~) det(B~^T B~)), negated; finite even at det(A2) = 0.
/// Throws Error{SerialTopology} when the topology has no loop-closure system.
double objective_f2(const Topology& t, const DesignLayout& layout, const Eigen::VectorXd& x,
                    const Eigen::Vector3d& task_point);
double objective_f2(const Topology& t, const Eigen::VectorXd& x,
                    const Eigen::Vector3d& task_point);

enum class ObjectiveTag { F1, F2 };

struct RestartDiagnostics {
  int f1_restarts = 0;
  int f1_converged = 0;
  int f1_shortlisted = 0;
  int f2_attempts = 0;
  int f2_passed = 0;
};

struct SynthesisResult {
  std::string topology;
  Eigen::VectorXd design;  // packed DesignLayout vector
  double mu = 0.0;
  double mu_bar = 0.0;
  double kappa = 1.0;
  double characteristic_length = 0.0;
  ObjectiveTag objective = ObjectiveTag::F1;
  std::vector<std::string> active_joints;  // "joint:component" labels
  RestartDiagnostics diagnostics;
  bool failed = false;
  std::string failure;
};

/// The four-step multi-start strategy:
///   1. maximize f1 from n_restarts uniform draws; shortlist optima whose
///      A~ passes the conditioning screen (screen omitted for serial
///      topologies);
///   2. the best shortlisted point (by f1) wins;
///   3. otherwise maximize f2 from fresh draws (budget fallback_restart_cap),
///      keeping optima whose reduced Jacobian passes cond < 1000 and
///      sigma_min > 1e-2;
///   4. the best passing point (by f2) wins; none -> Error{ExhaustedRestarts}.
/// Deterministic for a fixed seed; restarts are seed-indexed up front.
SynthesisResult multi_start_synthesize(const Topology& t, const Eigen::Vector3d& task_point,
                                       const SynthesisOptions& opts);

/// Runs synthesis over every catalog entry (failures recorded per entry, the
/// batch continues). Per-topology RNG streams are derived from the seed and
/// the topology name, so results do not depend on catalog order.
/// Throws Error{EmptyCatalog} on an empty input.
std::vector<SynthesisResult> run_catalog(const std::vector<Topology>& catalog,
                                         const Eigen::Vector3d& task_point,
                                         const SynthesisOptions& opts);

struct PrescriptionRow {
  SynthesisResult result;
  int serial_number = 0;  // 1-based position after the mu_bar sort
  int rank_kappa = 0;     // 1-based rank by ascending kappa
};

struct Prescription {
  std::vector<PrescriptionRow> rows;
};

/// Sorts by scaled manipulability descending (ties by name) and assigns the
/// condition-number rank index over the non-failed rows. Full-precision
/// values are ranked; rounding happens only at serialization.
Prescription rank_prescription(std::vector<SynthesisResult> results);

struct LinkSegment {
  std::string link;
  std::string label;  // "jointA-jointB" or "joint-a" for end-effector spans
  double length = 0.0;
};

/// Pairwise joint-to-joint distances per link, plus joint-to-task-point
/// distances for the end-effector link.
std::vector<LinkSegment> derive_link_lengths(const Topology& t, const DesignLayout& layout,
                                             const Eigen::VectorXd& x,
                                             const Eigen::Vector3d& task_point);
std::vector<LinkSegment> derive_link_lengths(const Topology& t, const Eigen::VectorXd& x,
                                             const Eigen::Vector3d& task_point);

}  // namespace manipsyn
