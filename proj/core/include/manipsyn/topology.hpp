#pragma once

#include <string>
#include <vector>

#include "manipsyn/error.hpp"

namespace manipsyn {

enum class JointKind { Revolute, Prismatic, Cylindrical, Spherical };

/// Scalar joint-velocity components. A joint of a given kind exposes a fixed
/// set: R -> {ThetaDot}, P -> {DDot}, C -> {ThetaDot, DDot},
/// S -> {OmegaX, OmegaY, OmegaZ} (relative angular velocity in world axes).
enum class VelComponent { ThetaDot, DDot, OmegaX, OmegaY, OmegaZ };

int arity(JointKind kind);
const std::vector<VelComponent>& components(JointKind kind);
bool has_axis(JointKind kind);  // spherical joints carry a position only

const char* to_string(JointKind kind);
const char* to_string(VelComponent c);

/// A joint connects link_a to link_b; joint rates are measured as motion of
/// link_b relative to link_a, so traversing b->a flips the contribution sign.
struct Joint {
  std::string id;
  JointKind kind = JointKind::Revolute;
  int link_a = -1;
  int link_b = -1;
};

struct ActuatedSelector {
  int joint = -1;
  VelComponent component = VelComponent::ThetaDot;

  friend bool operator==(const ActuatedSelector&, const ActuatedSelector&) = default;
};

/// Raw, unvalidated topology description as read from a topology file.
struct RawTopology {
  std::string name;
  int dof = 0;  // catalog metadata, not recomputed
  std::vector<std::string> links;
  struct RawJoint {
    std::string id;
    std::string kind;  // "revolute" | "prismatic" | "cylindrical" | "spherical"
    std::string link_a, link_b;
  };
  std::vector<RawJoint> joints;
  std::string base;
  std::string end_effector;
  struct RawActuated {
    std::string joint;
    std::string component;  // "theta" | "d" | "wx" | "wy" | "wz"
  };
  std::vector<RawActuated> actuated;
};

/// Validated kinematic graph: an undirected multigraph of links and typed
/// joints with a base link, an end-effector link and an actuated velocity set.
/// Immutable after construction.
class Topology {
 public:
  const std::string& name() const { return name_; }
  int dof() const { return dof_; }
  const std::vector<std::string>& links() const { return links_; }
  const std::vector<Joint>& joints() const { return joints_; }
  int base() const { return base_; }
  int end_effector() const { return end_effector_; }
  const std::vector<ActuatedSelector>& actuated() const { return actuated_; }

  int link_index(const std::string& id) const;   // -1 when unknown
  int joint_index(const std::string& id) const;  // -1 when unknown
  bool is_actuated(int joint, VelComponent c) const;

  /// Serial in the paper's sense: every joint fully actuated and a single
  /// base->end-effector path, so no passive-elimination system exists.
  bool is_serial() const;

  friend Topology build_topology(const RawTopology& raw);

 private:
  Topology() = default;

  std::string name_;
  int dof_ = 0;
  std::vector<std::string> links_;
  std::vector<Joint> joints_;
  int base_ = -1;
  int end_effector_ = -1;
  std::vector<ActuatedSelector> actuated_;
};

/// Validates a raw description into a Topology.
/// Throws Error with DisconnectedGraph, UnknownLink, DuplicateJointId or
/// InvalidActuationSelector on contract violations.
Topology build_topology(const RawTopology& raw);

/// One base->end-effector connecting path: alternating links and joints,
/// with the traversal direction recorded per joint.
struct PathStep {
  int joint = -1;
  int direction = +1;  // +1 when traversed link_a -> link_b
};

struct Path {
  std::vector<int> links;       // starts at base, ends at end-effector
  std::vector<PathStep> steps;  // links.size() == steps.size() + 1
};

/// All simple base->end-effector paths, ordered lexicographically by the
/// joint-index sequence (joint declaration order). The first path is the
/// primary velocity description used for J1/J2.
std::vector<Path> enumerate_paths(const Topology& t);

/// First simple base->target path under the same ordering; used to express
/// the absolute angular velocity of an interior link.
Path first_path_to_link(const Topology& t, int target_link);

struct VelocityVar {
  int joint = -1;
  VelComponent component = VelComponent::ThetaDot;

  friend bool operator==(const VelocityVar&, const VelocityVar&) = default;
};

/// Deterministic split of every scalar joint velocity into the actuated set
/// and the passive remainder. Active variables keep the actuated-list order.
/// Passive variables are grouped by component type (translational d-dot
/// first, then theta-dot, then spherical omega triplets) and ordered by the
/// joint's link pair within each group; this matches the stacked-system
/// column convention used throughout.
struct VelocityInventory {
  std::vector<VelocityVar> active;
  std::vector<VelocityVar> passive;

  int columns() const { return static_cast<int>(active.size() + passive.size()); }
  /// Column of a variable in the [active | passive] block layout; -1 if absent.
  int column_of(const VelocityVar& v) const;
};

VelocityInventory passive_velocity_inventory(const Topology& t);

/// A connected set of links attached to the rest of the mechanism through
/// exactly two spherical joints. Its spin about the axis through the two
/// joint centres does not move the end-effector and must be constrained out.
struct SuperfluousAssembly {
  std::vector<int> links;        // sorted link indices, base/end-effector excluded
  int joint_a = -1, joint_b = -1;  // the bounding spherical joints
  int representative_link = -1;    // link whose absolute angular velocity is constrained
};

/// Finds every maximal such assembly (2-edge-cut search over spherical joint
/// pairs). Deterministic: assemblies sorted by their bounding joint indices.
std::vector<SuperfluousAssembly> detect_superfluous(const Topology& t);

}  // namespace manipsyn
