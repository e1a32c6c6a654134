#include "manipsyn/topology.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace manipsyn {

int arity(JointKind kind) {
  switch (kind) {
    case JointKind::Revolute:
    case JointKind::Prismatic:
      return 1;
    case JointKind::Cylindrical:
      return 2;
    case JointKind::Spherical:
      return 3;
  }
  return 0;
}

const std::vector<VelComponent>& components(JointKind kind) {
  static const std::vector<VelComponent> r{VelComponent::ThetaDot};
  static const std::vector<VelComponent> p{VelComponent::DDot};
  static const std::vector<VelComponent> c{VelComponent::ThetaDot, VelComponent::DDot};
  static const std::vector<VelComponent> s{VelComponent::OmegaX, VelComponent::OmegaY,
                                           VelComponent::OmegaZ};
  switch (kind) {
    case JointKind::Revolute: return r;
    case JointKind::Prismatic: return p;
    case JointKind::Cylindrical: return c;
    case JointKind::Spherical: return s;
  }
  return r;
}

bool has_axis(JointKind kind) { return kind != JointKind::Spherical; }

const char* to_string(JointKind kind) {
  switch (kind) {
    case JointKind::Revolute: return "revolute";
    case JointKind::Prismatic: return "prismatic";
    case JointKind::Cylindrical: return "cylindrical";
    case JointKind::Spherical: return "spherical";
  }
  return "?";
}

const char* to_string(VelComponent c) {
  switch (c) {
    case VelComponent::ThetaDot: return "theta";
    case VelComponent::DDot: return "d";
    case VelComponent::OmegaX: return "wx";
    case VelComponent::OmegaY: return "wy";
    case VelComponent::OmegaZ: return "wz";
  }
  return "?";
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::UnknownLink: return "UnknownLink";
    case ErrorCode::InvalidActuationSelector: return "InvalidActuationSelector";
    case ErrorCode::DuplicateJointId: return "DuplicateJointId";
    case ErrorCode::NonSquareA2: return "NonSquareA2";
    case ErrorCode::SingularA2: return "SingularA2";
    case ErrorCode::SingularConfiguration: return "SingularConfiguration";
    case ErrorCode::AllPrismatic: return "AllPrismatic";
    case ErrorCode::SerialTopology: return "SerialTopology";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyCatalog: return "EmptyCatalog";
    case ErrorCode::ExhaustedRestarts: return "ExhaustedRestarts";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Error";
}

int Topology::link_index(const std::string& id) const {
  auto it = std::find(links_.begin(), links_.end(), id);
  return it == links_.end() ? -1 : static_cast<int>(it - links_.begin());
}

int Topology::joint_index(const std::string& id) const {
  for (std::size_t k = 0; k < joints_.size(); ++k)
    if (joints_[k].id == id) return static_cast<int>(k);
  return -1;
}

bool Topology::is_actuated(int joint, VelComponent c) const {
  return std::find(actuated_.begin(), actuated_.end(), ActuatedSelector{joint, c}) !=
         actuated_.end();
}

bool Topology::is_serial() const {
  int total = 0;
  for (const auto& j : joints_) total += arity(j.kind);
  return total == static_cast<int>(actuated_.size()) && enumerate_paths(*this).size() == 1;
}

namespace {

JointKind parse_kind(const std::string& s) {
  if (s == "revolute" || s == "R") return JointKind::Revolute;
  if (s == "prismatic" || s == "P") return JointKind::Prismatic;
  if (s == "cylindrical" || s == "C") return JointKind::Cylindrical;
  if (s == "spherical" || s == "S") return JointKind::Spherical;
  throw Error(ErrorCode::ParseError, "unknown joint kind '" + s + "'");
}

VelComponent parse_component(const std::string& s) {
  if (s == "theta") return VelComponent::ThetaDot;
  if (s == "d") return VelComponent::DDot;
  if (s == "wx") return VelComponent::OmegaX;
  if (s == "wy") return VelComponent::OmegaY;
  if (s == "wz") return VelComponent::OmegaZ;
  throw Error(ErrorCode::ParseError, "unknown velocity component '" + s + "'");
}

}  // namespace

Topology build_topology(const RawTopology& raw) {
  Topology t;
  t.name_ = raw.name;
  t.dof_ = raw.dof;
  t.links_ = raw.links;

  std::set<std::string> link_set(raw.links.begin(), raw.links.end());
  if (link_set.size() != raw.links.size())
    throw Error(ErrorCode::ParseError, "duplicate link id");

  auto need_link = [&](const std::string& id) {
    int idx = t.link_index(id);
    if (idx < 0) throw Error(ErrorCode::UnknownLink, "link '" + id + "' not declared");
    return idx;
  };

  std::set<std::string> joint_ids;
  for (const auto& rj : raw.joints) {
    if (!joint_ids.insert(rj.id).second)
      throw Error(ErrorCode::DuplicateJointId, "joint '" + rj.id + "' declared twice");
    Joint j;
    j.id = rj.id;
    j.kind = parse_kind(rj.kind);
    j.link_a = need_link(rj.link_a);
    j.link_b = need_link(rj.link_b);
    if (j.link_a == j.link_b)
      throw Error(ErrorCode::ParseError, "joint '" + rj.id + "' connects a link to itself");
    t.joints_.push_back(j);
  }

  t.base_ = need_link(raw.base);
  t.end_effector_ = need_link(raw.end_effector);
  if (t.base_ == t.end_effector_)
    throw Error(ErrorCode::DisconnectedGraph, "base and end-effector must be distinct links");

  for (const auto& ra : raw.actuated) {
    int jk = t.joint_index(ra.joint);
    if (jk < 0)
      throw Error(ErrorCode::InvalidActuationSelector, "actuated joint '" + ra.joint +
                                                            "' does not exist");
    VelComponent c = parse_component(ra.component);
    const auto& valid = components(t.joints_[jk].kind);
    if (std::find(valid.begin(), valid.end(), c) == valid.end())
      throw Error(ErrorCode::InvalidActuationSelector,
                  "component '" + ra.component + "' is not a velocity of " +
                      to_string(t.joints_[jk].kind) + " joint '" + ra.joint + "'");
    // Only revolute and prismatic rates are actuated; spherical omega
    // components are never drive variables.
    if (c != VelComponent::ThetaDot && c != VelComponent::DDot)
      throw Error(ErrorCode::InvalidActuationSelector,
                  "only theta/d components can be actuated ('" + ra.joint + "')");
    ActuatedSelector sel{jk, c};
    if (std::find(t.actuated_.begin(), t.actuated_.end(), sel) != t.actuated_.end())
      throw Error(ErrorCode::InvalidActuationSelector,
                  "duplicate actuation of joint '" + ra.joint + "'");
    t.actuated_.push_back(sel);
  }

  // Connectivity over the whole link set.
  std::vector<std::vector<int>> adj(t.links_.size());
  for (const auto& j : t.joints_) {
    adj[j.link_a].push_back(j.link_b);
    adj[j.link_b].push_back(j.link_a);
  }
  std::vector<bool> seen(t.links_.size(), false);
  std::vector<int> stack{t.base_};
  seen[t.base_] = true;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
    throw Error(ErrorCode::DisconnectedGraph, "link graph is not connected");

  return t;
}

namespace {

struct Edge {
  int joint;
  int other;
  int direction;
};

std::vector<std::vector<Edge>> adjacency(const Topology& t) {
  std::vector<std::vector<Edge>> adj(t.links().size());
  const auto& joints = t.joints();
  for (int k = 0; k < static_cast<int>(joints.size()); ++k) {
    adj[joints[k].link_a].push_back({k, joints[k].link_b, +1});
    adj[joints[k].link_b].push_back({k, joints[k].link_a, -1});
  }
  // Ascending joint index so DFS emits paths in lexicographic order.
  for (auto& v : adj)
    std::sort(v.begin(), v.end(), [](const Edge& a, const Edge& b) { return a.joint < b.joint; });
  return adj;
}

void dfs_paths(const std::vector<std::vector<Edge>>& adj, int link, int goal,
               std::vector<bool>& visited, Path& current, std::vector<Path>& out,
               bool stop_at_first) {
  if (link == goal) {
    out.push_back(current);
    return;
  }
  for (const Edge& e : adj[link]) {
    if (visited[e.other]) continue;
    if (stop_at_first && !out.empty()) return;
    visited[e.other] = true;
    current.links.push_back(e.other);
    current.steps.push_back({e.joint, e.direction});
    dfs_paths(adj, e.other, goal, visited, current, out, stop_at_first);
    current.links.pop_back();
    current.steps.pop_back();
    visited[e.other] = false;
  }
}

std::vector<Path> simple_paths(const Topology& t, int goal, bool stop_at_first) {
  auto adj = adjacency(t);
  std::vector<bool> visited(t.links().size(), false);
  visited[t.base()] = true;
  Path current;
  current.links.push_back(t.base());
  std::vector<Path> out;
  dfs_paths(adj, t.base(), goal, visited, current, out, stop_at_first);
  return out;
}

}  // namespace

std::vector<Path> enumerate_paths(const Topology& t) {
  auto out = simple_paths(t, t.end_effector(), false);
  std::sort(out.begin(), out.end(), [](const Path& a, const Path& b) {
    std::vector<int> ja, jb;
    for (const auto& s : a.steps) ja.push_back(s.joint);
    for (const auto& s : b.steps) jb.push_back(s.joint);
    return ja < jb;
  });
  return out;
}

Path first_path_to_link(const Topology& t, int target_link) {
  auto out = simple_paths(t, target_link, true);
  if (out.empty())
    throw Error(ErrorCode::DisconnectedGraph, "no path from base to requested link");
  return out.front();
}

int VelocityInventory::column_of(const VelocityVar& v) const {
  for (std::size_t i = 0; i < active.size(); ++i)
    if (active[i] == v) return static_cast<int>(i);
  for (std::size_t i = 0; i < passive.size(); ++i)
    if (passive[i] == v) return static_cast<int>(active.size() + i);
  return -1;
}

VelocityInventory passive_velocity_inventory(const Topology& t) {
  VelocityInventory inv;
  for (const auto& sel : t.actuated()) inv.active.push_back({sel.joint, sel.component});

  auto type_rank = [](VelComponent c) {
    switch (c) {
      case VelComponent::DDot: return 0;
      case VelComponent::ThetaDot: return 1;
      default: return 2;  // omega triplet stays contiguous per joint
    }
  };
  auto omega_sub = [](VelComponent c) {
    switch (c) {
      case VelComponent::OmegaX: return 0;
      case VelComponent::OmegaY: return 1;
      case VelComponent::OmegaZ: return 2;
      default: return 0;
    }
  };

  const auto& joints = t.joints();
  for (int k = 0; k < static_cast<int>(joints.size()); ++k)
    for (VelComponent c : components(joints[k].kind)) {
      VelocityVar v{k, c};
      if (!t.is_actuated(k, c)) inv.passive.push_back(v);
    }
  std::sort(inv.passive.begin(), inv.passive.end(),
            [&](const VelocityVar& a, const VelocityVar& b) {
              const Joint& ja = joints[a.joint];
              const Joint& jb = joints[b.joint];
              auto key = [&](const VelocityVar& v, const Joint& j) {
                return std::tuple(type_rank(v.component), j.link_a, j.link_b, v.joint,
                                  omega_sub(v.component));
              };
              return key(a, ja) < key(b, jb);
            });
  return inv;
}

std::vector<SuperfluousAssembly> detect_superfluous(const Topology& t) {
  const auto& joints = t.joints();
  std::vector<int> spherical;
  for (int k = 0; k < static_cast<int>(joints.size()); ++k)
    if (joints[k].kind == JointKind::Spherical) spherical.push_back(k);

  std::vector<SuperfluousAssembly> out;
  std::set<std::vector<int>> reported;

  const int n_links = static_cast<int>(t.links().size());
  for (std::size_t i = 0; i < spherical.size(); ++i) {
    for (std::size_t j = i + 1; j < spherical.size(); ++j) {
      int ea = spherical[i], eb = spherical[j];
      // Components of the link graph with the two spherical edges removed.
      std::vector<std::vector<int>> adj(n_links);
      for (int k = 0; k < static_cast<int>(joints.size()); ++k) {
        if (k == ea || k == eb) continue;
        adj[joints[k].link_a].push_back(joints[k].link_b);
        adj[joints[k].link_b].push_back(joints[k].link_a);
      }
      std::vector<int> comp(n_links, -1);
      int n_comp = 0;
      for (int s = 0; s < n_links; ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = n_comp;
        std::vector<int> stack{s};
        while (!stack.empty()) {
          int u = stack.back();
          stack.pop_back();
          for (int v : adj[u])
            if (comp[v] < 0) {
              comp[v] = n_comp;
              stack.push_back(v);
            }
        }
        ++n_comp;
      }
      if (n_comp < 2) continue;

      auto crosses = [&](int e, int c) {
        return (comp[joints[e].link_a] == c) != (comp[joints[e].link_b] == c);
      };
      for (int c = 0; c < n_comp; ++c) {
        if (comp[t.base()] == c || comp[t.end_effector()] == c) continue;
        if (!crosses(ea, c) || !crosses(eb, c)) continue;
        SuperfluousAssembly sa;
        for (int l = 0; l < n_links; ++l)
          if (comp[l] == c) sa.links.push_back(l);
        sa.joint_a = ea;
        sa.joint_b = eb;
        sa.representative_link =
            comp[joints[ea].link_a] == c ? joints[ea].link_a : joints[ea].link_b;
        if (reported.insert(sa.links).second) out.push_back(sa);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const SuperfluousAssembly& a, const SuperfluousAssembly& b) {
    return std::tuple(a.joint_a, a.joint_b) < std::tuple(b.joint_a, b.joint_b);
  });
  return out;
}

}  // namespace manipsyn
