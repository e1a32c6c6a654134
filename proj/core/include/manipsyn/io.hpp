#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "manipsyn/synthesis.hpp"
#include "manipsyn/topology.hpp"

namespace manipsyn {

/// Topology document:
/// {
///   "name": "2D-M71", "dof": 2,
///   "links": ["L1", ...], "base": "L1", "end_effector": "L5",
///   "joints": [{"id": "j13", "kind": "revolute", "between": ["L1","L3"]}, ...],
///   "actuated": [{"joint": "j13", "component": "theta"}, ...]
/// }
RawTopology parse_raw_topology(const nlohmann::json& doc);
Topology parse_topology(const nlohmann::json& doc);
Topology load_topology_file(const std::string& path);
nlohmann::ordered_json topology_to_json(const Topology& t);

/// Catalog document: {"manipulators": [<topology>, ...]} or a bare array.
std::vector<Topology> load_catalog_file(const std::string& path);
std::vector<Topology> parse_catalog(const nlohmann::json& doc);
nlohmann::ordered_json catalog_to_json(const std::vector<Topology>& catalog);

/// Placement document (joint positions/axes + task point). Angles are
/// radians under "beta"/"phi"; "beta_deg"/"phi_deg" are accepted on input.
/// {
///   "task_point": [3,4,5],
///   "joints": {"j13": {"r": [10,10,10], "beta": 2.39, "phi": 6.28}, ...}
/// }
Configuration parse_placement(const nlohmann::json& doc, const Topology& t);
std::optional<Eigen::Vector3d> placement_task_point(const nlohmann::json& doc);
nlohmann::ordered_json placement_to_json(const Topology& t, const Configuration& cfg);

struct RunConfig {
  Eigen::Vector3d task_point{3.0, 4.0, 5.0};
  int restarts = 100;
  int fallback_restart_cap = 50;
  std::optional<std::uint64_t> seed;  // entropy when absent
  std::string format = "csv";         // "csv" | "json"
  std::string out;                    // empty -> stdout

  SynthesisOptions synthesis_options() const;
};

/// Prescription table, presentation-rounded like the paper's tables
/// (mu_bar 4 decimals, kappa and mu 1 decimal). Header is
/// "S.No.,Name,mu_bar,kappa,i_kappa,mu,f" with a trailing AJV column only
/// when the catalog contains a non-serial manipulator.
void write_prescription_csv(std::ostream& os, const Prescription& p, bool include_ajv);

/// Full-precision machine output; "design" carries every joint placement so
/// the row can be re-evaluated exactly.
nlohmann::ordered_json prescription_to_json(const Prescription& p,
                                            const std::vector<Topology>& catalog);

/// Reads a packed design vector out of a synthesize JSON row or a placement
/// document for the given topology.
Eigen::VectorXd parse_design(const nlohmann::json& doc, const Topology& t);

nlohmann::json load_json_file(const std::string& path);

}  // namespace manipsyn
