#include "manipsyn/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace manipsyn {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const json& need(const json& doc, const char* key, const std::string& where) {
  auto it = doc.find(key);
  if (it == doc.end()) fail(where + ": missing field '" + key + "'");
  return *it;
}

std::string need_string(const json& doc, const char* key, const std::string& where) {
  const json& v = need(doc, key, where);
  if (!v.is_string()) fail(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

Eigen::Vector3d parse_vec3(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) fail(where + ": expected [x, y, z]");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

std::string fixed(double v, int decimals) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

}  // namespace

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(path + ": " + e.what());
  }
}

RawTopology parse_raw_topology(const json& doc) {
  if (!doc.is_object()) fail("topology: expected an object");
  RawTopology raw;
  raw.name = need_string(doc, "name", "topology");
  raw.dof = doc.value("dof", 0);
  const json& links = need(doc, "links", raw.name);
  if (!links.is_array()) fail(raw.name + ": 'links' must be an array");
  for (const auto& l : links) raw.links.push_back(l.get<std::string>());
  const json& joints = need(doc, "joints", raw.name);
  if (!joints.is_array()) fail(raw.name + ": 'joints' must be an array");
  for (const auto& j : joints) {
    RawTopology::RawJoint rj;
    rj.id = need_string(j, "id", raw.name + ".joints");
    rj.kind = need_string(j, "kind", raw.name + "." + rj.id);
    const json& between = need(j, "between", raw.name + "." + rj.id);
    if (!between.is_array() || between.size() != 2)
      fail(raw.name + "." + rj.id + ": 'between' must name two links");
    rj.link_a = between[0].get<std::string>();
    rj.link_b = between[1].get<std::string>();
    raw.joints.push_back(std::move(rj));
  }
  raw.base = need_string(doc, "base", raw.name);
  raw.end_effector = need_string(doc, "end_effector", raw.name);
  if (doc.contains("actuated")) {
    const json& act = doc["actuated"];
    if (!act.is_array()) fail(raw.name + ": 'actuated' must be an array");
    for (const auto& a : act) {
      RawTopology::RawActuated ra;
      ra.joint = need_string(a, "joint", raw.name + ".actuated");
      ra.component = need_string(a, "component", raw.name + ".actuated");
      raw.actuated.push_back(std::move(ra));
    }
  }
  return raw;
}

Topology parse_topology(const json& doc) { return build_topology(parse_raw_topology(doc)); }

Topology load_topology_file(const std::string& path) {
  return parse_topology(load_json_file(path));
}

ordered_json topology_to_json(const Topology& t) {
  ordered_json doc;
  doc["name"] = t.name();
  doc["dof"] = t.dof();
  doc["links"] = t.links();
  doc["base"] = t.links()[t.base()];
  doc["end_effector"] = t.links()[t.end_effector()];
  ordered_json joints = ordered_json::array();
  for (const Joint& j : t.joints()) {
    ordered_json jj;
    jj["id"] = j.id;
    jj["kind"] = to_string(j.kind);
    jj["between"] = {t.links()[j.link_a], t.links()[j.link_b]};
    joints.push_back(std::move(jj));
  }
  doc["joints"] = std::move(joints);
  ordered_json act = ordered_json::array();
  for (const ActuatedSelector& sel : t.actuated()) {
    ordered_json a;
    a["joint"] = t.joints()[sel.joint].id;
    a["component"] = to_string(sel.component);
    act.push_back(std::move(a));
  }
  doc["actuated"] = std::move(act);
  return doc;
}

std::vector<Topology> parse_catalog(const json& doc) {
  const json* list = nullptr;
  if (doc.is_array()) {
    list = &doc;
  } else if (doc.is_object() && doc.contains("manipulators")) {
    list = &doc["manipulators"];
  } else {
    fail("catalog: expected {\"manipulators\": [...]} or an array");
  }
  if (!list->is_array()) fail("catalog: 'manipulators' must be an array");
  std::vector<Topology> out;
  for (const auto& entry : *list) out.push_back(parse_topology(entry));
  return out;
}

std::vector<Topology> load_catalog_file(const std::string& path) {
  return parse_catalog(load_json_file(path));
}

ordered_json catalog_to_json(const std::vector<Topology>& catalog) {
  ordered_json doc;
  ordered_json list = ordered_json::array();
  for (const Topology& t : catalog) list.push_back(topology_to_json(t));
  doc["manipulators"] = std::move(list);
  return doc;
}

Configuration parse_placement(const json& doc, const Topology& t) {
  const json& joints = need(doc, "joints", "placement");
  Configuration cfg;
  cfg.joints.resize(t.joints().size());
  if (auto a = placement_task_point(doc)) cfg.task_point = *a;
  for (std::size_t k = 0; k < t.joints().size(); ++k) {
    const Joint& joint = t.joints()[k];
    auto it = joints.find(joint.id);
    if (it == joints.end()) fail("placement: joint '" + joint.id + "' missing");
    const json& entry = *it;
    JointPlacement place;
    place.position = parse_vec3(need(entry, "r", joint.id), joint.id + ".r");
    if (has_axis(joint.kind)) {
      const double deg = std::numbers::pi / 180.0;
      if (entry.contains("beta"))
        place.beta = entry["beta"].get<double>();
      else if (entry.contains("beta_deg"))
        place.beta = entry["beta_deg"].get<double>() * deg;
      else
        fail("placement: joint '" + joint.id + "' needs beta or beta_deg");
      if (entry.contains("phi"))
        place.phi = entry["phi"].get<double>();
      else if (entry.contains("phi_deg"))
        place.phi = entry["phi_deg"].get<double>() * deg;
      else
        fail("placement: joint '" + joint.id + "' needs phi or phi_deg");
    }
    cfg.joints[k] = place;
  }
  return cfg;
}

std::optional<Eigen::Vector3d> placement_task_point(const json& doc) {
  if (doc.is_object() && doc.contains("task_point"))
    return parse_vec3(doc["task_point"], "task_point");
  return std::nullopt;
}

ordered_json placement_to_json(const Topology& t, const Configuration& cfg) {
  ordered_json doc;
  doc["task_point"] = {cfg.task_point.x(), cfg.task_point.y(), cfg.task_point.z()};
  ordered_json joints;
  for (std::size_t k = 0; k < t.joints().size(); ++k) {
    const Joint& joint = t.joints()[k];
    const JointPlacement& place = cfg.joints[k];
    ordered_json entry;
    entry["r"] = {place.position.x(), place.position.y(), place.position.z()};
    if (has_axis(joint.kind)) {
      entry["beta"] = place.beta;
      entry["phi"] = place.phi;
    }
    joints[joint.id] = std::move(entry);
  }
  doc["joints"] = std::move(joints);
  return doc;
}

SynthesisOptions RunConfig::synthesis_options() const {
  SynthesisOptions opts;
  opts.n_restarts = restarts;
  opts.fallback_restart_cap = fallback_restart_cap;
  opts.rng_seed = seed.value_or(0);
  return opts;
}

void write_prescription_csv(std::ostream& os, const Prescription& p, bool include_ajv) {
  os << "S.No.,Name,mu_bar,kappa,i_kappa,mu,f";
  if (include_ajv) os << ",AJV";
  os << "\n";
  for (const PrescriptionRow& row : p.rows) {
    const SynthesisResult& r = row.result;
    os << row.serial_number << "," << r.topology << ",";
    if (r.failed) {
      os << ",,,,failed";
      if (include_ajv) os << ",";
      os << "\n";
      continue;
    }
    os << fixed(r.mu_bar, 4) << "," << fixed(r.kappa, 1) << "," << row.rank_kappa << ","
       << fixed(r.mu, 1) << "," << (r.objective == ObjectiveTag::F1 ? "f1" : "f2");
    if (include_ajv) {
      os << ",";
      for (std::size_t i = 0; i < r.active_joints.size(); ++i)
        os << (i ? ";" : "") << r.active_joints[i];
    }
    os << "\n";
  }
}

ordered_json prescription_to_json(const Prescription& p, const std::vector<Topology>& catalog) {
  auto find_topology = [&](const std::string& name) -> const Topology* {
    for (const Topology& t : catalog)
      if (t.name() == name) return &t;
    return nullptr;
  };
  ordered_json rows = ordered_json::array();
  for (const PrescriptionRow& row : p.rows) {
    const SynthesisResult& r = row.result;
    ordered_json entry;
    entry["sn"] = row.serial_number;
    entry["name"] = r.topology;
    if (r.failed) {
      entry["failed"] = true;
      entry["error"] = r.failure;
      rows.push_back(std::move(entry));
      continue;
    }
    entry["mu_bar"] = r.mu_bar;
    entry["kappa"] = r.kappa;
    entry["i_kappa"] = row.rank_kappa;
    entry["mu"] = r.mu;
    entry["f"] = r.objective == ObjectiveTag::F1 ? "f1" : "f2";
    entry["ajv"] = r.active_joints;
    entry["characteristic_length"] = r.characteristic_length;
    if (const Topology* t = find_topology(r.topology)) {
      DesignLayout layout(*t);
      // Task point is not stored per row; placement_to_json's copy is the
      // synthesize task point, written by the caller at the document level.
      Configuration cfg = layout.unpack(r.design, Eigen::Vector3d::Zero());
      entry["design"] = placement_to_json(*t, cfg)["joints"];
    }
    ordered_json diag;
    diag["f1_restarts"] = r.diagnostics.f1_restarts;
    diag["f1_converged"] = r.diagnostics.f1_converged;
    diag["f1_shortlisted"] = r.diagnostics.f1_shortlisted;
    diag["f2_attempts"] = r.diagnostics.f2_attempts;
    diag["f2_passed"] = r.diagnostics.f2_passed;
    entry["diagnostics"] = std::move(diag);
    rows.push_back(std::move(entry));
  }
  return rows;
}

Eigen::VectorXd parse_design(const json& doc, const Topology& t) {
  const json* joints = nullptr;
  if (doc.is_object() && doc.contains("design"))
    joints = &doc["design"];
  else if (doc.is_object() && doc.contains("joints"))
    joints = &doc["joints"];
  else
    fail("design: expected a 'design' or 'joints' object");

  json placement;
  placement["joints"] = *joints;
  const Configuration cfg = parse_placement(placement, t);
  return DesignLayout(t).pack(cfg);
}

}  // namespace manipsyn
