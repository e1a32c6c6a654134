// manipsyn: assemble manipulator Jacobians, evaluate manipulability metrics
// and run multi-start dimensional synthesis over topology catalogs.
//
// Exit codes: 0 success, 1 synthesis/singularity failure, 2 input error.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>

#include "manipsyn/io.hpp"
#include "manipsyn/jacobian.hpp"
#include "manipsyn/metrics.hpp"
#include "manipsyn/synthesis.hpp"

namespace {

using namespace manipsyn;

constexpr int kExitSuccess = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;

Eigen::Vector3d parse_task_point(const std::string& spec) {
  Eigen::Vector3d a;
  if (std::sscanf(spec.c_str(), "%lf,%lf,%lf", &a.x(), &a.y(), &a.z()) != 3)
    throw Error(ErrorCode::ParseError, "--task-point expects x,y,z");
  return a;
}

void print_matrix(std::ostream& os, const std::string& name, const Eigen::MatrixXd& m) {
  os << name << " (" << m.rows() << "x" << m.cols() << "):\n";
  const Eigen::IOFormat fmt(Eigen::FullPrecision, 0, "  ", "\n", "  ");
  os << m.format(fmt) << "\n";
}

double degrees(double rad) { return rad * 180.0 / std::numbers::pi; }

int cmd_jacobian(const std::string& topology_path, const std::string& config_path) {
  const Topology t = load_topology_file(topology_path);
  const nlohmann::json doc = load_json_file(config_path);
  const Configuration cfg = parse_placement(doc, t);

  const JacobianParts parts = assemble_system(t, cfg);
  std::cout << t.name() << ": " << parts.path_count << " path(s), " << parts.A2.cols()
            << " passive velocities, " << parts.superfluous_rows << " superfluous row(s)\n";

  ReducedJacobian reduced;
  try {
    reduced = reduced_jacobian(parts);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularA2) {
      std::cerr << "type-2 singularity: " << e.what() << "\n";
      return kExitFailure;
    }
    throw;
  }
  print_matrix(std::cout, "J", reduced.J);
  std::cout << "det(A2) = " << reduced.det_a2 << "\n";

  if (const auto type2 = type2_matrices(parts)) {
    std::cout << "A~ = det(A2) * I" << parts.task_rows << "\n";
    print_matrix(std::cout, "B~", type2->B_tilde);
  } else {
    std::cout << "serial: A~/B~ not applicable\n";
  }

  const MetricReport report = evaluate_metrics(t, cfg, reduced.J);
  std::cout << "mu = " << report.mu << "\nmu_bar = " << report.mu_bar
            << "\nkappa = " << report.kappa << "\nL = " << report.characteristic_length
            << "\n";
  return kExitSuccess;
}

int cmd_evaluate(const std::string& topology_path, const std::string& design_path,
                 std::optional<Eigen::Vector3d> task_override) {
  const Topology t = load_topology_file(topology_path);
  const nlohmann::json doc = load_json_file(design_path);
  const Eigen::VectorXd x = parse_design(doc, t);

  Eigen::Vector3d a(3, 4, 5);
  if (auto from_file = placement_task_point(doc)) a = *from_file;
  if (task_override) a = *task_override;

  const DesignLayout layout(t);
  const Configuration cfg = layout.unpack(x, a);
  const auto reduced = reduced_jacobian(assemble_system(t, cfg));
  const MetricReport report = evaluate_metrics(t, cfg, reduced.J);

  std::cout << t.name() << " at a = (" << a.x() << ", " << a.y() << ", " << a.z() << ")\n";
  std::cout << "mu = " << report.mu << "\nmu_bar = " << report.mu_bar
            << "\nkappa = " << report.kappa << "\nL = " << report.characteristic_length
            << "\n";
  if (report.degenerate_scaling)
    std::cout << "warning: characteristic length is zero; kappa is unscaled\n";

  std::cout << "joints (angles in degrees):\n";
  for (std::size_t k = 0; k < t.joints().size(); ++k) {
    const Joint& j = t.joints()[k];
    const JointPlacement& p = cfg.joints[k];
    std::cout << "  " << j.id << " [" << to_string(j.kind) << "] r = (" << p.position.x()
              << ", " << p.position.y() << ", " << p.position.z() << ")";
    if (has_axis(j.kind))
      std::cout << " beta = " << degrees(p.beta) << " phi = " << degrees(p.phi);
    std::cout << "\n";
  }
  std::cout << "link segments:\n";
  for (const LinkSegment& s : derive_link_lengths(t, layout, x, a))
    std::cout << "  " << s.link << " " << s.label << " = " << s.length << "\n";
  return kExitSuccess;
}

int cmd_synthesize(const std::string& catalog_path, RunConfig run) {
  const std::vector<Topology> catalog = load_catalog_file(catalog_path);
  if (catalog.empty()) {
    std::cerr << "catalog is empty\n";
    return kExitInput;
  }
  if (!run.seed) run.seed = std::random_device{}();

  const SynthesisOptions opts = run.synthesis_options();
  const auto results = run_catalog(catalog, run.task_point, opts);
  const Prescription prescription = rank_prescription(results);

  bool any_ok = false;
  bool any_parallel = false;
  for (const Topology& t : catalog) any_parallel |= !t.is_serial();
  for (const auto& row : prescription.rows) any_ok |= !row.result.failed;

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!run.out.empty()) {
    file.open(run.out);
    if (!file) {
      std::cerr << "cannot write '" << run.out << "'\n";
      return kExitInput;
    }
    os = &file;
  }
  if (run.format == "json") {
    nlohmann::ordered_json doc;
    doc["task_point"] = {run.task_point.x(), run.task_point.y(), run.task_point.z()};
    doc["seed"] = *run.seed;
    doc["restarts"] = run.restarts;
    doc["prescription"] = prescription_to_json(prescription, catalog);
    *os << doc.dump(2) << "\n";
  } else {
    write_prescription_csv(*os, prescription, any_parallel);
  }

  for (const auto& row : prescription.rows)
    if (row.result.failed)
      std::cerr << row.result.topology << " failed: " << row.result.failure << "\n";
  return any_ok ? kExitSuccess : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"manipulator Jacobian, manipulability and dimensional-synthesis toolkit"};
  app.require_subcommand(1);

  std::string topology_path, config_path, design_path, catalog_path;
  std::string task_point_spec;
  RunConfig run;
  std::uint64_t seed = 0;
  bool have_task_point = false;

  auto* jac = app.add_subcommand("jacobian", "assemble J~, det(A2) and A~/B~ at a placement");
  jac->add_option("topology", topology_path, "topology JSON file")->required();
  jac->add_option("config", config_path, "placement JSON file")->required();

  auto* eval = app.add_subcommand("evaluate", "metrics and link lengths for a design");
  eval->add_option("topology", topology_path, "topology JSON file")->required();
  eval->add_option("design", design_path, "design/placement JSON file")->required();
  eval->add_option("--task-point", task_point_spec, "task point x,y,z");

  auto* syn = app.add_subcommand("synthesize", "multi-start synthesis over a catalog");
  syn->add_option("catalog", catalog_path, "catalog JSON file")->required();
  syn->add_option("--task-point", task_point_spec, "task point x,y,z (default 3,4,5)");
  syn->add_option("--restarts", run.restarts, "f1 restarts per manipulator");
  syn->add_option("--fallback-cap", run.fallback_restart_cap, "f2 fresh-guess budget");
  auto* seed_opt = syn->add_option("--seed", seed, "RNG seed (entropy when omitted)");
  syn->add_option("--format", run.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  syn->add_option("--out", run.out, "output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
    have_task_point = !task_point_spec.empty();

    if (jac->parsed()) return cmd_jacobian(topology_path, config_path);
    if (eval->parsed()) {
      std::optional<Eigen::Vector3d> override;
      if (have_task_point) override = parse_task_point(task_point_spec);
      return cmd_evaluate(topology_path, design_path, override);
    }
    if (syn->parsed()) {
      if (have_task_point) run.task_point = parse_task_point(task_point_spec);
      if (seed_opt->count() > 0) run.seed = seed;
      return cmd_synthesize(catalog_path, run);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitSuccess : kExitInput;
  } catch (const manipsyn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::SingularA2:
      case ErrorCode::ExhaustedRestarts:
        return kExitFailure;
      default:
        return kExitInput;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
