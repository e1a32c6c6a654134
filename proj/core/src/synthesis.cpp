#include "manipsyn/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace manipsyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// splitmix64; used both to derive per-topology streams and as the sampling
// generator so that results are identical across platforms and thread counts.
std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;  // [0, 1)
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Eigen::VectorXd draw_uniform(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                             std::uint64_t& state) {
  Eigen::VectorXd x(lower.size());
  for (int i = 0; i < x.size(); ++i)
    x[i] = lower[i] + uniform01(state) * (upper[i] - lower[i]);  // half-open draw
  return x;
}

}  // namespace

DesignLayout::DesignLayout(const Topology& t) {
  std::vector<double> lo, hi;
  for (const Joint& j : t.joints()) {
    joint_has_axis_.push_back(has_axis(j.kind));
    for (int k = 0; k < 3; ++k) {
      lo.push_back(0.0);
      hi.push_back(10.0);
    }
    if (has_axis(j.kind)) {
      lo.push_back(0.0);
      hi.push_back(std::numbers::pi);  // beta
      lo.push_back(0.0);
      hi.push_back(2 * std::numbers::pi);  // phi
    }
  }
  lower_ = Eigen::Map<Eigen::VectorXd>(lo.data(), static_cast<int>(lo.size()));
  upper_ = Eigen::Map<Eigen::VectorXd>(hi.data(), static_cast<int>(hi.size()));
}

Configuration DesignLayout::unpack(const Eigen::VectorXd& x,
                                   const Eigen::Vector3d& task_point) const {
  if (x.size() != size())
    throw Error(ErrorCode::DimensionMismatch,
                "design vector has " + std::to_string(x.size()) + " entries, layout needs " +
                    std::to_string(size()));
  Configuration cfg;
  cfg.task_point = task_point;
  int i = 0;
  for (bool axis : joint_has_axis_) {
    JointPlacement place;
    place.position = x.segment<3>(i);
    i += 3;
    if (axis) {
      place.beta = x[i++];
      place.phi = x[i++];
    }
    cfg.joints.push_back(place);
  }
  return cfg;
}

Eigen::VectorXd DesignLayout::pack(const Configuration& cfg) const {
  Eigen::VectorXd x(size());
  int i = 0;
  for (std::size_t k = 0; k < joint_has_axis_.size(); ++k) {
    x.segment<3>(i) = cfg.joints[k].position;
    i += 3;
    if (joint_has_axis_[k]) {
      x[i++] = cfg.joints[k].beta;
      x[i++] = cfg.joints[k].phi;
    }
  }
  return x;
}

double objective_f1(const Topology& t, const DesignLayout& layout, const Eigen::VectorXd& x,
                    const Eigen::Vector3d& task_point) {
  const Configuration cfg = layout.unpack(x, task_point);
  try {
    const auto reduced = reduced_jacobian(assemble_system(t, cfg));
    return -manipulability(reduced.J);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularA2) return kInf;
    throw;
  }
}

double objective_f1(const Topology& t, const Eigen::VectorXd& x,
                    const Eigen::Vector3d& task_point) {
  return objective_f1(t, DesignLayout(t), x, task_point);
}

double objective_f2(const Topology& t, const DesignLayout& layout, const Eigen::VectorXd& x,
                    const Eigen::Vector3d& task_point) {
  const Configuration cfg = layout.unpack(x, task_point);
  const JacobianParts parts = assemble_system(t, cfg);
  const auto type2 = type2_matrices(parts);
  if (!type2)
    throw Error(ErrorCode::SerialTopology, "f2 is undefined for serial manipulators");
  const double da = (type2->A_tilde.transpose() * type2->A_tilde).determinant();
  const double db = (type2->B_tilde.transpose() * type2->B_tilde).determinant();
  const double prod = std::max(da, 0.0) * std::max(db, 0.0);
  return -std::sqrt(prod);
}

double objective_f2(const Topology& t, const Eigen::VectorXd& x,
                    const Eigen::Vector3d& task_point) {
  return objective_f2(t, DesignLayout(t), x, task_point);
}

namespace {

struct Candidate {
  Eigen::VectorXd x;
  double score = -kInf;  // value of the objective being maximized
};

// log f2 = 6 log|det(A2)| + log sqrt(det(B~^T B~)); the raw product spans
// ~40 orders of magnitude, so step 3 minimizes the negated log instead.
double neg_log_f2(const Topology& t, const DesignLayout& layout, const Eigen::VectorXd& x,
                  const Eigen::Vector3d& task_point) {
  const Configuration cfg = layout.unpack(x, task_point);
  JacobianParts parts;
  try {
    parts = assemble_system(t, cfg);
  } catch (const Error&) {
    return kInf;
  }
  const double det = parts.A2.determinant();
  if (det == 0.0 || !std::isfinite(det)) return kInf;
  const Eigen::MatrixXd b_over_det = parts.J2 * parts.A2.partialPivLu().solve(parts.A1) - parts.J1;
  const double gram_det = (b_over_det.transpose() * b_over_det).determinant();
  if (!(gram_det > 0.0)) return kInf;
  const int nt = parts.task_rows;
  const int na = static_cast<int>(parts.J1.cols());
  // B~ = det(A2) * (J2 A2^-1 A1 - J1), so det(B~^T B~) = det^(2 na) * gram_det.
  return -((nt + na) * std::log(std::abs(det)) + 0.5 * std::log(gram_det));
}

struct Screen {
  bool pass = false;
  double mu = 0.0;
};

// Step-1 screen: cond(A~) and sigma_min(A~). A~ = det(A2) I, so the screen
// reduces to |det(A2)|, but it is evaluated as written.
Screen screen_step1(const Topology& t, const DesignLayout& layout, const Eigen::VectorXd& x,
                    const Eigen::Vector3d& task_point, const SynthesisOptions& opts,
                    bool serial) {
  Screen s;
  const Configuration cfg = layout.unpack(x, task_point);
  JacobianParts parts;
  try {
    parts = assemble_system(t, cfg);
  } catch (const Error&) {
    return s;
  }
  if (!serial) {
    const auto type2 = type2_matrices(parts);
    if (!type2) return s;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(type2->A_tilde);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    const double cond = smin > 0 ? sv(0) / smin : kInf;
    if (!(cond < opts.shortlist_cond_max) || !(smin > opts.shortlist_sigma_min)) return s;
  }
  try {
    s.mu = manipulability(reduced_jacobian(parts).J);
    s.pass = true;
  } catch (const Error&) {
    s.pass = false;
  }
  return s;
}

// Step-4 screen on the reduced Jacobian itself.
bool screen_step4(const Topology& t, const DesignLayout& layout, const Eigen::VectorXd& x,
                  const Eigen::Vector3d& task_point) {
  const Configuration cfg = layout.unpack(x, task_point);
  try {
    const auto reduced = reduced_jacobian(assemble_system(t, cfg));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(reduced.J);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    return smin > 1e-2 && sv(0) / smin < 1000.0;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

SynthesisResult multi_start_synthesize(const Topology& t, const Eigen::Vector3d& task_point,
                                       const SynthesisOptions& opts) {
  DesignLayout layout(t);
  Eigen::VectorXd lower = layout.lower();
  Eigen::VectorXd upper = layout.upper();
  if (opts.placement_bound != 10.0) {
    for (int i = 0; i < lower.size(); ++i)
      if (upper[i] == 10.0) upper[i] = opts.placement_bound;
  }

  std::uint64_t rng = opts.rng_seed ^ fnv1a(t.name());
  splitmix64(rng);  // decorrelate nearby seeds

  const bool serial = t.is_serial();

  OptOptions opt_options;
  opt_options.tol = opts.tol;
  opt_options.fd_step = opts.fd_step;
  opt_options.max_iterations = opts.max_iterations;

  SynthesisResult result;
  result.topology = t.name();
  for (const auto& sel : t.actuated())
    result.active_joints.push_back(t.joints()[sel.joint].id + ":" +
                                   to_string(sel.component));

  // Step 1: maximize f1 from n_restarts uniform draws.
  BoxProblem f1_problem;
  f1_problem.lower = lower;
  f1_problem.upper = upper;
  f1_problem.objective = [&](const Eigen::VectorXd& x) {
    return objective_f1(t, layout, x, task_point);
  };

  std::vector<Eigen::VectorXd> starts;
  starts.reserve(opts.n_restarts);
  for (int r = 0; r < opts.n_restarts; ++r) starts.push_back(draw_uniform(lower, upper, rng));

  Candidate best_f1;
  for (const Eigen::VectorXd& x0 : starts) {
    ++result.diagnostics.f1_restarts;
    const OptResult local = interior_point_minimize(f1_problem, x0, opt_options);
    if (!local.converged) continue;
    ++result.diagnostics.f1_converged;
    const Screen s = screen_step1(t, layout, local.x, task_point, opts, serial);
    if (!s.pass) continue;
    ++result.diagnostics.f1_shortlisted;
    if (s.mu > best_f1.score) best_f1 = {local.x, s.mu};
  }

  // Step 2: the best shortlisted point wins.
  Eigen::VectorXd winner;
  if (result.diagnostics.f1_shortlisted > 0) {
    winner = best_f1.x;
    result.objective = ObjectiveTag::F1;
  } else if (serial) {
    throw Error(ErrorCode::ExhaustedRestarts,
                t.name() + ": no f1 restart converged for serial topology");
  } else {
    // Steps 3 and 4: maximize f2 from fresh draws, keep points whose reduced
    // Jacobian passes the conditioning screen, best f2 value wins.
    BoxProblem f2_problem;
    f2_problem.lower = lower;
    f2_problem.upper = upper;
    f2_problem.objective = [&](const Eigen::VectorXd& x) {
      return neg_log_f2(t, layout, x, task_point);
    };
    Candidate best_f2;
    for (int attempt = 0; attempt < opts.fallback_restart_cap; ++attempt) {
      ++result.diagnostics.f2_attempts;
      const Eigen::VectorXd x0 = draw_uniform(lower, upper, rng);
      const OptResult local = interior_point_minimize(f2_problem, x0, opt_options);
      if (!local.converged) continue;
      if (!screen_step4(t, layout, local.x, task_point)) continue;
      ++result.diagnostics.f2_passed;
      const double score = -local.f;  // log f2, to be maximized
      if (score > best_f2.score) best_f2 = {local.x, score};
    }
    if (result.diagnostics.f2_passed == 0)
      throw Error(ErrorCode::ExhaustedRestarts,
                  t.name() + ": no f2 restart passed the step-4 screen within " +
                      std::to_string(opts.fallback_restart_cap) + " attempts");
    winner = best_f2.x;
    result.objective = ObjectiveTag::F2;
  }

  const Configuration cfg = layout.unpack(winner, task_point);
  const auto reduced = reduced_jacobian(assemble_system(t, cfg));
  const MetricReport report = evaluate_metrics(t, cfg, reduced.J);
  result.design = winner;
  result.mu = report.mu;
  result.mu_bar = report.mu_bar;
  result.kappa = report.kappa;
  result.characteristic_length = report.all_prismatic ? 0.0 : report.characteristic_length;
  return result;
}

std::vector<SynthesisResult> run_catalog(const std::vector<Topology>& catalog,
                                         const Eigen::Vector3d& task_point,
                                         const SynthesisOptions& opts) {
  if (catalog.empty()) throw Error(ErrorCode::EmptyCatalog, "catalog has no manipulators");
  std::vector<SynthesisResult> results;
  results.reserve(catalog.size());
  for (const Topology& t : catalog) {
    try {
      results.push_back(multi_start_synthesize(t, task_point, opts));
    } catch (const Error& e) {
      SynthesisResult failed;
      failed.topology = t.name();
      failed.failed = true;
      failed.failure = e.what();
      results.push_back(std::move(failed));
    }
  }
  return results;
}

Prescription rank_prescription(std::vector<SynthesisResult> results) {
  auto mu_bar_key = [](const SynthesisResult& r) {
    return (r.failed || std::isnan(r.mu_bar)) ? -kInf : r.mu_bar;
  };
  auto kappa_key = [](const SynthesisResult& r) {
    return std::isnan(r.kappa) ? kInf : r.kappa;
  };
  std::stable_sort(results.begin(), results.end(),
                   [&](const SynthesisResult& a, const SynthesisResult& b) {
                     if (a.failed != b.failed) return !a.failed;  // failures last
                     if (mu_bar_key(a) != mu_bar_key(b)) return mu_bar_key(a) > mu_bar_key(b);
                     return a.topology < b.topology;
                   });

  Prescription p;
  for (std::size_t i = 0; i < results.size(); ++i)
    p.rows.push_back({std::move(results[i]), static_cast<int>(i + 1), 0});

  // i_kappa: 1-based rank by ascending kappa over the non-failed rows.
  std::vector<int> order;
  for (int i = 0; i < static_cast<int>(p.rows.size()); ++i)
    if (!p.rows[i].result.failed) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& ra = p.rows[a].result;
    const auto& rb = p.rows[b].result;
    if (kappa_key(ra) != kappa_key(rb)) return kappa_key(ra) < kappa_key(rb);
    return ra.topology < rb.topology;
  });
  for (std::size_t r = 0; r < order.size(); ++r)
    p.rows[order[r]].rank_kappa = static_cast<int>(r + 1);
  return p;
}

std::vector<LinkSegment> derive_link_lengths(const Topology& t, const DesignLayout& layout,
                                             const Eigen::VectorXd& x,
                                             const Eigen::Vector3d& task_point) {
  const Configuration cfg = layout.unpack(x, task_point);
  std::vector<LinkSegment> segments;
  for (int link = 0; link < static_cast<int>(t.links().size()); ++link) {
    std::vector<int> incident;
    for (int k = 0; k < static_cast<int>(t.joints().size()); ++k)
      if (t.joints()[k].link_a == link || t.joints()[k].link_b == link) incident.push_back(k);
    for (std::size_t i = 0; i < incident.size(); ++i)
      for (std::size_t j = i + 1; j < incident.size(); ++j) {
        const Joint& ja = t.joints()[incident[i]];
        const Joint& jb = t.joints()[incident[j]];
        segments.push_back(
            {t.links()[link], ja.id + "-" + jb.id,
             (cfg.joints[incident[i]].position - cfg.joints[incident[j]].position).norm()});
      }
    if (link == t.end_effector())
      for (int k : incident)
        segments.push_back({t.links()[link], t.joints()[k].id + "-a",
                            (cfg.joints[k].position - task_point).norm()});
  }
  return segments;
}

std::vector<LinkSegment> derive_link_lengths(const Topology& t, const Eigen::VectorXd& x,
                                             const Eigen::Vector3d& task_point) {
  return derive_link_lengths(t, DesignLayout(t), x, task_point);
}

}  // namespace manipsyn
