#include "ctr/grasp.hpp"

#include <cmath>
#include <limits>

#include "ctr/cqdc.hpp"

namespace ctr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PlannerParams value_params(const Scenario& sc) {
  PlannerParams p = sc.params;
  // Q_a = 0: only object rows matter for the value query.
  for (int i = 0; i < sc.system.n_qa; ++i) {
    const int gi = sc.system.actuated_idx[i];
    p.Q.row(gi).setZero();
    p.Q.col(gi).setZero();
  }
  return p;
}

}  // namespace

double value_function(const Scenario& sc, const VectorXd& q_a, const VectorXd& q_o,
                      const VectorXd& q_o_goal, bool* infeasible) {
  const SystemModel& sys = sc.system;
  const PlannerParams params = value_params(sc);
  const VectorXd q0 = sys.merge(q_o, q_a);
  const VectorXd goal = goal_configuration(sys, q_o_goal, q0);
  const MpcLog log = mpc_rollout(sys, q0, goal, params);
  if (infeasible) *infeasible = log.terminated_early;
  if (log.terminated_early || log.traj.u.empty()) return kInf;

  const VectorXd err = goal - log.traj.q.back();
  double v = err.dot(params.Q * err);
  VectorXd prev = sys.actuated_part(q0);
  for (const VectorXd& u : log.traj.u) {
    v += (u - prev).dot(params.R * (u - prev));
    prev = u;
  }
  return v;
}

double robustness_radius(const Scenario& sc, const VectorXd& q_a, const VectorXd& q_o,
                         int n_samples, uint64_t seed) {
  const SystemModel& sys = sc.system;
  const VectorXd q = sys.merge(q_o, q_a);
  const LinearizedDynamics lin = linearize_u(sys, q, q_a, sc.params.kappa);
  if (lin.contacts.empty()) return 0.0;
  const TrustRegionSpec spec =
      TrustRegionSpec::ball(TrustRegionVariant::kRactr, sc.params.radius, sc.params.kappa);
  const TrustRegionConstraints cs = build_trust_region(spec, lin, sys);
  TrustRegionSamples samples;
  try {
    samples = sample_trust_region(cs, n_samples, seed);
  } catch (const Error& e) {
    if (std::string(e.kind()) == "degenerate-region") return 0.0;
    throw;
  }
  const WrenchSamples ws = wrench_set_samples(sys, lin, samples.samples);
  const HullResult hull = hull_and_radius(ws.total_wrenches, sys.n_qo);
  return hull.degenerate ? 0.0 : hull.radius;
}

IkResult ik_project(const SystemModel& sys, const VectorXd& q_init,
                    const std::vector<std::pair<int, Vector2d>>& targets,
                    const std::optional<VectorXd>& q_lb_a, const std::optional<VectorXd>& q_ub_a,
                    double step_box, int max_iterations) {
  IkResult out;
  VectorXd q = q_init;
  const int na = sys.n_qa;

  auto tip_error = [&](const VectorXd& qq) {
    double err = 0.0;
    for (const auto& [body, target] : targets) {
      const Body& b = sys.bodies[body];
      const Vector2d tip = chain_tip_position(b, qq.segment(b.dof_start, b.ndof()));
      err = std::max(err, (tip - target).norm());
    }
    return err;
  };

  double best_err = tip_error(q);
  VectorXd best_q = q;
  double last_improvement_err = best_err;
  int stall = 0;

  for (int iter = 0; iter < max_iterations; ++iter) {
    if (best_err < 1e-4) {
      out.converged = true;
      break;
    }
    ConicProgram prog;
    prog.P = 1e-9 * MatrixXd::Identity(na, na);
    prog.b = VectorXd::Zero(na);
    prog.E = MatrixXd(0, na);
    prog.f = VectorXd(0);
    for (const auto& [body, target] : targets) {
      const Body& b = sys.bodies[body];
      const Vector2d tip = chain_tip_position(b, q.segment(b.dof_start, b.ndof()));
      const MatrixXd Jfull = point_jacobian(sys, q, body, -1, tip);
      MatrixXd J(2, na);
      for (int k = 0; k < na; ++k) J.col(k) = Jfull.col(sys.actuated_idx[k]);
      prog.P += 2.0 * J.transpose() * J;
      prog.b += 2.0 * J.transpose() * (tip - target);
    }
    // Non-penetration rows for every planning collision pair.
    for (const PairSpec& pair : sys.collision_pairs) {
      const SdResult sd = pair_distance(sys, q, pair);
      if (sd.phi > 0.2) continue;  // far pairs cannot activate within the step box
      const ContactKinematics ck = make_contact_kinematics(sys, q, 0, pair, sd);
      ConeConstraint row;
      row.A = MatrixXd::Zero(1, na);
      for (int k = 0; k < na; ++k) row.A(0, k) = ck.J(0, sys.actuated_idx[k]);
      row.c = VectorXd::Constant(1, sd.phi);
      row.mu = 0.0;
      prog.cones.push_back(std::move(row));
    }
    // Step box and joint limits.
    for (int k = 0; k < na; ++k) {
      const int gi = sys.actuated_idx[k];
      double lo = -step_box, hi = step_box;
      if (q_lb_a) lo = std::max(lo, (*q_lb_a)[k] - q[gi]);
      if (q_ub_a) hi = std::min(hi, (*q_ub_a)[k] - q[gi]);
      ConeConstraint up, dn;
      up.A = MatrixXd::Zero(1, na);
      up.A(0, k) = -1.0;
      up.c = VectorXd::Constant(1, hi);
      up.mu = 0.0;
      dn.A = MatrixXd::Zero(1, na);
      dn.A(0, k) = 1.0;
      dn.c = VectorXd::Constant(1, -lo);
      dn.mu = 0.0;
      prog.cones.push_back(std::move(up));
      prog.cones.push_back(std::move(dn));
    }
    const ConicSolution sol = solve_socp(prog);
    if (sol.status != SolveStatus::kOptimal) break;
    for (int k = 0; k < na; ++k) q[sys.actuated_idx[k]] += sol.x[k];
    out.iterations = iter + 1;

    const double err = tip_error(q);
    if (err < best_err) {
      best_err = err;
      best_q = q;
    }
    if (last_improvement_err - err < 1e-8) {
      if (++stall >= 10) break;
    } else {
      stall = 0;
      last_improvement_err = err;
    }
  }
  if (tip_error(q) < 1e-4) out.converged = true;
  out.q_a = sys.actuated_part(best_q);
  out.residual = best_err;
  return out;
}

namespace {

// Moves a free robot body so its geometry touches the object surface
// (iterated normal projection; exact in one step for circles).
bool project_free_body(const SystemModel& sys, VectorXd* q, int body_index) {
  const Body& b = sys.bodies[body_index];
  for (int iter = 0; iter < 5; ++iter) {
    double phi_min = kInf;
    Vector2d normal(1, 0);
    for (const PairSpec& pair : sys.contact_pairs) {
      const bool a_is_robot = pair.body_a == body_index;
      const bool b_is_robot = pair.body_b == body_index;
      if (!a_is_robot && !b_is_robot) continue;
      const SdResult sd = pair_distance(sys, *q, pair);
      if (sd.phi < phi_min) {
        phi_min = sd.phi;
        normal = a_is_robot ? sd.normal : Vector2d(-sd.normal);
      }
    }
    if (!std::isfinite(phi_min)) return false;
    if (std::abs(phi_min) < 1e-9) return true;
    for (size_t k = 0; k < b.axes.size(); ++k) {
      const int gi = b.dof_start + static_cast<int>(k);
      if (b.axes[k] == DofAxis::kX) (*q)[gi] -= phi_min * normal.x();
      if (b.axes[k] == DofAxis::kY) (*q)[gi] -= phi_min * normal.y();
    }
  }
  return true;
}

// Nearest point on the object's surface, offset outward by `clearance`.
Vector2d project_point_to_object(const SystemModel& sys, const VectorXd& q, const Vector2d& p,
                                 double clearance) {
  Geom probe;
  probe.kind = GeomKind::kCircle;
  probe.radius = 1e-9;
  Pose2 pose;
  pose.p = p;
  double best_phi = kInf;
  SdResult best;
  int gcursor = 0;
  for (const Body& b : sys.bodies) {
    for (size_t gj = 0; gj < b.geoms.size(); ++gj, ++gcursor) {
      if (b.actuated || b.kind == BodyKind::kFixed) continue;
      const SdResult sd =
          signed_distance(probe, pose, b.geoms[gj], geom_world_pose(sys, q, gcursor));
      if (sd.phi < best_phi) {
        best_phi = sd.phi;
        best = sd;
      }
    }
  }
  if (!std::isfinite(best_phi)) return p;
  return best.witness_b + clearance * best.normal;
}

}  // namespace

GraspCandidate sample_grasps(const Scenario& sc, const VectorXd& q_o, const VectorXd& q_o_goal,
                             int n, double alpha, uint64_t seed,
                             std::vector<GraspCandidate>* all_out) {
  if (n < 1) throw Error("bad-input", "sample_grasps: n must be >= 1");
  const SystemModel& sys = sc.system;
  std::vector<int> robot_bodies;
  for (size_t i = 0; i < sys.bodies.size(); ++i)
    if (sys.bodies[i].actuated) robot_bodies.push_back(static_cast<int>(i));

  GraspCandidate best;
  best.cost = kInf;
  bool any_feasible = false;

  for (int s = 0; s < n; ++s) {
    Rng rng(seed, static_cast<uint64_t>(s));
    VectorXd q = sys.merge(q_o, sys.actuated_part(sys.default_q));
    bool ok = true;

    std::vector<std::pair<int, Vector2d>> ik_targets;
    for (int body : robot_bodies) {
      const Body& b = sys.bodies[body];
      Vector2d p(rng.uniform(sc.grasp.sample_lb[0], sc.grasp.sample_ub[0]),
                 rng.uniform(sc.grasp.sample_lb[1], sc.grasp.sample_ub[1]));
      if (b.kind == BodyKind::kFree) {
        for (size_t k = 0; k < b.axes.size(); ++k) {
          const int gi = b.dof_start + static_cast<int>(k);
          if (b.axes[k] == DofAxis::kX) q[gi] = p.x();
          if (b.axes[k] == DofAxis::kY) q[gi] = p.y();
        }
        ok = ok && project_free_body(sys, &q, body);
      } else if (b.kind == BodyKind::kChain) {
        const double tip_radius = b.geoms.empty() ? 0.0 : b.geoms.back().radius;
        ik_targets.push_back({body, project_point_to_object(sys, q, p, tip_radius)});
      }
    }
    if (!ik_targets.empty()) {
      const IkResult ik =
          ik_project(sys, q, ik_targets, sc.params.q_lb_a, sc.params.q_ub_a);
      q = sys.merge(q_o, ik.q_a);
      ok = ok && ik.residual < 5e-3;
    }

    GraspCandidate cand;
    cand.q_a = sys.actuated_part(q);

    // Feasibility record: joint limits and non-penetration.
    if (ok && sc.params.q_lb_a && sc.params.q_ub_a) {
      for (int k = 0; k < sys.n_qa; ++k)
        if (cand.q_a[k] < (*sc.params.q_lb_a)[k] - 1e-9 ||
            cand.q_a[k] > (*sc.params.q_ub_a)[k] + 1e-9)
          ok = false;
    }
    if (ok) {
      for (const PairSpec& pair : sys.collision_pairs) {
        if (pair_distance(sys, q, pair).phi < -1e-6) {
          ok = false;
          break;
        }
      }
    }
    cand.feasible = ok;
    if (!ok) {
      if (all_out) all_out->push_back(cand);
      continue;
    }

    cand.value = value_function(sc, cand.q_a, q_o, q_o_goal, &cand.value_infeasible);
    cand.radius = robustness_radius(sc, cand.q_a, q_o, 1000, seed + 7919 * (s + 1));
    cand.cost = cand.value - alpha * cand.radius * cand.radius;
    any_feasible = true;
    if (cand.cost < best.cost) best = cand;
    if (all_out) all_out->push_back(cand);
  }
  if (!any_feasible) throw Error("no-feasible-grasp", "sample_grasps: all samples rejected");
  return best;
}

}  // namespace ctr
