#include "ctr/planner.hpp"

#include <cmath>

#include "ctr/cqdc.hpp"

namespace ctr {

namespace {

TrustRegionVariant action_only_variant(TrustRegionVariant v) {
  switch (v) {
    case TrustRegionVariant::kCtr:
      return TrustRegionVariant::kActr;
    case TrustRegionVariant::kRctr:
      return TrustRegionVariant::kRactr;
    default:
      return v;
  }
}

// Ellipsoid membership as a standard SOC row block (1; L' dz).
ConeConstraint ellipsoid_cone(const MatrixXd& sigma, const MatrixXd& cols) {
  Eigen::LLT<MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw Error("bad-input", "trust region sigma must be SPD");
  const MatrixXd L = llt.matrixL();
  ConeConstraint cone;
  const int dz = static_cast<int>(sigma.rows());
  cone.A = MatrixXd::Zero(dz + 1, cols.cols());
  cone.A.bottomRows(dz) = L.transpose() * cols;
  cone.c = VectorXd::Zero(dz + 1);
  cone.c[0] = 1.0;
  cone.mu = 1.0;
  return cone;
}

}  // namespace

double object_error(const SystemModel& sys, const VectorXd& q, const VectorXd& q_o_goal) {
  const VectorXd q_o = sys.object_part(q);
  double trans2 = 0.0, rot = 0.0;
  int k = 0;
  for (const Body& b : sys.bodies) {
    if (b.actuated || b.kind == BodyKind::kFixed) continue;
    for (DofAxis a : b.axes) {
      const double d = q_o[k] - q_o_goal[k];
      if (a == DofAxis::kTheta) {
        rot += std::abs(std::atan2(std::sin(d), std::cos(d)));
      } else {
        trans2 += d * d;
      }
      ++k;
    }
    if (b.kind == BodyKind::kChain) k += b.ndof();
  }
  return std::sqrt(trans2) + rot;
}

VectorXd goal_configuration(const SystemModel& sys, const VectorXd& q_o_goal,
                            const VectorXd& q_reference) {
  return sys.merge(q_o_goal, sys.actuated_part(q_reference));
}

SubTrajOptResult sub_trajopt(const SystemModel& sys, const std::vector<VectorXd>& q_nominal,
                             const std::vector<VectorXd>& u_nominal, const VectorXd& u_prev,
                             const VectorXd& q_goal, const PlannerParams& params) {
  const int T = static_cast<int>(u_nominal.size());
  if (static_cast<int>(q_nominal.size()) != T + 1)
    throw Error("bad-input", "sub_trajopt: nominal lengths inconsistent");
  const int nq = sys.nq;
  const int na = sys.n_qa;
  const int nvar = T * nq + T * na;
  auto qcol = [&](int t) { return (t - 1) * nq; };        // t in [1, T]
  auto ucol = [&](int t) { return T * nq + t * na; };     // t in [0, T-1]

  // Linearizations and trust regions per knot.
  std::vector<LinearizedDynamics> lin(T);
  std::vector<TrustRegionConstraints> region(T);
  for (int t = 0; t < T; ++t) {
    lin[t] = linearize_u(sys, q_nominal[t], u_nominal[t], params.kappa);
    TrustRegionSpec spec;
    spec.variant = (t == 0) ? action_only_variant(params.variant) : params.variant;
    spec.radius = params.radius;
    spec.kappa = params.kappa;
    spec.q_lb_a = params.q_lb_a;
    spec.q_ub_a = params.q_ub_a;
    spec.tau_lb = params.tau_lb;
    spec.tau_ub = params.tau_ub;
    const bool action_only_knot = (t == 0) || is_action_only(params.variant);
    if (!action_only_knot) linearize_q(sys, &lin[t], QLinearizationMode::kFiniteDifference);
    if (t == 0 && spec.variant == TrustRegionVariant::kEtr) {
      // Plain ellipsoid over du only at the pinned first knot.
      spec.variant = TrustRegionVariant::kRactr;
      region[t] = build_trust_region(spec, lin[t], sys);
      region[t].dual_cones.clear();
      region[t].variant = TrustRegionVariant::kEtr;
    } else {
      region[t] = build_trust_region(spec, lin[t], sys);
    }
  }

  ConicProgram prog;
  prog.P = MatrixXd::Zero(nvar, nvar);
  prog.b = VectorXd::Zero(nvar);

  // Terminal tracking cost ||q_goal - (qbar_T + dq_T)||^2_Q.
  {
    const VectorXd v = q_nominal[T] - q_goal;
    prog.P.block(qcol(T), qcol(T), nq, nq) += 2.0 * params.Q;
    prog.b.segment(qcol(T), nq) += 2.0 * params.Q * v;
  }
  // Action smoothness sum_t ||u_t - u_{t-1}||^2_R.
  for (int t = 0; t < T; ++t) {
    const VectorXd bar = (t == 0) ? VectorXd(u_nominal[0] - u_prev)
                                  : VectorXd(u_nominal[t] - u_nominal[t - 1]);
    prog.P.block(ucol(t), ucol(t), na, na) += 2.0 * params.R;
    prog.b.segment(ucol(t), na) += 2.0 * params.R * bar;
    if (t > 0) {
      prog.P.block(ucol(t - 1), ucol(t - 1), na, na) += 2.0 * params.R;
      prog.P.block(ucol(t), ucol(t - 1), na, na) -= 2.0 * params.R;
      prog.P.block(ucol(t - 1), ucol(t), na, na) -= 2.0 * params.R;
      prog.b.segment(ucol(t - 1), na) -= 2.0 * params.R * bar;
    }
  }

  // Linear dynamics equalities dq_{t+1} = A_t dq_t + B_t du_t, dq_0 = 0.
  prog.E = MatrixXd::Zero(T * nq, nvar);
  prog.f = VectorXd::Zero(T * nq);
  for (int t = 0; t < T; ++t) {
    prog.E.block(t * nq, qcol(t + 1), nq, nq) = MatrixXd::Identity(nq, nq);
    if (t > 0) prog.E.block(t * nq, qcol(t), nq, nq) = -lin[t].A;
    prog.E.block(t * nq, ucol(t), nq, na) = -lin[t].B;
  }

  // Trust regions per knot, embedded into the stacked variable.
  for (int t = 0; t < T; ++t) {
    const int dz = region[t].dim();
    MatrixXd cols = MatrixXd::Zero(dz, nvar);
    if (region[t].dim_q > 0)
      cols.block(0, qcol(t), nq, nq) = MatrixXd::Identity(nq, nq);  // t >= 1 only
    cols.block(region[t].dim_q, ucol(t), na, na) = MatrixXd::Identity(na, na);

    prog.cones.push_back(ellipsoid_cone(region[t].sigma, cols));
    auto embed = [&](const ConeConstraint& local) {
      ConeConstraint cone;
      cone.A = local.A * cols;
      cone.c = local.c;
      cone.mu = local.mu;
      prog.cones.push_back(std::move(cone));
    };
    for (const auto& cone : region[t].primal_cones) embed(cone);
    for (const auto& cone : region[t].dual_cones) embed(cone);
    for (const auto& cone : region[t].limit_rows) embed(cone);
  }

  // Relative input bounds |u_t - u_{t-1}| <= eta. The t = 0 row against the
  // previously executed input is kept only when the nominal already honors
  // it (a fresh heuristic guess may legitimately jump).
  auto rate_rows = [&](int t, const VectorXd& bar) {
    for (int k = 0; k < na; ++k) {
      ConeConstraint up, dn;
      up.A = MatrixXd::Zero(1, nvar);
      up.A(0, ucol(t) + k) = -1.0;
      if (t > 0) up.A(0, ucol(t - 1) + k) = 1.0;
      up.c = VectorXd::Constant(1, params.eta - bar[k]);
      up.mu = 0.0;
      dn.A = -up.A;
      dn.c = VectorXd::Constant(1, params.eta + bar[k]);
      dn.mu = 0.0;
      prog.cones.push_back(std::move(up));
      prog.cones.push_back(std::move(dn));
    }
  };
  for (int t = 1; t < T; ++t) rate_rows(t, u_nominal[t] - u_nominal[t - 1]);
  if ((u_nominal[0] - u_prev).cwiseAbs().maxCoeff() <= params.eta + 1e-12)
    rate_rows(0, u_nominal[0] - u_prev);

  const ConicSolution sol = solve_socp(prog);
  SubTrajOptResult out;
  if (sol.status == SolveStatus::kInfeasible) {
    out.infeasible = true;
    for (int t = 0; t < T && out.infeasible_knot < 0; ++t)
      if (!contains(region[t], VectorXd::Zero(region[t].dim()), 1e-9)) out.infeasible_knot = t;
    return out;
  }
  if (sol.status != SolveStatus::kOptimal)
    throw Error(to_string(sol.status), "sub_trajopt: SOCP solve failed");

  for (int t = 0; t < T; ++t) out.du.push_back(sol.x.segment(ucol(t), na));
  // True quadratic objective at the solution.
  {
    const VectorXd q_T = q_nominal[T] + sol.x.segment(qcol(T), nq);
    VectorXd err = q_goal - q_T;
    out.objective = err.dot(params.Q * err);
    VectorXd prev = u_prev;
    for (int t = 0; t < T; ++t) {
      const VectorXd ut = u_nominal[t] + out.du[t];
      out.objective += (ut - prev).dot(params.R * (ut - prev));
      prev = ut;
    }
  }
  return out;
}

TrajOptResult ctr_trajopt(const SystemModel& sys, const VectorXd& q0, const VectorXd& q_goal,
                          const std::vector<VectorXd>& u_guess, const PlannerParams& params,
                          const VectorXd& u_prev) {
  TrajOptResult result;
  result.u = u_guess;
  const int T = static_cast<int>(u_guess.size());
  double prev_cost = std::numeric_limits<double>::infinity();
  for (int n = 0; n < params.n_max; ++n) {
    std::vector<VectorXd> q_nominal{q0};
    for (int t = 0; t < T; ++t)
      q_nominal.push_back(step_nonsmooth(sys, q_nominal.back(), result.u[t]).q_next);

    SubTrajOptResult sub;
    try {
      sub = sub_trajopt(sys, q_nominal, result.u, u_prev, q_goal, params);
    } catch (const Error& e) {
      if (std::string(e.kind()) == "infeasible-start") {
        result.infeasible = true;
        ++result.infeasible_subproblems;
        return result;
      }
      throw;
    }
    if (sub.infeasible) {
      result.infeasible = true;
      ++result.infeasible_subproblems;
      return result;
    }
    double du_norm = 0.0;
    for (int t = 0; t < T; ++t) {
      result.u[t] += sub.du[t];
      du_norm = std::max(du_norm, sub.du[t].cwiseAbs().maxCoeff());
    }
    result.subproblem_costs.push_back(sub.objective);
    ++result.iterations;
    if (du_norm < params.convergence_tol ||
        std::abs(prev_cost - sub.objective) < params.cost_decrease_tol) {
      result.converged = true;
      break;
    }
    prev_cost = sub.objective;
  }
  return result;
}

HeuristicResult initial_guess_heuristic(const SystemModel& sys, const VectorXd& q0,
                                        double kappa_pull, double phi_contact,
                                        int max_iterations) {
  // Track pairs coupling an actuated body to the object.
  std::vector<int> tracked;
  for (size_t i = 0; i < sys.contact_pairs.size(); ++i) {
    const PairSpec& p = sys.contact_pairs[i];
    if (sys.bodies[p.body_a].actuated || sys.bodies[p.body_b].actuated)
      tracked.push_back(static_cast<int>(i));
  }
  HeuristicResult out;
  VectorXd q = q0;
  VectorXd best_q = q0;
  double best_phi = std::numeric_limits<double>::infinity();
  if (tracked.empty()) {
    out.u = sys.actuated_part(q0);
    out.reached = true;
    return out;
  }

  for (int iter = 0; iter < max_iterations; ++iter) {
    double max_phi = -std::numeric_limits<double>::infinity();
    VectorXd tau = VectorXd::Zero(sys.n_qa);
    for (int pi : tracked) {
      const PairSpec& pair = sys.contact_pairs[pi];
      const SdResult sd = pair_distance(sys, q, pair);
      max_phi = std::max(max_phi, sd.phi);
      if (sd.phi <= phi_contact) continue;
      const ContactKinematics ck = make_contact_kinematics(sys, q, pi, pair, sd);
      VectorXd nu = VectorXd::Zero(ck.d);
      nu[0] = sd.phi;
      const VectorXd lam = central_path_dual(nu, ck.d == 1 ? 0.0 : ck.mu, kappa_pull);
      const VectorXd gen = ck.J.transpose() * lam;
      for (int k = 0; k < sys.n_qa; ++k) tau[k] -= gen[sys.actuated_idx[k]];
    }
    if (max_phi < best_phi) {
      best_phi = max_phi;
      best_q = q;
    }
    if (max_phi <= phi_contact) {
      out.u = sys.actuated_part(q);
      out.reached = true;
      out.iterations = iter;
      return out;
    }

    VectorXd dqa = sys.h * tau.cwiseQuotient(sys.k_a);
    const double cap = 0.02;
    const double step_norm = dqa.cwiseAbs().maxCoeff();
    if (step_norm > cap) dqa *= cap / step_norm;
    if (step_norm < 1e-14) break;  // no pull left (e.g. zero Jacobian columns)

    // Backtrack so no tracked pair overshoots into penetration.
    for (int bt = 0; bt < 40; ++bt) {
      VectorXd q_try = q;
      for (int k = 0; k < sys.n_qa; ++k) q_try[sys.actuated_idx[k]] += dqa[k];
      double min_phi = std::numeric_limits<double>::infinity();
      for (int pi : tracked)
        min_phi = std::min(min_phi, pair_distance(sys, q_try, sys.contact_pairs[pi]).phi);
      if (min_phi >= 0.0) {
        q = q_try;
        break;
      }
      dqa *= 0.5;
    }
    out.iterations = iter + 1;
  }
  out.u = sys.actuated_part(best_q);
  out.reached = false;
  return out;
}

MpcLog mpc_rollout(const SystemModel& sys, const VectorXd& q0, const VectorXd& q_goal,
                   const PlannerParams& params, bool heuristic_every_step) {
  MpcLog log;
  VectorXd q = q0;
  log.traj.q.push_back(q);
  VectorXd u_prev = sys.actuated_part(q0);
  std::vector<VectorXd> warm;
  for (int t = 0; t < params.H; ++t) {
    std::vector<VectorXd> guess;
    if (t == 0 || heuristic_every_step || warm.empty()) {
      const HeuristicResult h =
          initial_guess_heuristic(sys, q, params.kappa_pull, params.phi_contact);
      guess.assign(params.T, h.u);
    } else {
      guess = warm;
    }
    const TrajOptResult res = ctr_trajopt(sys, q, q_goal, guess, params, u_prev);
    log.subproblems += res.iterations;
    log.infeasible_subproblems += res.infeasible_subproblems;
    if (res.infeasible) {
      log.terminated_early = true;
      break;
    }
    const VectorXd u_exec = res.u[0];
    const StepResult step = step_nonsmooth(sys, q, u_exec);
    q = step.q_next;
    log.traj.q.push_back(q);
    log.traj.u.push_back(u_exec);
    log.traj.forces.push_back(step.forces);
    const VectorXd err = q_goal - q;
    log.traj.step_cost.push_back(err.dot(params.Q * err));
    warm = res.u;
    u_prev = u_exec;
  }
  return log;
}

SecondOrderLog mpc_second_order(const SystemModel& sys, const SoftPlant& plant,
                                const VectorXd& q0, const VectorXd& q_o_goal,
                                const PlannerParams& params, bool projected_variant) {
  SecondOrderLog log;
  SoftPlantState state = plant.make_state(q0);

  std::vector<int> tracked;
  for (size_t i = 0; i < sys.contact_pairs.size(); ++i) {
    const PairSpec& p = sys.contact_pairs[i];
    if (sys.bodies[p.body_a].actuated || sys.bodies[p.body_b].actuated)
      tracked.push_back(static_cast<int>(i));
  }
  int consecutive_lost = 0;
  const double lost_gap = 0.005;
  auto update_contact_tracking = [&]() {
    double min_phi = std::numeric_limits<double>::infinity();
    for (int pi : tracked)
      min_phi = std::min(min_phi, pair_distance(sys, state.q, sys.contact_pairs[pi]).phi);
    if (min_phi > lost_gap) {
      ++consecutive_lost;
      if (consecutive_lost == 6) ++log.lost_contact_events;
    } else {
      consecutive_lost = 0;
    }
  };

  for (int i = 0; i < params.replans; ++i) {
    const VectorXd goal_full = goal_configuration(sys, q_o_goal, state.q);
    const MpcLog mpc = mpc_rollout(sys, state.q, goal_full, params, projected_variant);
    if (mpc.traj.u.empty()) break;
    for (const VectorXd& u : mpc.traj.u) {
      state = plant.advance(state, u, sys.h);
      log.plant_q.push_back(state.q);
      update_contact_tracking();
    }
    ++log.replans;
    if (object_error(sys, state.q, q_o_goal) < params.goal_tolerance) break;
  }
  log.final_state = state;
  log.terminal_error = object_error(sys, state.q, q_o_goal);
  return log;
}

std::vector<GoalSample> generate_goals(const SystemModel& sys, const VectorXd& q_nominal,
                                       int n, uint64_t seed, const PlannerParams& params,
                                       double enlarge) {
  const VectorXd u_nominal = sys.actuated_part(q_nominal);
  const LinearizedDynamics lin = linearize_u(sys, q_nominal, u_nominal, params.kappa);
  TrustRegionSpec spec =
      TrustRegionSpec::ball(TrustRegionVariant::kRactr, params.radius * enlarge, params.kappa);
  const TrustRegionConstraints cs = build_trust_region(spec, lin, sys);
  const TrustRegionSamples samples =
      sample_trust_region(cs, std::max(1000, 10 * n), seed);
  const std::vector<VectorXd> images = motion_set_samples(lin, samples.samples, sys, true);
  const VectorXd center = sys.object_part(lin.f_nominal);

  double spread = 0.0;
  for (const VectorXd& p : images) spread = std::max(spread, (p - center).norm());
  if (spread < 1e-9) throw Error("degenerate-region", "object motion set has no extent");

  Rng dir_rng(seed, 1);
  std::vector<GoalSample> goals;
  for (int k = 0; k < n; ++k) {
    VectorXd d = dir_rng.gaussian_vector(sys.n_qo);
    const double dn = d.norm();
    if (dn < 1e-12) {
      d = VectorXd::Unit(sys.n_qo, 0);
    } else {
      d /= dn;
    }
    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < images.size(); ++i) {
      const double v = d.dot(images[i] - center);
      if (v > best_val) {
        best_val = v;
        best = static_cast<int>(i);
      }
    }
    goals.push_back({q_nominal, images[best]});
  }
  return goals;
}

}  // namespace ctr
