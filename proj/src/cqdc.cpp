#include "ctr/cqdc.hpp"

#include <cmath>

namespace ctr {

const char* to_string(ContactMode m) {
  switch (m) {
    case ContactMode::kSeparation:
      return "separation";
    case ContactMode::kSticking:
      return "sticking";
    case ContactMode::kSlidingPos:
      return "sliding+";
    case ContactMode::kSlidingNeg:
      return "sliding-";
  }
  return "unknown";
}

ConicProgram DynamicsProblem::to_conic() const {
  ConicProgram prog;
  prog.P = P;
  prog.b = b;
  prog.E = MatrixXd(0, P.rows());
  prog.f = VectorXd(0);
  for (const ContactKinematics& ck : contacts) {
    ConeConstraint cone;
    cone.A = ck.J;
    cone.c = ck.c_offset;
    cone.mu = (ck.d == 1) ? 0.0 : ck.mu;
    prog.cones.push_back(std::move(cone));
  }
  return prog;
}

DynamicsProblem assemble(const SystemModel& sys, const VectorXd& q, const VectorXd& u,
                         double phi_threshold, const std::vector<int>* pair_indices) {
  if (q.size() != sys.nq || u.size() != sys.n_qa)
    throw Error("bad-input", "assemble: dimension mismatch");
  DynamicsProblem prob;
  prob.P = MatrixXd::Zero(sys.nq, sys.nq);
  const MatrixXd object_block = sys.epsilon * sys.mass_o / (sys.h * sys.h);
  for (int i = 0; i < sys.n_qo; ++i)
    for (int j = 0; j < sys.n_qo; ++j)
      prob.P(sys.unactuated_idx[i], sys.unactuated_idx[j]) = object_block(i, j);
  for (int i = 0; i < sys.n_qa; ++i)
    prob.P(sys.actuated_idx[i], sys.actuated_idx[i]) = sys.k_a[i];

  prob.b = VectorXd::Zero(sys.nq);
  const VectorXd q_o = sys.object_part(q);
  const VectorXd bo = object_block * q_o + sys.tau_o;
  for (int i = 0; i < sys.n_qo; ++i) prob.b[sys.unactuated_idx[i]] = -bo[i];
  for (int i = 0; i < sys.n_qa; ++i)
    prob.b[sys.actuated_idx[i]] = -(sys.k_a[i] * u[i] + sys.tau_a[i]);

  const double threshold = (phi_threshold >= 0.0) ? phi_threshold : sys.phi_threshold;
  if (pair_indices) {
    for (int pi : *pair_indices) {
      const PairSpec& pair = sys.contact_pairs[pi];
      prob.contacts.push_back(
          make_contact_kinematics(sys, q, pi, pair, pair_distance(sys, q, pair)));
    }
  } else {
    prob.contacts = detect_contacts(sys, q, threshold);
  }
  return prob;
}

StepResult step_nonsmooth(const SystemModel& sys, const VectorXd& q, const VectorXd& u,
                          const SocpOptions& opts, const std::vector<int>* pair_indices) {
  StepResult out;
  out.problem = assemble(sys, q, u, -1.0, pair_indices);
  const ConicSolution sol = solve_socp(out.problem.to_conic(), opts);
  out.status = sol.status;
  if (sol.status != SolveStatus::kOptimal)
    throw Error(to_string(sol.status), "step_nonsmooth: contact SOCP failed");
  out.q_next = sol.x;
  out.forces = sol.cone_duals;
  for (const ContactKinematics& ck : out.problem.contacts)
    out.slacks.push_back(ck.J * sol.x + ck.c_offset);
  return out;
}

StepResult step_smoothed(const SystemModel& sys, const VectorXd& q, const VectorXd& u,
                         double kappa, const BarrierOptions& opts,
                         const std::vector<int>* pair_indices) {
  StepResult out;
  out.kappa = kappa;
  out.problem = assemble(sys, q, u, -1.0, pair_indices);
  const ConicProgram prog = out.problem.to_conic();

  // Strictly feasible start: begin at the current configuration and retract
  // along contact normals until every slack clears 1e-6.
  VectorXd x0 = q;
  for (int round = 0; round < 200; ++round) {
    double worst = 1.0;
    int worst_i = -1;
    for (size_t i = 0; i < out.problem.contacts.size(); ++i) {
      const ContactKinematics& ck = out.problem.contacts[i];
      const VectorXd nu = ck.J * x0 + ck.c_offset;
      const double margin =
          (ck.d == 1) ? nu[0] : nu[0] - ck.mu * nu.tail(nu.size() - 1).norm();
      if (margin < worst) {
        worst = margin;
        worst_i = static_cast<int>(i);
      }
    }
    if (worst >= 1e-6 || worst_i < 0) break;
    const ContactKinematics& ck = out.problem.contacts[worst_i];
    const VectorXd jn = ck.J.row(0).transpose();
    const double jn2 = jn.squaredNorm();
    if (jn2 < 1e-12) throw Error("infeasible-start", "degenerate contact normal");
    x0 += jn * ((2e-6 - worst) / jn2);
    if (round == 199) throw Error("infeasible-start", "normal retraction did not converge");
  }

  const BarrierResult res = solve_barrier_newton(prog, kappa, x0, opts);
  out.status = SolveStatus::kOptimal;
  out.q_next = res.x;
  out.barrier_hessian = res.hessian;
  out.forces = res.duals;
  out.slacks = res.slacks;
  return out;
}

std::vector<ContactMode> classify_modes(const StepResult& result, double tol) {
  std::vector<ContactMode> modes;
  for (size_t i = 0; i < result.problem.contacts.size(); ++i) {
    const ContactKinematics& ck = result.problem.contacts[i];
    const VectorXd& lam = result.forces[i];
    const VectorXd& nu = result.slacks[i];
    if (ck.d == 1) {
      modes.push_back((lam[0] <= tol && nu[0] > tol) ? ContactMode::kSeparation
                                                     : ContactMode::kSticking);
      continue;
    }
    const double lam_n = lam[0];
    const double lam_t = lam[1];
    if (lam.norm() <= tol && nu[0] > tol) {
      modes.push_back(ContactMode::kSeparation);
    } else if (ck.mu * lam_n - std::abs(lam_t) > tol * (1.0 + lam_n)) {
      modes.push_back(ContactMode::kSticking);
    } else {
      modes.push_back(lam_t >= 0.0 ? ContactMode::kSlidingPos : ContactMode::kSlidingNeg);
    }
  }
  return modes;
}

KktResiduals kkt_residuals(const StepResult& result) {
  KktResiduals r;
  VectorXd balance = result.problem.P * result.q_next + result.problem.b;
  for (size_t i = 0; i < result.problem.contacts.size(); ++i)
    balance -= result.problem.contacts[i].J.transpose() * result.forces[i];
  r.stationarity = balance.size() ? balance.cwiseAbs().maxCoeff() : 0.0;

  const bool smoothed = std::isfinite(result.kappa);
  for (size_t i = 0; i < result.problem.contacts.size(); ++i) {
    const ContactKinematics& ck = result.problem.contacts[i];
    const VectorXd nu = ck.J * result.q_next + ck.c_offset;
    const VectorXd& lam = result.forces[i];
    if (ck.d == 1) {
      r.primal = std::max(r.primal, -nu[0]);
      r.dual = std::max(r.dual, -lam[0]);
    } else {
      r.primal = std::max(r.primal, ck.mu * nu.tail(nu.size() - 1).norm() - nu[0]);
      r.dual = std::max(r.dual, lam.tail(lam.size() - 1).norm() - ck.mu * lam[0]);
    }
    const double target = smoothed ? ((ck.d == 1 ? 1.0 : 2.0) / result.kappa) : 0.0;
    r.complementarity = std::max(r.complementarity, std::abs(nu.dot(lam) - target));
  }
  return r;
}

}  // namespace ctr
