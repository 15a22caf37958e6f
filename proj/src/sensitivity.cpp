#include "ctr/sensitivity.hpp"

#include <cmath>

namespace ctr {

namespace {

// -db/du = [0; K_a] scattered over actuated rows.
MatrixXd minus_db_du(const SystemModel& sys) {
  MatrixXd out = MatrixXd::Zero(sys.nq, sys.n_qa);
  for (int i = 0; i < sys.n_qa; ++i) out(sys.actuated_idx[i], i) = sys.k_a[i];
  return out;
}

std::vector<int> pair_list(const std::vector<ContactKinematics>& contacts) {
  std::vector<int> pairs;
  for (const auto& ck : contacts) pairs.push_back(ck.pair_index);
  return pairs;
}

}  // namespace

LinearizedDynamics linearize_u(const SystemModel& sys, const VectorXd& q_nominal,
                               const VectorXd& u_nominal, double kappa,
                               const BarrierOptions& opts) {
  const StepResult step = step_smoothed(sys, q_nominal, u_nominal, kappa, opts);
  LinearizedDynamics lin;
  lin.q_nominal = q_nominal;
  lin.u_nominal = u_nominal;
  lin.kappa = kappa;
  lin.f_nominal = step.q_next;
  lin.lambda_nominal = step.forces;
  lin.slack_nominal = step.slacks;
  lin.contacts = step.problem.contacts;

  Eigen::LLT<MatrixXd> llt(step.barrier_hessian);
  if (llt.info() != Eigen::Success)
    throw Error("numerical-failure", "linearize_u: Hessian factorization failed");
  lin.B = llt.solve(minus_db_du(sys));

  for (size_t i = 0; i < lin.contacts.size(); ++i) {
    const ContactKinematics& ck = lin.contacts[i];
    const double mu_cone = (ck.d == 1) ? 0.0 : ck.mu;
    const MatrixXd S = central_path_dual_jacobian(lin.slack_nominal[i], mu_cone, kappa);
    lin.D.push_back(S * (ck.J * lin.B));
  }
  return lin;
}

void linearize_q(const SystemModel& sys, LinearizedDynamics* lin, QLinearizationMode mode,
                 double fd_step) {
  const int nq = sys.nq;
  lin->A.resize(nq, nq);
  lin->C.assign(lin->contacts.size(), MatrixXd());
  for (size_t i = 0; i < lin->contacts.size(); ++i)
    lin->C[i] = MatrixXd::Zero(lin->contacts[i].d, nq);

  if (mode == QLinearizationMode::kFiniteDifference) {
    const std::vector<int> pairs = pair_list(lin->contacts);
    BarrierOptions tight;
    tight.tol = 1e-13;
    for (int j = 0; j < nq; ++j) {
      VectorXd qp = lin->q_nominal, qm = lin->q_nominal;
      qp[j] += fd_step;
      qm[j] -= fd_step;
      const StepResult sp = step_smoothed(sys, qp, lin->u_nominal, lin->kappa, tight, &pairs);
      const StepResult sm = step_smoothed(sys, qm, lin->u_nominal, lin->kappa, tight, &pairs);
      lin->A.col(j) = (sp.q_next - sm.q_next) / (2.0 * fd_step);
      for (size_t i = 0; i < lin->contacts.size(); ++i)
        lin->C[i].col(j) = (sp.forces[i] - sm.forces[i]) / (2.0 * fd_step);
    }
    lin->q_mode = "finite-difference";
  } else {
    // Frozen geometry: only b and c_i vary with q; J_i held at the nominal.
    // dc/dq has a zero normal row (the J q term cancels dphi/dq) and -J_t
    // tangential rows.
    const StepResult step = step_smoothed(sys, lin->q_nominal, lin->u_nominal, lin->kappa, {},
                                          nullptr);
    MatrixXd db_dq = MatrixXd::Zero(nq, nq);
    const MatrixXd object_block = sys.epsilon * sys.mass_o / (sys.h * sys.h);
    for (int i = 0; i < sys.n_qo; ++i)
      for (int j = 0; j < sys.n_qo; ++j)
        db_dq(sys.unactuated_idx[i], sys.unactuated_idx[j]) = -object_block(i, j);

    MatrixXd rhs = -db_dq;
    std::vector<MatrixXd> S(lin->contacts.size());
    std::vector<MatrixXd> dc_dq(lin->contacts.size());
    for (size_t i = 0; i < lin->contacts.size(); ++i) {
      const ContactKinematics& ck = lin->contacts[i];
      const double mu_cone = (ck.d == 1) ? 0.0 : ck.mu;
      S[i] = central_path_dual_jacobian(lin->slack_nominal[i], mu_cone, lin->kappa);
      dc_dq[i] = MatrixXd::Zero(ck.d, nq);
      if (ck.d == 2) dc_dq[i].row(1) = -ck.J.row(1);
      rhs += ck.J.transpose() * S[i] * dc_dq[i];
    }
    Eigen::LLT<MatrixXd> llt(step.barrier_hessian);
    if (llt.info() != Eigen::Success)
      throw Error("numerical-failure", "linearize_q: Hessian factorization failed");
    lin->A = llt.solve(rhs);
    for (size_t i = 0; i < lin->contacts.size(); ++i)
      lin->C[i] = S[i] * (lin->contacts[i].J * lin->A + dc_dq[i]);
    lin->q_mode = "frozen-geometry";
  }
  lin->has_A = true;
}

double taylor_residual(const SystemModel& sys, const LinearizedDynamics& lin,
                       const VectorXd& dq, const VectorXd& du) {
  if (!lin.has_A && dq.cwiseAbs().maxCoeff() > 0.0)
    throw Error("bad-input", "taylor_residual: configuration perturbation needs linearize_q");

  VectorXd q_hat = lin.f_nominal + lin.B * du;
  if (lin.has_A) q_hat += lin.A * dq;
  std::vector<VectorXd> lam_hat(lin.contacts.size());
  for (size_t i = 0; i < lin.contacts.size(); ++i) {
    lam_hat[i] = lin.lambda_nominal[i] + lin.D[i] * du;
    if (lin.has_A) lam_hat[i] += lin.C[i] * dq;
  }

  // Re-assemble P, b, J, c at the perturbed nominal with the same pairing.
  const std::vector<int> pairs = pair_list(lin.contacts);
  const DynamicsProblem hat =
      assemble(sys, lin.q_nominal + dq, lin.u_nominal + du, -1.0, &pairs);

  VectorXd stationarity = hat.P * q_hat + hat.b;
  VectorXd comp(lin.contacts.size());
  for (size_t i = 0; i < lin.contacts.size(); ++i) {
    stationarity -= hat.contacts[i].J.transpose() * lam_hat[i];
    const VectorXd nu_hat = hat.contacts[i].J * q_hat + hat.contacts[i].c_offset;
    const double target = (hat.contacts[i].d == 1 ? 1.0 : 2.0) / lin.kappa;
    comp[static_cast<int>(i)] = nu_hat.dot(lam_hat[i]) - target;
  }
  return std::sqrt(stationarity.squaredNorm() + comp.squaredNorm());
}

}  // namespace ctr
