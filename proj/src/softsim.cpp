#include "ctr/softsim.hpp"

#include <cmath>

namespace ctr {

SoftPlant::SoftPlant(const SystemModel& sys, const SoftParams& params)
    : sys_(sys), params_(params) {
  mass_ = MatrixXd::Zero(sys.nq, sys.nq);
  for (int i = 0; i < sys.n_qo; ++i)
    for (int j = 0; j < sys.n_qo; ++j)
      mass_(sys.unactuated_idx[i], sys.unactuated_idx[j]) = sys.mass_o(i, j);
  for (int i = 0; i < sys.n_qa; ++i)
    mass_(sys.actuated_idx[i], sys.actuated_idx[i]) = params.robot_mass;
  mass_llt_.compute(mass_);
}

SoftPlantState SoftPlant::make_state(const VectorXd& q) const {
  SoftPlantState s;
  s.q = q;
  s.v = VectorXd::Zero(sys_.nq);
  return s;
}

VectorXd SoftPlant::generalized_force(const SoftPlantState& state, const VectorXd& u) const {
  VectorXd force = VectorXd::Zero(sys_.nq);
  for (int i = 0; i < sys_.n_qo; ++i) force[sys_.unactuated_idx[i]] += sys_.tau_o[i];
  for (int i = 0; i < sys_.n_qa; ++i) {
    const int gi = sys_.actuated_idx[i];
    force[gi] += sys_.tau_a[i] + sys_.k_a[i] * (u[i] - state.q[gi]) -
                 params_.robot_damping * state.v[gi];
  }
  for (int i = 0; i < sys_.n_qo; ++i) {
    const int gi = sys_.unactuated_idx[i];
    force[gi] -= params_.object_damping * state.v[gi];
  }

  // Penalty contact on penetrating pairs only.
  const auto contacts = detect_contacts(sys_, state.q, 0.0);
  for (const ContactKinematics& ck : contacts) {
    const double phi_dot = ck.J.row(0).dot(state.v);
    const double fn =
        std::max(0.0, -params_.k_n * ck.phi - params_.contact_damping * phi_dot);
    force += ck.J.row(0).transpose() * fn;
    if (ck.d == 2) {
      const double vt = ck.J.row(1).dot(state.v);
      const double ft = -std::min(ck.mu * fn, params_.friction_slope * std::abs(vt)) *
                        ((vt >= 0.0) ? 1.0 : -1.0);
      force += ck.J.row(1).transpose() * ft;
    }
  }
  return force;
}

SoftPlantState SoftPlant::step_soft(const SoftPlantState& state, const VectorXd& u) const {
  SoftPlantState next;
  const VectorXd force = generalized_force(state, u);
  next.v = state.v + params_.dt * mass_llt_.solve(force);
  next.q = state.q + params_.dt * next.v;
  next.time = state.time + params_.dt;
  if (!next.q.allFinite() || !next.v.allFinite() ||
      next.q.cwiseAbs().maxCoeff() > params_.workspace_bound) {
    throw Error("plant-diverged", "soft plant state left the workspace");
  }
  return next;
}

SoftPlantState SoftPlant::advance(const SoftPlantState& state, const VectorXd& u,
                                  double duration) const {
  const int steps = std::max(1, static_cast<int>(std::lround(duration / params_.dt)));
  SoftPlantState s = state;
  for (int i = 0; i < steps; ++i) s = step_soft(s, u);
  return s;
}

}  // namespace ctr
