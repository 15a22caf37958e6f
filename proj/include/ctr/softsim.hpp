#pragma once

#include "ctr/scenario.hpp"

namespace ctr {

struct SoftPlantState {
  VectorXd q, v;
  double time = 0.0;
};

// Minimal second-order penalty-contact plant. Deliberately independent of the
// conic machinery: contact is a damped spring with regularized Coulomb
// friction, the robot a PD loop around the position command.
class SoftPlant {
 public:
  SoftPlant(const SystemModel& sys, const SoftParams& params);

  SoftPlantState make_state(const VectorXd& q) const;

  // One dt step of semi-implicit Euler.
  SoftPlantState step_soft(const SoftPlantState& state, const VectorXd& u) const;

  // Integrates for `duration` seconds (rounded to whole dt substeps).
  SoftPlantState advance(const SoftPlantState& state, const VectorXd& u, double duration) const;

  // Generalized force at (q, v, u); exposed for the energy-audit tests.
  VectorXd generalized_force(const SoftPlantState& state, const VectorXd& u) const;

  const MatrixXd& mass_matrix() const { return mass_; }
  const SystemModel& system() const { return sys_; }
  const SoftParams& params() const { return params_; }

 private:
  SystemModel sys_;
  SoftParams params_;
  MatrixXd mass_;
  Eigen::LLT<MatrixXd> mass_llt_;
};

}  // namespace ctr
