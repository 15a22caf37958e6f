#pragma once

#include <string>
#include <vector>

#include "ctr/cqdc.hpp"

namespace ctr {

// Joint primal/dual Taylor model of the smoothed step around (q_nominal,
// u_nominal): q+ ~ A dq + B du + f_nominal, lambda_i ~ C_i dq + D_i du +
// lambda_nominal_i.
struct LinearizedDynamics {
  MatrixXd A;                  // nq x nq (valid iff has_A)
  MatrixXd B;                  // nq x n_qa
  std::vector<MatrixXd> C;     // per contact, d_i x nq (valid iff has_A)
  std::vector<MatrixXd> D;     // per contact, d_i x n_qa
  VectorXd f_nominal;
  std::vector<VectorXd> lambda_nominal;
  std::vector<VectorXd> slack_nominal;
  VectorXd q_nominal, u_nominal;
  double kappa = 0.0;
  std::vector<ContactKinematics> contacts;
  bool has_A = false;
  std::string q_mode = "none";  // frozen-geometry | finite-difference | none

  int nq() const { return static_cast<int>(f_nominal.size()); }
};

enum class QLinearizationMode { kFrozenGeometry, kFiniteDifference };

// Analytic input-sensitivities: B from the barrier Hessian, D_i by chain rule
// through the central-path dual map.
LinearizedDynamics linearize_u(const SystemModel& sys, const VectorXd& q_nominal,
                               const VectorXd& u_nominal, double kappa,
                               const BarrierOptions& opts = {});

// Adds A and the C_i blocks. Finite differencing re-solves the smoothed step
// with the nominal contact pairing pinned (central differences, step 1e-5);
// frozen-geometry differentiates analytically holding each J_i fixed.
void linearize_q(const SystemModel& sys, LinearizedDynamics* lin, QLinearizationMode mode,
                 double fd_step = 1e-5);

// Norm of the stacked first-order optimality residual (stationarity plus
// perturbed complementarity) at the Taylor-predicted primal/dual point, with
// problem data re-assembled at the perturbed configuration.
double taylor_residual(const SystemModel& sys, const LinearizedDynamics& lin,
                       const VectorXd& dq, const VectorXd& du);

}  // namespace ctr
