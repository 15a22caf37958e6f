#pragma once

#include <limits>
#include <vector>

#include "ctr/conic.hpp"
#include "ctr/geometry.hpp"

namespace ctr {

// Quadratic model of one quasidynamic step: P block-diagonal (regularized
// object inertia over unactuated rows, stiffness over actuated rows), b the
// linear term, plus the Anitescu cone data per detected contact.
struct DynamicsProblem {
  MatrixXd P;
  VectorXd b;
  std::vector<ContactKinematics> contacts;

  ConicProgram to_conic() const;
};

struct StepResult {
  VectorXd q_next;
  std::vector<VectorXd> forces;  // per contact, generalized contact-frame impulse rates
  std::vector<VectorXd> slacks;
  double kappa = std::numeric_limits<double>::infinity();  // inf = non-smooth
  SolveStatus status = SolveStatus::kNumericalFailure;
  MatrixXd barrier_hessian;  // smoothed path only
  DynamicsProblem problem;
};

enum class ContactMode { kSeparation, kSticking, kSlidingPos, kSlidingNeg };
const char* to_string(ContactMode m);

// Builds P, b and contact cones at (q, u). Pass a non-negative threshold to
// override the model default; an explicit pair list pins the contact set (used
// by finite differencing so perturbed solves keep identical cone structure).
DynamicsProblem assemble(const SystemModel& sys, const VectorXd& q, const VectorXd& u,
                         double phi_threshold = -1.0,
                         const std::vector<int>* pair_indices = nullptr);

// f(q, u): solves the contact SOCP; duals reported as contact forces.
StepResult step_nonsmooth(const SystemModel& sys, const VectorXd& q, const VectorXd& u,
                          const SocpOptions& opts = {},
                          const std::vector<int>* pair_indices = nullptr);

// f_kappa(q, u): log-barrier relaxation solved by damped Newton from a
// deterministically retracted strictly feasible start; duals recovered along
// the central path (force at a distance).
StepResult step_smoothed(const SystemModel& sys, const VectorXd& q, const VectorXd& u,
                         double kappa, const BarrierOptions& opts = {},
                         const std::vector<int>* pair_indices = nullptr);

// Per-contact labels from a non-smooth step. Boundary ties label sliding,
// signed by the tangential dual.
std::vector<ContactMode> classify_modes(const StepResult& result, double tol = 1e-6);

struct KktResiduals {
  double stationarity = 0.0;     // ||P q+ + b - sum J' lambda||_inf
  double primal = 0.0;           // max cone violation of nu
  double dual = 0.0;             // max dual-cone violation of lambda
  double complementarity = 0.0;  // max |nu'lambda - target| (target 0 or 2/kappa)
};

KktResiduals kkt_residuals(const StepResult& result);

}  // namespace ctr
