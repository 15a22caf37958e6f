#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ctr/types.hpp"

namespace ctr {

// One conic constraint A x + c in K, where
//   dim == 1          : K = { v : v >= 0 }
//   dim >= 2, mu > 0  : K = { v : v_1 >= mu * ||v_2:|| }
//   dim >= 2, mu == 0 : degenerate; only v_1 >= 0 is enforced and the
//                       tangential dual components are identically zero.
struct ConeConstraint {
  MatrixXd A;
  VectorXd c;
  double mu = 1.0;
  int dim() const { return static_cast<int>(A.rows()); }
};

// min 1/2 x'Px + b'x  s.t.  E x = f,  A_i x + c_i in K_i.
struct ConicProgram {
  MatrixXd P;
  VectorXd b;
  MatrixXd E;  // may have zero rows
  VectorXd f;
  std::vector<ConeConstraint> cones;

  int num_vars() const { return static_cast<int>(b.size()); }
  // Checks dimensional consistency and that P is PSD (pivoted factorization).
  void validate() const;
};

enum class SolveStatus { kOptimal, kInfeasible, kMaxIterations, kNumericalFailure };

const char* to_string(SolveStatus s);

struct ConicSolution {
  VectorXd x;
  std::vector<VectorXd> cone_duals;  // sign convention: P x + b - sum A_i' z_i = 0
  SolveStatus status = SolveStatus::kNumericalFailure;
  int iterations = 0;
  double comp_residual = 0.0;
};

struct SocpOptions {
  double tol = 1e-9;        // complementarity tolerance
  double feas_tol = 1e-10;  // scaled primal/dual residual tolerance
  int max_iterations = 200;
  std::string trace_csv;    // optional per-iteration diagnostic dump
};

// Primal-dual interior-point solver (Nesterov-Todd scaled Mehrotra
// predictor-corrector, infeasible start). Equalities are eliminated through a
// QR nullspace basis before the cone iteration.
ConicSolution solve_socp(const ConicProgram& prog, const SocpOptions& opts = {});

struct BarrierResult {
  VectorXd x;
  MatrixXd hessian;  // of the barrier-augmented objective at x
  std::vector<VectorXd> slacks;
  std::vector<VectorXd> duals;  // central-path duals, strictly interior
  int iterations = 0;
};

struct BarrierOptions {
  double tol = 1e-10;  // gradient norm tolerance, scaled by 1 + ||b||_inf
  int max_iterations = 500;
};

// Damped Newton on 1/2 x'Px + b'x - (1/kappa) sum log-barriers. x0 must be
// strictly interior; backtracking line search with fraction-to-boundary 0.99
// keeps iterates interior. Duals follow the central-path closed form, so
// nu'lambda = 2/kappa per cone (1/kappa for dim-1 slacks).
BarrierResult solve_barrier_newton(const ConicProgram& prog, double kappa, const VectorXd& x0,
                                   const BarrierOptions& opts = {});

// Largest r >= 0 with ||a_i|| r + b_i <= 0 for every halfspace a_i'x + b_i <= 0
// (sphere centered at the origin). The one-variable LP reduces to a ratio
// minimum over faces.
double chebyshev_radius(const std::vector<std::pair<VectorXd, double>>& halfspaces);

// Central-path dual map lambda(nu) for a slack nu strictly inside the cone,
// and its Jacobian d lambda / d nu. dim-1 slacks use the 1/kappa perturbation,
// higher-dimensional cones 2/kappa.
VectorXd central_path_dual(const VectorXd& nu, double mu, double kappa);
MatrixXd central_path_dual_jacobian(const VectorXd& nu, double mu, double kappa);

}  // namespace ctr
