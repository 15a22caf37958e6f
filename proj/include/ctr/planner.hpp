#pragma once

#include <vector>

#include "ctr/scenario.hpp"
#include "ctr/softsim.hpp"
#include "ctr/trust_region.hpp"

namespace ctr {

struct Trajectory {
  std::vector<VectorXd> q;  // length steps + 1
  std::vector<VectorXd> u;  // length steps
  std::vector<std::vector<VectorXd>> forces;
  std::vector<double> step_cost;
};

struct SubTrajOptResult {
  std::vector<VectorXd> du;
  double objective = 0.0;
  bool infeasible = false;
  int infeasible_knot = -1;
};

// The per-iteration SOCP: linear dynamics rows, per-knot trust regions,
// relative input bounds and dq_0 = 0, solved jointly over all knots.
SubTrajOptResult sub_trajopt(const SystemModel& sys, const std::vector<VectorXd>& q_nominal,
                             const std::vector<VectorXd>& u_nominal, const VectorXd& u_prev,
                             const VectorXd& q_goal, const PlannerParams& params);

struct TrajOptResult {
  std::vector<VectorXd> u;
  int iterations = 0;
  std::vector<double> subproblem_costs;
  bool converged = false;
  bool infeasible = false;
  int infeasible_subproblems = 0;
};

// Alternates non-smooth rollout with sub_trajopt until the perturbation or
// the subproblem cost stalls.
TrajOptResult ctr_trajopt(const SystemModel& sys, const VectorXd& q0, const VectorXd& q_goal,
                          const std::vector<VectorXd>& u_guess, const PlannerParams& params,
                          const VectorXd& u_prev);

struct HeuristicResult {
  VectorXd u;
  bool reached = false;
  int iterations = 0;
};

// Reversed barrier force field: overdamped steps pull the actuated dofs into
// contact with the object, returning the resulting configuration as the
// position command.
HeuristicResult initial_guess_heuristic(const SystemModel& sys, const VectorXd& q0,
                                        double kappa_pull = 100.0, double phi_contact = 1e-4,
                                        int max_iterations = 500);

struct MpcLog {
  Trajectory traj;
  bool terminated_early = false;
  int infeasible_subproblems = 0;
  int subproblems = 0;
};

// MPC rollout: heuristic initialization at t = 0 (every step when
// heuristic_every_step, the contact-projected variant), warm starts from the
// previous solution otherwise, executing only the first optimized input.
MpcLog mpc_rollout(const SystemModel& sys, const VectorXd& q0, const VectorXd& q_goal,
                   const PlannerParams& params, bool heuristic_every_step = false);

VectorXd goal_configuration(const SystemModel& sys, const VectorXd& q_o_goal,
                            const VectorXd& q_reference);

struct SecondOrderLog {
  SoftPlantState final_state;
  std::vector<VectorXd> plant_q;  // sampled every model step h
  int replans = 0;
  int lost_contact_events = 0;
  double terminal_error = 0.0;
};

// Plans on the quasidynamic model, executes whole input chunks on the
// second-order plant, re-plans N times (heuristic applied at every MPC step).
SecondOrderLog mpc_second_order(const SystemModel& sys, const SoftPlant& plant,
                                const VectorXd& q0, const VectorXd& q_o_goal,
                                const PlannerParams& params, bool projected_variant = true);

struct GoalSample {
  VectorXd q0;
  VectorXd q_o_goal;
};

// Object goals on the boundary of the action-only object motion set built
// with an enlarged trust-region radius.
std::vector<GoalSample> generate_goals(const SystemModel& sys, const VectorXd& q_nominal,
                                       int n, uint64_t seed, const PlannerParams& params,
                                       double enlarge = 4.0);

double object_error(const SystemModel& sys, const VectorXd& q, const VectorXd& q_o_goal);

}  // namespace ctr
