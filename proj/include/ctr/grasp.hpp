#pragma once

#include <vector>

#include "ctr/planner.hpp"

namespace ctr {

struct GraspCandidate {
  VectorXd q_a;
  double value = 0.0;      // finite-horizon MPC value
  double radius = 0.0;     // max inscribed wrench-sphere radius
  double cost = 0.0;       // value - alpha * radius^2
  bool feasible = false;
  bool value_infeasible = false;  // MPC terminated early; value is the +inf sentinel
};

// Cost of the realized MPC trajectory from (q_a, q_o) toward the object goal,
// with the robot rows of Q zeroed.
double value_function(const Scenario& sc, const VectorXd& q_a, const VectorXd& q_o,
                      const VectorXd& q_o_goal, bool* infeasible = nullptr);

// Max inscribed sphere of the sampled wrench set at u = q_a.
double robustness_radius(const Scenario& sc, const VectorXd& q_a, const VectorXd& q_o,
                         int n_samples = 1000, uint64_t seed = 0);

struct IkResult {
  VectorXd q_a;
  double residual = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Iterative QP inverse kinematics: fingertip linearization, first-order
// non-penetration rows and a per-iteration step box (object held fixed).
// Targets are (chain body index, desired tip position) pairs.
IkResult ik_project(const SystemModel& sys, const VectorXd& q_init,
                    const std::vector<std::pair<int, Vector2d>>& targets,
                    const std::optional<VectorXd>& q_lb_a = std::nullopt,
                    const std::optional<VectorXd>& q_ub_a = std::nullopt,
                    double step_box = 0.05, int max_iterations = 100);

// Rejection sampling over robot configurations (reduced-order contact points
// projected to the object surface, IK for chain fingers), scored by
// C = V - alpha r^2. Ties keep the earliest sample.
GraspCandidate sample_grasps(const Scenario& sc, const VectorXd& q_o, const VectorXd& q_o_goal,
                             int n, double alpha, uint64_t seed,
                             std::vector<GraspCandidate>* all_out = nullptr);

}  // namespace ctr
