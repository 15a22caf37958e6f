#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctr/geometry.hpp"
#include "ctr/trust_region.hpp"

namespace ctr {

struct PlannerParams {
  int T = 1;        // planning horizon
  int n_max = 2;    // trajectory optimization iterations
  int H = 20;       // MPC rollout horizon
  int replans = 5;  // re-plan count for the second-order wrapper
  MatrixXd Q;       // state tracking weight (robot block zero by default)
  MatrixXd R;       // action smoothness weight
  double eta = 0.1;
  TrustRegionVariant variant = TrustRegionVariant::kRctr;
  double radius = 0.1;
  double kappa = 1e4;
  double convergence_tol = 1e-6;
  double cost_decrease_tol = 1e-8;
  double goal_tolerance = 1e-3;
  double phi_contact = 1e-4;
  double kappa_pull = 100.0;
  std::optional<VectorXd> q_lb_a, q_ub_a, tau_lb, tau_ub;
};

struct SoftParams {
  double dt = 1e-3;
  double k_n = 5e3;               // penalty stiffness
  double contact_damping = 50.0;
  double friction_slope = 1e3;    // regularized Coulomb slope
  double robot_damping = 5.0;
  double robot_mass = 0.05;       // reflected inertia per actuated dof
  double object_damping = 2.0;    // support-surface friction proxy
  double workspace_bound = 10.0;
};

struct SymmetrySpec {
  int order = 1;        // cyclic rotations of the object
  int theta_dof = -1;   // index within the object configuration
};

struct GraspConfig {
  double alpha = 1.0;
  VectorXd sample_lb, sample_ub;  // per contact-point position box (2d)
};

struct Scenario {
  std::string name;
  SystemModel system;
  double mu = 0.0;
  PlannerParams params;
  SoftParams soft;
  SymmetrySpec symmetry;
  std::vector<VectorXd> stable_poses;  // object configurations
  GraspConfig grasp;
};

// Built-in registry: pusher1d, squeeze1d, boxball2d, planarhand, pushert,
// palmsquare.
std::vector<std::string> builtin_scenario_names();
Scenario make_scenario(const std::string& name);

// Name-or-path resolution: registry entries first, JSON documents otherwise.
Scenario load_scenario(const std::string& name_or_path);

std::string scenario_to_json(const Scenario& sc);
Scenario scenario_from_json(const std::string& text);

// FNV-1a over the canonical serialization, for run manifests.
uint64_t scenario_hash(const Scenario& sc);

// Analytic two-link elbow IK used when posing the built-in fingers. Returns
// false if the target is out of reach.
bool two_link_ik(const Body& chain, const Vector2d& target, bool elbow_up, Vector2d* angles);

}  // namespace ctr
