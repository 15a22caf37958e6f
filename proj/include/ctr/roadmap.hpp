#pragma once

#include <optional>
#include <vector>

#include "ctr/grasp.hpp"

namespace ctr {

struct RoadmapVertex {
  VectorXd q_o, q_a;
};

struct RoadmapEdge {
  int src = 0, dst = 0;
  Trajectory traj;
  double path_length = 0.0;
  int symmetry_shift = 0;  // 0 for directly planned edges
};

struct Roadmap {
  std::vector<RoadmapVertex> vertices;
  std::vector<RoadmapEdge> edges;
  std::string scenario_name;
  uint64_t scenario_hash = 0;
  uint64_t seed = 0;

  std::vector<int> out_edges(int vertex) const;
  VectorXd vertex_config(const SystemModel& sys, int vertex) const;
};

struct RoadmapParams {
  double tol_trans = 0.005;   // edge acceptance, meters
  double tol_rot = 0.020;     // radians
  double connect_resolution = 1e-3;
  int rrt_max_iterations = 10000;
  double rrt_step = 0.05;
  double rrt_goal_bias = 0.1;
};

struct PoseError {
  double translation = 0.0;
  double rotation = 0.0;
};

PoseError object_pose_error(const SystemModel& sys, const VectorXd& q_o_a, const VectorXd& q_o_b);

// Straight-line joint interpolation with dense collision checks, falling back
// to a goal-biased RRT in robot joint space with the object held static.
std::optional<Trajectory> collision_free_connect(const SystemModel& sys, const VectorXd& q_from,
                                                 const VectorXd& q_a_to,
                                                 const RoadmapParams& params, uint64_t seed,
                                                 const std::optional<VectorXd>& q_lb_a,
                                                 const std::optional<VectorXd>& q_ub_a);

// Ordered-pair edge construction: MPC to the target object pose, then
// collision-free reposition to the target robot configuration. Declared
// object symmetries replicate vertices and successful edges by rotating the
// object angle coordinate.
Roadmap build_roadmap(const Scenario& sc, const std::vector<RoadmapVertex>& grasps,
                      const RoadmapParams& params, uint64_t seed);

struct QueryResult {
  Trajectory traj;
  std::vector<int> vertex_path;
  double path_length = 0.0;
};

// Connects the start and goal to their nearest vertices with the edge recipe,
// then Dijkstra over stored path lengths.
QueryResult query_roadmap(const Scenario& sc, const Roadmap& roadmap, const VectorXd& q0,
                          const VectorXd& q_o_goal, const RoadmapParams& params, uint64_t seed);

struct WalkResult {
  int successes = 0;
  int attempts = 0;
  std::vector<int> visited;
};

// Random walk over roadmap edges, re-running each edge's connection recipe
// from the actual current configuration (the simulation analog of consecutive
// hardware edge transitions).
WalkResult random_walk(const Scenario& sc, const Roadmap& roadmap, int transitions,
                       uint64_t seed, const RoadmapParams& params);

std::string roadmap_to_json(const Roadmap& roadmap);
Roadmap roadmap_from_json(const std::string& text);

// Shortest vertex path by stored edge lengths; empty if disconnected.
std::vector<int> dijkstra_path(const Roadmap& roadmap, int src, int dst);

}  // namespace ctr
