#include "ctr/roadmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

#include <nlohmann/json.hpp>

#include "ctr/cqdc.hpp"

namespace ctr {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::vector<int> Roadmap::out_edges(int vertex) const {
  std::vector<int> out;
  for (size_t i = 0; i < edges.size(); ++i)
    if (edges[i].src == vertex) out.push_back(static_cast<int>(i));
  return out;
}

VectorXd Roadmap::vertex_config(const SystemModel& sys, int vertex) const {
  return sys.merge(vertices[vertex].q_o, vertices[vertex].q_a);
}

PoseError object_pose_error(const SystemModel& sys, const VectorXd& q_o_a,
                            const VectorXd& q_o_b) {
  PoseError err;
  double trans2 = 0.0;
  int k = 0;
  for (const Body& b : sys.bodies) {
    if (b.actuated || b.kind == BodyKind::kFixed) continue;
    for (DofAxis a : b.axes) {
      const double d = q_o_a[k] - q_o_b[k];
      if (a == DofAxis::kTheta) {
        err.rotation += std::abs(std::atan2(std::sin(d), std::cos(d)));
      } else {
        trans2 += d * d;
      }
      ++k;
    }
  }
  err.translation = std::sqrt(trans2);
  return err;
}

namespace {

bool robot_pose_collision_free(const SystemModel& sys, const VectorXd& q) {
  for (const PairSpec& pair : sys.collision_pairs)
    if (pair_distance(sys, q, pair).phi < -1e-6) return false;
  return true;
}

bool segment_collision_free(const SystemModel& sys, const VectorXd& q_base,
                            const VectorXd& a_from, const VectorXd& a_to, double resolution) {
  const double len = (a_to - a_from).cwiseAbs().maxCoeff();
  const int steps = std::max(1, static_cast<int>(std::ceil(len / resolution)));
  VectorXd q = q_base;
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const VectorXd a = a_from + t * (a_to - a_from);
    for (int k = 0; k < sys.n_qa; ++k) q[sys.actuated_idx[k]] = a[k];
    if (!robot_pose_collision_free(sys, q)) return false;
  }
  return true;
}

Trajectory path_to_trajectory(const SystemModel& sys, const VectorXd& q_base,
                              const std::vector<VectorXd>& waypoints) {
  Trajectory traj;
  VectorXd q = q_base;
  traj.q.push_back(q);
  for (size_t i = 1; i < waypoints.size(); ++i) {
    for (int k = 0; k < sys.n_qa; ++k) q[sys.actuated_idx[k]] = waypoints[i][k];
    traj.q.push_back(q);
    traj.u.push_back(waypoints[i]);
  }
  return traj;
}

double trajectory_length(const Trajectory& traj) {
  double len = 0.0;
  for (size_t i = 0; i + 1 < traj.q.size(); ++i) len += (traj.q[i + 1] - traj.q[i]).norm();
  return len;
}

Trajectory concatenate(const Trajectory& a, const Trajectory& b) {
  Trajectory out = a;
  if (out.q.empty()) return b;
  for (size_t i = 1; i < b.q.size(); ++i) out.q.push_back(b.q[i]);
  for (const VectorXd& u : b.u) out.u.push_back(u);
  for (const auto& f : b.forces) out.forces.push_back(f);
  for (double c : b.step_cost) out.step_cost.push_back(c);
  return out;
}

}  // namespace

std::optional<Trajectory> collision_free_connect(const SystemModel& sys, const VectorXd& q_from,
                                                 const VectorXd& q_a_to,
                                                 const RoadmapParams& params, uint64_t seed,
                                                 const std::optional<VectorXd>& q_lb_a,
                                                 const std::optional<VectorXd>& q_ub_a) {
  const VectorXd a_from = sys.actuated_part(q_from);
  if ((a_from - q_a_to).cwiseAbs().maxCoeff() < 1e-12) {
    Trajectory traj;
    traj.q.push_back(q_from);
    return traj;
  }
  if (segment_collision_free(sys, q_from, a_from, q_a_to, params.connect_resolution))
    return path_to_trajectory(sys, q_from, {a_from, q_a_to});

  // Goal-biased RRT in robot joint space, object static.
  VectorXd lb = q_lb_a ? *q_lb_a : VectorXd::Constant(sys.n_qa, -3.0);
  VectorXd ub = q_ub_a ? *q_ub_a : VectorXd::Constant(sys.n_qa, 3.0);
  for (int k = 0; k < sys.n_qa; ++k) {
    lb[k] = std::min({lb[k], a_from[k], q_a_to[k]});
    ub[k] = std::max({ub[k], a_from[k], q_a_to[k]});
  }

  Rng rng(seed);
  std::vector<VectorXd> nodes{a_from};
  std::vector<int> parent{-1};
  for (int iter = 0; iter < params.rrt_max_iterations; ++iter) {
    VectorXd target(sys.n_qa);
    if (rng.uniform() < params.rrt_goal_bias) {
      target = q_a_to;
    } else {
      for (int k = 0; k < sys.n_qa; ++k) target[k] = rng.uniform(lb[k], ub[k]);
    }
    int nearest = 0;
    double best = kInf;
    for (size_t i = 0; i < nodes.size(); ++i) {
      const double d = (nodes[i] - target).norm();
      if (d < best) {
        best = d;
        nearest = static_cast<int>(i);
      }
    }
    VectorXd dir = target - nodes[nearest];
    const double dist = dir.norm();
    if (dist < 1e-12) continue;
    const VectorXd next = nodes[nearest] + dir * std::min(1.0, params.rrt_step / dist);
    if (!segment_collision_free(sys, q_from, nodes[nearest], next, params.connect_resolution))
      continue;
    nodes.push_back(next);
    parent.push_back(nearest);
    if ((next - q_a_to).norm() <= params.rrt_step &&
        segment_collision_free(sys, q_from, next, q_a_to, params.connect_resolution)) {
      std::vector<VectorXd> waypoints{q_a_to};
      for (int v = static_cast<int>(nodes.size()) - 1; v >= 0; v = parent[v])
        waypoints.push_back(nodes[v]);
      std::reverse(waypoints.begin(), waypoints.end());
      return path_to_trajectory(sys, q_from, waypoints);
    }
  }
  return std::nullopt;
}

namespace {

// One Alg-4 connection: MPC toward the target object pose, then reposition
// the robot. Returns the combined trajectory when both legs succeed.
std::optional<Trajectory> connect_recipe(const Scenario& sc, const VectorXd& q_start,
                                         const RoadmapVertex& target,
                                         const RoadmapParams& params, uint64_t seed) {
  const SystemModel& sys = sc.system;
  const VectorXd goal_full = goal_configuration(sys, target.q_o, q_start);
  const MpcLog mpc = mpc_rollout(sys, q_start, goal_full, sc.params);
  if (mpc.terminated_early || mpc.traj.q.empty()) return std::nullopt;
  const VectorXd q_end = mpc.traj.q.back();
  const PoseError err = object_pose_error(sys, sys.object_part(q_end), target.q_o);
  if (err.translation > params.tol_trans || err.rotation > params.tol_rot) return std::nullopt;
  const auto connect = collision_free_connect(sys, q_end, target.q_a, params, seed,
                                              sc.params.q_lb_a, sc.params.q_ub_a);
  if (!connect) return std::nullopt;
  return concatenate(mpc.traj, *connect);
}

VectorXd shift_object_theta(const VectorXd& q_o, int theta_dof,
                            double dtheta) {
  VectorXd out = q_o;
  out[theta_dof] += dtheta;
  return out;
}

VectorXd shift_config_theta(const SystemModel& sys, const VectorXd& q, int theta_dof,
                            double dtheta) {
  VectorXd out = q;
  out[sys.unactuated_idx[theta_dof]] += dtheta;
  return out;
}

}  // namespace

Roadmap build_roadmap(const Scenario& sc, const std::vector<RoadmapVertex>& grasps,
                      const RoadmapParams& params, uint64_t seed) {
  if (grasps.empty()) throw Error("bad-input", "build_roadmap: empty grasp set");
  const SystemModel& sys = sc.system;
  Roadmap rm;
  rm.scenario_name = sc.name;
  rm.scenario_hash = scenario_hash(sc);
  rm.seed = seed;

  const int order = std::max(1, sc.symmetry.order);
  const int theta_dof = sc.symmetry.theta_dof;
  const double dtheta = (order > 1) ? 2.0 * M_PI / order : 0.0;
  const int base_count = static_cast<int>(grasps.size());

  // Vertex layout: layer k holds each base grasp rotated by k * dtheta.
  for (int k = 0; k < order; ++k) {
    for (const RoadmapVertex& g : grasps) {
      RoadmapVertex v = g;
      if (k > 0) v.q_o = shift_object_theta(g.q_o, theta_dof, k * dtheta);
      rm.vertices.push_back(v);
    }
  }
  auto vertex_id = [&](int layer, int base) {
    return ((layer % order) + order) % order * base_count + base;
  };

  // Direct edge attempts: within layer 0 and from layer 0 to its neighbors;
  // successes replicate across layers by the symmetry shift.
  std::vector<int> target_layers{0};
  if (order > 1) {
    target_layers.push_back(1);
    target_layers.push_back(order - 1);
  }
  uint64_t edge_seed = seed;
  for (int bi = 0; bi < base_count; ++bi) {
    for (int layer : target_layers) {
      for (int bj = 0; bj < base_count; ++bj) {
        const int src = vertex_id(0, bi);
        const int dst = vertex_id(layer, bj);
        if (src == dst) continue;
        ++edge_seed;
        const VectorXd q_start = rm.vertex_config(sys, src);
        const auto traj = connect_recipe(sc, q_start, rm.vertices[dst], params, edge_seed);
        if (!traj) continue;
        const double len = trajectory_length(*traj);
        for (int k = 0; k < order; ++k) {
          RoadmapEdge e;
          e.src = vertex_id(k, bi);
          e.dst = vertex_id(layer + k, bj);
          e.symmetry_shift = k;
          e.path_length = len;
          if (k == 0) {
            e.traj = *traj;
          } else {
            e.traj = *traj;
            for (VectorXd& q : e.traj.q) q = shift_config_theta(sys, q, theta_dof, k * dtheta);
          }
          rm.edges.push_back(std::move(e));
        }
      }
    }
  }
  return rm;
}

std::vector<int> dijkstra_path(const Roadmap& roadmap, int src, int dst) {
  const int n = static_cast<int>(roadmap.vertices.size());
  std::vector<double> dist(n, kInf);
  std::vector<int> prev(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  dist[src] = 0.0;
  pq.push({0.0, src});
  while (!pq.empty()) {
    const auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    if (v == dst) break;
    for (size_t ei = 0; ei < roadmap.edges.size(); ++ei) {
      const RoadmapEdge& e = roadmap.edges[ei];
      if (e.src != v) continue;
      const double nd = d + e.path_length;
      if (nd < dist[e.dst]) {
        dist[e.dst] = nd;
        prev[e.dst] = v;
        pq.push({nd, e.dst});
      }
    }
  }
  if (!std::isfinite(dist[dst])) return {};
  std::vector<int> path{dst};
  while (path.back() != src) path.push_back(prev[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

int nearest_vertex(const Scenario& sc, const Roadmap& rm, const VectorXd& q_o) {
  // Object-pose metric weighted like the MPC tracking cost: rotation dofs use
  // their (lighter) Q weight relative to translation.
  const SystemModel& sys = sc.system;
  double wt = 1.0, wr = 1.0;
  int k = 0;
  for (const Body& b : sys.bodies) {
    if (b.actuated || b.kind == BodyKind::kFixed) continue;
    for (DofAxis a : b.axes) {
      const double w = sc.params.Q(sys.unactuated_idx[k], sys.unactuated_idx[k]);
      if (a == DofAxis::kTheta) wr = w;
      else wt = w;
      ++k;
    }
  }
  int best = 0;
  double best_d = kInf;
  for (size_t i = 0; i < rm.vertices.size(); ++i) {
    const PoseError e = object_pose_error(sys, q_o, rm.vertices[i].q_o);
    const double d = wt * e.translation + wr * e.rotation;
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

int find_edge(const Roadmap& rm, int src, int dst) {
  for (size_t i = 0; i < rm.edges.size(); ++i)
    if (rm.edges[i].src == src && rm.edges[i].dst == dst) return static_cast<int>(i);
  return -1;
}

}  // namespace

QueryResult query_roadmap(const Scenario& sc, const Roadmap& roadmap, const VectorXd& q0,
                          const VectorXd& q_o_goal, const RoadmapParams& params, uint64_t seed) {
  if (roadmap.vertices.empty()) throw Error("bad-input", "query_roadmap: empty roadmap");
  const SystemModel& sys = sc.system;
  QueryResult out;

  const int v_in = nearest_vertex(sc, roadmap, sys.object_part(q0));
  const int v_out = nearest_vertex(sc, roadmap, q_o_goal);

  // Entry segment (skipped when already at the vertex).
  Trajectory traj;
  VectorXd q = q0;
  {
    const PoseError e0 = object_pose_error(sys, sys.object_part(q0), roadmap.vertices[v_in].q_o);
    const double a_gap =
        (sys.actuated_part(q0) - roadmap.vertices[v_in].q_a).cwiseAbs().maxCoeff();
    if (e0.translation > params.tol_trans || e0.rotation > params.tol_rot || a_gap > 1e-9) {
      const auto entry = connect_recipe(sc, q0, roadmap.vertices[v_in], params, seed + 1);
      if (!entry) throw Error("query-failed", "could not connect the start to the roadmap");
      traj = *entry;
      q = traj.q.back();
    } else {
      traj.q.push_back(q0);
    }
  }

  const std::vector<int> path = dijkstra_path(roadmap, v_in, v_out);
  if (path.empty()) {
    std::string members;
    for (size_t i = 0; i < roadmap.vertices.size(); ++i)
      if (!dijkstra_path(roadmap, v_in, static_cast<int>(i)).empty())
        members += (members.empty() ? "" : ",") + std::to_string(i);
    throw Error("disconnected", "goal vertex unreachable; reachable component: {" + members + "}");
  }
  out.vertex_path = path;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const int ei = find_edge(roadmap, path[i], path[i + 1]);
    if (ei < 0) throw Error("internal", "dijkstra returned a missing edge");
    traj = concatenate(traj, roadmap.edges[ei].traj);
  }

  // Exit segment toward the exact goal pose.
  const PoseError eg =
      object_pose_error(sys, roadmap.vertices[v_out].q_o, q_o_goal);
  if (eg.translation > params.tol_trans || eg.rotation > params.tol_rot) {
    RoadmapVertex goal_vertex;
    goal_vertex.q_o = q_o_goal;
    goal_vertex.q_a = roadmap.vertices[v_out].q_a;
    const auto exit = connect_recipe(sc, traj.q.back(), goal_vertex, params, seed + 2);
    if (!exit) throw Error("query-failed", "could not connect the roadmap to the goal");
    traj = concatenate(traj, *exit);
  }

  out.traj = traj;
  out.path_length = trajectory_length(traj);
  return out;
}

WalkResult random_walk(const Scenario& sc, const Roadmap& roadmap, int transitions,
                       uint64_t seed, const RoadmapParams& params) {
  WalkResult out;
  if (roadmap.vertices.empty()) return out;
  Rng rng(seed);
  int v = 0;
  VectorXd q = roadmap.vertex_config(sc.system, v);
  out.visited.push_back(v);
  for (int t = 0; t < transitions; ++t) {
    const std::vector<int> outgoing = roadmap.out_edges(v);
    if (outgoing.empty()) break;
    const int ei = outgoing[rng.uniform_int(0, static_cast<int>(outgoing.size()) - 1)];
    const RoadmapEdge& e = roadmap.edges[ei];
    ++out.attempts;
    const auto traj = connect_recipe(sc, q, roadmap.vertices[e.dst], params, seed + 31 * t);
    if (!traj) break;
    ++out.successes;
    v = e.dst;
    q = traj->q.back();
    out.visited.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------

using json = nlohmann::ordered_json;

namespace {

json vec_to_json(const VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

VectorXd vec_from_json(const json& arr) {
  VectorXd v(static_cast<int>(arr.size()));
  int i = 0;
  for (const auto& x : arr) v[i++] = x.get<double>();
  return v;
}

json traj_to_json(const Trajectory& t) {
  json j;
  json q = json::array(), u = json::array();
  for (const VectorXd& x : t.q) q.push_back(vec_to_json(x));
  for (const VectorXd& x : t.u) u.push_back(vec_to_json(x));
  j["q"] = q;
  j["u"] = u;
  return j;
}

Trajectory traj_from_json(const json& j) {
  Trajectory t;
  for (const auto& x : j.at("q")) t.q.push_back(vec_from_json(x));
  for (const auto& x : j.at("u")) t.u.push_back(vec_from_json(x));
  return t;
}

}  // namespace

std::string roadmap_to_json(const Roadmap& rm) {
  json j;
  j["version"] = 1;
  j["scenario"] = rm.scenario_name;
  j["scenario_hash"] = rm.scenario_hash;
  j["seed"] = rm.seed;
  json vs = json::array();
  for (const RoadmapVertex& v : rm.vertices)
    vs.push_back(json{{"q_o", vec_to_json(v.q_o)}, {"q_a", vec_to_json(v.q_a)}});
  j["vertices"] = vs;
  json es = json::array();
  for (const RoadmapEdge& e : rm.edges) {
    es.push_back(json{{"src", e.src},
                      {"dst", e.dst},
                      {"path_length", e.path_length},
                      {"symmetry_shift", e.symmetry_shift},
                      {"traj", traj_to_json(e.traj)}});
  }
  j["edges"] = es;
  return j.dump(2) + "\n";
}

Roadmap roadmap_from_json(const std::string& text) {
  const json j = json::parse(text);
  Roadmap rm;
  rm.scenario_name = j.at("scenario").get<std::string>();
  rm.scenario_hash = j.at("scenario_hash").get<uint64_t>();
  rm.seed = j.at("seed").get<uint64_t>();
  for (const auto& v : j.at("vertices")) {
    RoadmapVertex vertex;
    vertex.q_o = vec_from_json(v.at("q_o"));
    vertex.q_a = vec_from_json(v.at("q_a"));
    rm.vertices.push_back(vertex);
  }
  for (const auto& e : j.at("edges")) {
    RoadmapEdge edge;
    edge.src = e.at("src").get<int>();
    edge.dst = e.at("dst").get<int>();
    edge.path_length = e.at("path_length").get<double>();
    edge.symmetry_shift = e.at("symmetry_shift").get<int>();
    edge.traj = traj_from_json(e.at("traj"));
    rm.edges.push_back(std::move(edge));
  }
  return rm;
}

}  // namespace ctr
