#include "ctr/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ctr {

using json = nlohmann::ordered_json;

namespace {

VectorXd vec(std::initializer_list<double> vals) {
  VectorXd v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

Body make_free_body(const std::string& name, bool actuated, std::vector<DofAxis> axes,
                    Pose2 base = {}) {
  Body b;
  b.name = name;
  b.kind = BodyKind::kFree;
  b.actuated = actuated;
  b.axes = std::move(axes);
  b.base = base;
  return b;
}

Geom circle(double r, Vector2d offset = {0, 0}) {
  Geom g;
  g.kind = GeomKind::kCircle;
  g.radius = r;
  g.local.p = offset;
  return g;
}

Geom box(Vector2d half, Pose2 local = {}) {
  Geom g;
  g.kind = GeomKind::kBox;
  g.half = half;
  g.local = local;
  return g;
}

Body make_two_link_finger(const std::string& name, Vector2d base, double l1, double l2,
                          double tip_radius) {
  Body b;
  b.name = name;
  b.kind = BodyKind::kChain;
  b.actuated = true;
  b.base.p = base;
  b.link_lengths = {l1, l2};
  Geom tip = circle(tip_radius, Vector2d(l2, 0.0));
  tip.link = 1;
  b.geoms.push_back(tip);
  return b;
}

void default_costs(Scenario* sc) {
  const int nq = sc->system.nq;
  const int na = sc->system.n_qa;
  sc->params.Q = MatrixXd::Zero(nq, nq);
  for (int i = 0; i < sc->system.n_qo; ++i) {
    const int gi = sc->system.unactuated_idx[i];
    sc->params.Q(gi, gi) = 1.0;
  }
  sc->params.R = 0.01 * MatrixXd::Identity(na, na);
}

// Object theta dofs get the paper-style lighter rotation weight.
void set_rotation_weight(Scenario* sc, int object_theta_index, double w) {
  const int gi = sc->system.unactuated_idx[object_theta_index];
  sc->params.Q(gi, gi) = w;
}

Scenario make_pusher1d() {
  Scenario sc;
  sc.name = "pusher1d";
  sc.mu = 0.0;

  Body object = make_free_body("box", false, {DofAxis::kX});
  object.geoms.push_back(box(Vector2d(0.1, 0.1)));
  Body robot = make_free_body("ball", true, {DofAxis::kX});
  robot.geoms.push_back(circle(0.1));
  sc.system.bodies = {object, robot};
  sc.system.epsilon = 0.01;
  sc.system.h = 0.1;
  sc.system.phi_threshold = 0.2;
  sc.system.k_a = vec({100.0});
  sc.system.mass_o = MatrixXd::Identity(1, 1);
  sc.system.finalize(sc.mu);
  sc.system.default_q = vec({0.2, -0.02});

  default_costs(&sc);
  sc.params.kappa = 100.0;
  sc.params.radius = 0.1;
  sc.params.H = 10;
  sc.grasp.sample_lb = vec({-0.6, 0.0});
  sc.grasp.sample_ub = vec({0.6, 0.0});
  return sc;
}

Scenario make_squeeze1d() {
  Scenario sc;
  sc.name = "squeeze1d";
  sc.mu = 0.0;

  Body object = make_free_body("box", false, {DofAxis::kX});
  object.geoms.push_back(box(Vector2d(0.1, 0.1)));
  Body left = make_free_body("ball_left", true, {DofAxis::kX});
  left.geoms.push_back(circle(0.1));
  Body right = make_free_body("ball_right", true, {DofAxis::kX});
  right.geoms.push_back(circle(0.1));
  sc.system.bodies = {object, left, right};
  sc.system.epsilon = 0.01;
  sc.system.h = 0.1;
  sc.system.phi_threshold = 0.2;
  sc.system.k_a = vec({100.0, 100.0});
  sc.system.mass_o = MatrixXd::Identity(1, 1);
  sc.system.finalize(sc.mu);
  sc.system.default_q = vec({0.0, -0.2, 0.2});

  default_costs(&sc);
  sc.params.kappa = 100.0;
  sc.params.radius = 0.05;
  sc.params.H = 10;
  sc.grasp.sample_lb = vec({-0.6, 0.0});
  sc.grasp.sample_ub = vec({0.6, 0.0});
  return sc;
}

Scenario make_boxball2d() {
  Scenario sc;
  sc.name = "boxball2d";
  sc.mu = 0.5;

  // Box slides along x; its top face sits at y = 0. The ball coordinate is
  // the height of its lowest point, so contact happens at q_y = 0.
  Body object = make_free_body("box", false, {DofAxis::kX}, Pose2{{0.0, -0.05}, 0.0});
  object.geoms.push_back(box(Vector2d(0.3, 0.05)));
  Body robot = make_free_body("ball", true, {DofAxis::kX, DofAxis::kY});
  robot.geoms.push_back(circle(0.05, Vector2d(0.0, 0.05)));
  sc.system.bodies = {object, robot};
  sc.system.epsilon = 1.0;
  sc.system.h = 0.1;
  sc.system.phi_threshold = 0.2;
  sc.system.k_a = vec({100.0, 100.0});
  sc.system.mass_o = MatrixXd::Identity(1, 1);
  sc.system.finalize(sc.mu);
  sc.system.default_q = vec({0.0, 0.0, 0.03});

  default_costs(&sc);
  sc.params.kappa = 1000.0;
  sc.params.radius = 0.05;
  sc.params.H = 20;
  sc.grasp.sample_lb = vec({-0.4, 0.0});
  sc.grasp.sample_ub = vec({0.4, 0.1});
  return sc;
}

Scenario make_planarhand() {
  Scenario sc;
  sc.name = "planarhand";
  sc.mu = 0.5;

  Body object = make_free_body("ball", false, {DofAxis::kX, DofAxis::kY},
                               Pose2{{0.0, 0.12}, 0.0});
  object.geoms.push_back(circle(0.06));
  Body left = make_two_link_finger("finger_left", Vector2d(-0.15, 0.0), 0.16, 0.14, 0.02);
  Body right = make_two_link_finger("finger_right", Vector2d(0.15, 0.0), 0.16, 0.14, 0.02);
  sc.system.bodies = {object, left, right};
  sc.system.epsilon = 1.0;
  sc.system.h = 0.1;
  sc.system.phi_threshold = 0.12;
  sc.system.k_a = vec({10.0, 10.0, 10.0, 10.0});
  sc.system.mass_o = 0.5 * MatrixXd::Identity(2, 2);
  sc.system.finalize(sc.mu);

  // Default pose: antipodal grasp, fingertips level with the ball center.
  VectorXd q0 = VectorXd::Zero(6);
  Vector2d angles;
  if (two_link_ik(left, Vector2d(-0.085, 0.12), true, &angles)) q0.segment<2>(2) = angles;
  if (two_link_ik(right, Vector2d(0.085, 0.12), false, &angles)) q0.segment<2>(4) = angles;
  sc.system.default_q = q0;

  default_costs(&sc);
  sc.params.kappa = 1e4;
  sc.params.radius = 0.05;
  sc.params.H = 20;
  sc.params.eta = 0.2;
  sc.params.q_lb_a = VectorXd::Constant(4, -2.9);
  sc.params.q_ub_a = VectorXd::Constant(4, 2.9);
  sc.grasp.alpha = 1.0;
  sc.grasp.sample_lb = vec({-0.28, 0.0});
  sc.grasp.sample_ub = vec({0.28, 0.28});
  return sc;
}

Scenario make_pushert() {
  Scenario sc;
  sc.name = "pushert";
  sc.mu = 0.3;

  Body object = make_free_body("tee", false, {DofAxis::kX, DofAxis::kY, DofAxis::kTheta});
  Geom tee;
  tee.kind = GeomKind::kBoxUnion;
  tee.members.push_back({Vector2d(0.1, 0.025), Pose2{{0.0, 0.05}, 0.0}});
  tee.members.push_back({Vector2d(0.025, 0.075), Pose2{{0.0, -0.025}, 0.0}});
  object.geoms.push_back(tee);
  Body robot = make_free_body("pusher", true, {DofAxis::kX, DofAxis::kY});
  robot.geoms.push_back(circle(0.02));
  sc.system.bodies = {object, robot};
  sc.system.epsilon = 1.0;
  sc.system.h = 0.1;
  sc.system.phi_threshold = 0.2;
  sc.system.k_a = vec({100.0, 100.0});
  MatrixXd mass = MatrixXd::Identity(3, 3);
  mass(2, 2) = 0.0064;
  sc.system.mass_o = mass;
  sc.system.finalize(sc.mu);
  sc.system.default_q = vec({0.0, 0.0, 0.0, 0.0, -0.125});

  default_costs(&sc);
  set_rotation_weight(&sc, 2, 0.1);
  sc.params.kappa = 1e4;
  sc.params.radius = 0.06;
  sc.params.H = 25;
  sc.grasp.alpha = 10.0;
  sc.grasp.sample_lb = vec({-0.3, -0.3});
  sc.grasp.sample_ub = vec({0.3, 0.3});
  return sc;
}

Scenario make_palmsquare() {
  Scenario sc;
  sc.name = "palmsquare";
  sc.mu = 0.5;

  Body object = make_free_body("square", false, {DofAxis::kX, DofAxis::kY, DofAxis::kTheta});
  object.geoms.push_back(box(Vector2d(0.06, 0.06)));
  Body left = make_two_link_finger("finger_left", Vector2d(-0.20, 0.0), 0.14, 0.12, 0.02);
  Body right = make_two_link_finger("finger_right", Vector2d(0.20, 0.0), 0.14, 0.12, 0.02);
  sc.system.bodies = {object, left, right};
  sc.system.epsilon = 1.0;
  sc.system.h = 0.1;
  sc.system.phi_threshold = 0.12;
  sc.system.k_a = vec({10.0, 10.0, 10.0, 10.0});
  MatrixXd mass = 2.0 * MatrixXd::Identity(3, 3);
  mass(2, 2) = 0.01;
  sc.system.mass_o = mass;
  sc.system.finalize(sc.mu);

  VectorXd q0 = VectorXd::Zero(7);
  Vector2d angles;
  if (two_link_ik(left, Vector2d(-0.085, 0.0), true, &angles)) q0.segment<2>(3) = angles;
  if (two_link_ik(right, Vector2d(0.085, 0.0), false, &angles)) q0.segment<2>(5) = angles;
  sc.system.default_q = q0;

  default_costs(&sc);
  set_rotation_weight(&sc, 2, 0.1);
  sc.params.kappa = 1e4;
  sc.params.radius = 0.08;
  sc.params.H = 30;
  sc.params.eta = 0.25;
  sc.params.q_lb_a = VectorXd::Constant(4, -2.9);
  sc.params.q_ub_a = VectorXd::Constant(4, 2.9);
  sc.symmetry.order = 4;
  sc.symmetry.theta_dof = 2;
  sc.stable_poses = {vec({0.0, 0.0, 0.0})};
  sc.grasp.alpha = 10.0;
  sc.grasp.sample_lb = vec({-0.3, -0.3});
  sc.grasp.sample_ub = vec({0.3, 0.3});
  return sc;
}

}  // namespace

bool two_link_ik(const Body& chain, const Vector2d& target, bool elbow_up, Vector2d* angles) {
  const double l1 = chain.link_lengths.at(0);
  const double l2 = chain.link_lengths.at(1);
  const Vector2d d = target - chain.base.p;
  const double r2 = d.squaredNorm();
  const double c2 = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
  if (c2 < -1.0 || c2 > 1.0) return false;
  const double s2 = (elbow_up ? 1.0 : -1.0) * std::sqrt(std::max(0.0, 1.0 - c2 * c2));
  const double th2 = std::atan2(s2, c2);
  const double th1 =
      std::atan2(d.y(), d.x()) - std::atan2(l2 * s2, l1 + l2 * c2) - chain.base.th;
  *angles = Vector2d(th1, th2);
  return true;
}

std::vector<std::string> builtin_scenario_names() {
  return {"pusher1d", "squeeze1d", "boxball2d", "planarhand", "pushert", "palmsquare"};
}

Scenario make_scenario(const std::string& name) {
  if (name == "pusher1d") return make_pusher1d();
  if (name == "squeeze1d") return make_squeeze1d();
  if (name == "boxball2d") return make_boxball2d();
  if (name == "planarhand") return make_planarhand();
  if (name == "pushert") return make_pushert();
  if (name == "palmsquare") return make_palmsquare();
  throw Error("unknown-scenario",
              "no built-in scenario named '" + name + "'; known: pusher1d, squeeze1d, "
              "boxball2d, planarhand, pushert, palmsquare");
}

// ---------------------------------------------------------------------------
// JSON serialization. Field order is fixed so serialize(parse(x)) == x.

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

json mat_to_json(const MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

MatrixXd mat_from_json(const json& rows) {
  const int nr = static_cast<int>(rows.size());
  const int nc = nr ? static_cast<int>(rows[0].size()) : 0;
  MatrixXd m(nr, nc);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j) m(i, j) = rows[i][j].get<double>();
  return m;
}

json pose_to_json(const Pose2& p) {
  return json{{"x", p.p.x()}, {"y", p.p.y()}, {"theta", p.th}};
}

Pose2 pose_from_json(const json& j) {
  return Pose2{{j.at("x").get<double>(), j.at("y").get<double>()}, j.at("theta").get<double>()};
}

json geom_to_json(const Geom& g) {
  json j;
  switch (g.kind) {
    case GeomKind::kCircle:
      j["type"] = "circle";
      j["radius"] = g.radius;
      break;
    case GeomKind::kBox:
      j["type"] = "box";
      j["half"] = json::array({g.half.x(), g.half.y()});
      break;
    case GeomKind::kHalfPlane:
      j["type"] = "halfplane";
      j["normal"] = json::array({g.plane_normal.x(), g.plane_normal.y()});
      j["offset"] = g.plane_offset;
      break;
    case GeomKind::kBoxUnion: {
      j["type"] = "box_union";
      json members = json::array();
      for (const BoxMember& m : g.members) {
        members.push_back(json{{"half", json::array({m.half.x(), m.half.y()})},
                               {"pose", pose_to_json(m.local)}});
      }
      j["members"] = members;
      break;
    }
  }
  j["pose"] = pose_to_json(g.local);
  j["link"] = g.link;
  return j;
}

Geom geom_from_json(const json& j) {
  Geom g;
  const std::string type = j.at("type").get<std::string>();
  if (type == "circle") {
    g.kind = GeomKind::kCircle;
    g.radius = j.at("radius").get<double>();
  } else if (type == "box") {
    g.kind = GeomKind::kBox;
    g.half = Vector2d(j.at("half")[0].get<double>(), j.at("half")[1].get<double>());
  } else if (type == "halfplane") {
    g.kind = GeomKind::kHalfPlane;
    g.plane_normal =
        Vector2d(j.at("normal")[0].get<double>(), j.at("normal")[1].get<double>());
    g.plane_offset = j.at("offset").get<double>();
  } else if (type == "box_union") {
    g.kind = GeomKind::kBoxUnion;
    for (const auto& m : j.at("members")) {
      BoxMember member;
      member.half = Vector2d(m.at("half")[0].get<double>(), m.at("half")[1].get<double>());
      member.local = pose_from_json(m.at("pose"));
      g.members.push_back(member);
    }
  } else {
    throw Error("bad-scenario", "unknown geometry type: " + type);
  }
  g.local = pose_from_json(j.at("pose"));
  g.link = j.at("link").get<int>();
  return g;
}

json body_to_json(const Body& b) {
  json j;
  j["name"] = b.name;
  switch (b.kind) {
    case BodyKind::kFixed:
      j["kind"] = "fixed";
      break;
    case BodyKind::kFree:
      j["kind"] = "free";
      break;
    case BodyKind::kChain:
      j["kind"] = "chain";
      break;
  }
  j["actuated"] = b.actuated;
  j["base"] = pose_to_json(b.base);
  json axes = json::array();
  for (DofAxis a : b.axes)
    axes.push_back(a == DofAxis::kX ? "x" : (a == DofAxis::kY ? "y" : "theta"));
  j["axes"] = axes;
  j["link_lengths"] = json(b.link_lengths);
  json geoms = json::array();
  for (const Geom& g : b.geoms) geoms.push_back(geom_to_json(g));
  j["geoms"] = geoms;
  return j;
}

Body body_from_json(const json& j) {
  Body b;
  b.name = j.at("name").get<std::string>();
  const std::string kind = j.at("kind").get<std::string>();
  b.kind = (kind == "fixed") ? BodyKind::kFixed
                             : (kind == "free" ? BodyKind::kFree : BodyKind::kChain);
  b.actuated = j.at("actuated").get<bool>();
  b.base = pose_from_json(j.at("base"));
  for (const auto& a : j.at("axes")) {
    const std::string s = a.get<std::string>();
    b.axes.push_back(s == "x" ? DofAxis::kX : (s == "y" ? DofAxis::kY : DofAxis::kTheta));
  }
  b.link_lengths = j.at("link_lengths").get<std::vector<double>>();
  for (const auto& g : j.at("geoms")) b.geoms.push_back(geom_from_json(g));
  return b;
}

json optvec_to_json(const std::optional<VectorXd>& v) {
  if (!v) return nullptr;
  return vec_to_json(*v);
}

std::optional<VectorXd> optvec_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return vec_from_json(j);
}

}  // namespace

std::string scenario_to_json(const Scenario& sc) {
  json j;
  j["name"] = sc.name;
  j["mu"] = sc.mu;
  json sys;
  json bodies = json::array();
  for (const Body& b : sc.system.bodies) bodies.push_back(body_to_json(b));
  sys["bodies"] = bodies;
  sys["stiffness"] = vec_to_json(sc.system.k_a);
  sys["object_mass"] = mat_to_json(sc.system.mass_o);
  sys["epsilon"] = sc.system.epsilon;
  sys["h"] = sc.system.h;
  sys["tau_a"] = vec_to_json(sc.system.tau_a);
  sys["tau_o"] = vec_to_json(sc.system.tau_o);
  sys["phi_threshold"] = sc.system.phi_threshold;
  sys["default_q"] = vec_to_json(sc.system.default_q);
  j["system"] = sys;

  json p;
  p["T"] = sc.params.T;
  p["n_max"] = sc.params.n_max;
  p["H"] = sc.params.H;
  p["replans"] = sc.params.replans;
  p["Q"] = mat_to_json(sc.params.Q);
  p["R"] = mat_to_json(sc.params.R);
  p["eta"] = sc.params.eta;
  p["variant"] = to_string(sc.params.variant);
  p["radius"] = sc.params.radius;
  p["kappa"] = sc.params.kappa;
  p["convergence_tol"] = sc.params.convergence_tol;
  p["cost_decrease_tol"] = sc.params.cost_decrease_tol;
  p["goal_tolerance"] = sc.params.goal_tolerance;
  p["phi_contact"] = sc.params.phi_contact;
  p["kappa_pull"] = sc.params.kappa_pull;
  p["q_lb_a"] = optvec_to_json(sc.params.q_lb_a);
  p["q_ub_a"] = optvec_to_json(sc.params.q_ub_a);
  p["tau_lb"] = optvec_to_json(sc.params.tau_lb);
  p["tau_ub"] = optvec_to_json(sc.params.tau_ub);
  j["planner"] = p;

  json s;
  s["dt"] = sc.soft.dt;
  s["k_n"] = sc.soft.k_n;
  s["contact_damping"] = sc.soft.contact_damping;
  s["friction_slope"] = sc.soft.friction_slope;
  s["robot_damping"] = sc.soft.robot_damping;
  s["robot_mass"] = sc.soft.robot_mass;
  s["object_damping"] = sc.soft.object_damping;
  s["workspace_bound"] = sc.soft.workspace_bound;
  j["soft"] = s;

  j["symmetry"] = json{{"order", sc.symmetry.order}, {"theta_dof", sc.symmetry.theta_dof}};
  json poses = json::array();
  for (const VectorXd& p2 : sc.stable_poses) poses.push_back(vec_to_json(p2));
  j["stable_poses"] = poses;
  j["grasp"] = json{{"alpha", sc.grasp.alpha},
                    {"sample_lb", vec_to_json(sc.grasp.sample_lb)},
                    {"sample_ub", vec_to_json(sc.grasp.sample_ub)}};
  return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  const json j = json::parse(text);
  Scenario sc;
  sc.name = j.at("name").get<std::string>();
  sc.mu = j.at("mu").get<double>();
  const json& sys = j.at("system");
  for (const auto& b : sys.at("bodies")) sc.system.bodies.push_back(body_from_json(b));
  sc.system.k_a = vec_from_json(sys.at("stiffness"));
  sc.system.mass_o = mat_from_json(sys.at("object_mass"));
  sc.system.epsilon = sys.at("epsilon").get<double>();
  sc.system.h = sys.at("h").get<double>();
  sc.system.tau_a = vec_from_json(sys.at("tau_a"));
  sc.system.tau_o = vec_from_json(sys.at("tau_o"));
  sc.system.phi_threshold = sys.at("phi_threshold").get<double>();
  sc.system.finalize(sc.mu);
  sc.system.default_q = vec_from_json(sys.at("default_q"));

  const json& p = j.at("planner");
  sc.params.T = p.at("T").get<int>();
  sc.params.n_max = p.at("n_max").get<int>();
  sc.params.H = p.at("H").get<int>();
  sc.params.replans = p.at("replans").get<int>();
  sc.params.Q = mat_from_json(p.at("Q"));
  sc.params.R = mat_from_json(p.at("R"));
  sc.params.eta = p.at("eta").get<double>();
  sc.params.variant = trust_region_variant_from_string(p.at("variant").get<std::string>());
  sc.params.radius = p.at("radius").get<double>();
  sc.params.kappa = p.at("kappa").get<double>();
  sc.params.convergence_tol = p.at("convergence_tol").get<double>();
  sc.params.cost_decrease_tol = p.at("cost_decrease_tol").get<double>();
  sc.params.goal_tolerance = p.at("goal_tolerance").get<double>();
  sc.params.phi_contact = p.at("phi_contact").get<double>();
  sc.params.kappa_pull = p.at("kappa_pull").get<double>();
  sc.params.q_lb_a = optvec_from_json(p.at("q_lb_a"));
  sc.params.q_ub_a = optvec_from_json(p.at("q_ub_a"));
  sc.params.tau_lb = optvec_from_json(p.at("tau_lb"));
  sc.params.tau_ub = optvec_from_json(p.at("tau_ub"));

  const json& s = j.at("soft");
  sc.soft.dt = s.at("dt").get<double>();
  sc.soft.k_n = s.at("k_n").get<double>();
  sc.soft.contact_damping = s.at("contact_damping").get<double>();
  sc.soft.friction_slope = s.at("friction_slope").get<double>();
  sc.soft.robot_damping = s.at("robot_damping").get<double>();
  sc.soft.robot_mass = s.at("robot_mass").get<double>();
  sc.soft.object_damping = s.at("object_damping").get<double>();
  sc.soft.workspace_bound = s.at("workspace_bound").get<double>();

  sc.symmetry.order = j.at("symmetry").at("order").get<int>();
  sc.symmetry.theta_dof = j.at("symmetry").at("theta_dof").get<int>();
  for (const auto& p2 : j.at("stable_poses")) sc.stable_poses.push_back(vec_from_json(p2));
  sc.grasp.alpha = j.at("grasp").at("alpha").get<double>();
  sc.grasp.sample_lb = vec_from_json(j.at("grasp").at("sample_lb"));
  sc.grasp.sample_ub = vec_from_json(j.at("grasp").at("sample_ub"));
  return sc;
}

Scenario load_scenario(const std::string& name_or_path) {
  for (const std::string& name : builtin_scenario_names())
    if (name == name_or_path) return make_scenario(name);
  std::ifstream in(name_or_path);
  if (!in)
    throw Error("unknown-scenario", "'" + name_or_path +
                                        "' is neither a built-in scenario nor a readable file; "
                                        "built-ins: pusher1d, squeeze1d, boxball2d, planarhand, "
                                        "pushert, palmsquare");
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

uint64_t scenario_hash(const Scenario& sc) {
  const std::string text = scenario_to_json(sc);
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace ctr
