#include "ctr/cli.hpp"

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "ctr/cqdc.hpp"
#include "ctr/grasp.hpp"
#include "ctr/io.hpp"
#include "ctr/planner.hpp"
#include "ctr/roadmap.hpp"
#include "ctr/scenario.hpp"

namespace ctr {

namespace {

namespace fs = std::filesystem;

VectorXd parse_vector(const std::string& csv) {
  std::vector<double> vals;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      vals.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) vals.push_back(std::stod(cur));
  VectorXd v(static_cast<int>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) v[static_cast<int>(i)] = vals[i];
  return v;
}

std::string join_args(const std::vector<std::string>& args) {
  std::string out = "ctr";
  for (const auto& a : args) out += " " + a;
  return out;
}

std::string out_directory(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("CTR_OUT_DIR")) return env;
  return "out";
}

struct RunContext {
  std::string out_dir;
  std::string command_line;
  uint64_t seed = 0;
  Scenario scenario;
  std::vector<std::string> artifacts;

  std::string path(const std::string& file) {
    artifacts.push_back(file);
    return (fs::path(out_dir) / file).string();
  }
  void finish() {
    write_manifest(out_dir, command_line, seed, scenario.name, scenario_hash(scenario),
                   artifacts);
  }
};

void apply_planner_flags(Scenario* sc, const std::string& variant, double radius, double kappa,
                         int horizon, int T, int n_max) {
  if (!variant.empty()) sc->params.variant = trust_region_variant_from_string(variant);
  if (radius > 0) sc->params.radius = radius;
  if (kappa > 0) sc->params.kappa = kappa;
  if (horizon > 0) sc->params.H = horizon;
  if (T > 0) sc->params.T = T;
  if (n_max > 0) sc->params.n_max = n_max;
}

std::vector<std::string> rollout_columns(const SystemModel& sys) {
  std::vector<std::string> cols{"t"};
  for (int i = 0; i < sys.nq; ++i) cols.push_back("q" + std::to_string(i));
  for (int i = 0; i < sys.n_qa; ++i) cols.push_back("u" + std::to_string(i));
  for (size_t p = 0; p < sys.contact_pairs.size(); ++p) {
    cols.push_back("fn_pair" + std::to_string(p));
    cols.push_back("ft_pair" + std::to_string(p));
  }
  return cols;
}

void append_rollout_row(CsvWriter* csv, const SystemModel& sys, int t, const VectorXd& q,
                        const VectorXd& u, const StepResult* step) {
  std::vector<double> row{static_cast<double>(t)};
  for (int i = 0; i < sys.nq; ++i) row.push_back(q[i]);
  for (int i = 0; i < sys.n_qa; ++i) row.push_back(u.size() ? u[i] : 0.0);
  std::vector<double> fn(sys.contact_pairs.size(), 0.0), ft(sys.contact_pairs.size(), 0.0);
  if (step) {
    for (size_t i = 0; i < step->problem.contacts.size(); ++i) {
      const int pi = step->problem.contacts[i].pair_index;
      fn[pi] = step->forces[i][0];
      ft[pi] = (step->forces[i].size() > 1) ? step->forces[i][1] : 0.0;
    }
  }
  for (size_t p = 0; p < sys.contact_pairs.size(); ++p) {
    row.push_back(fn[p]);
    row.push_back(ft[p]);
  }
  csv->add_row(row);
}

int cmd_simulate(RunContext& ctx, int steps, const std::string& u_const, double kappa,
                 const std::string& plant, const std::string& q0_csv) {
  const SystemModel& sys = ctx.scenario.system;
  VectorXd q = q0_csv.empty() ? sys.default_q : parse_vector(q0_csv);
  VectorXd u = u_const.empty() ? sys.actuated_part(q) : parse_vector(u_const);
  if (u.size() != sys.n_qa) throw Error("bad-input", "u dimension mismatch");

  CsvWriter csv(rollout_columns(sys));
  if (plant == "soft") {
    SoftPlant soft(sys, ctx.scenario.soft);
    SoftPlantState s = soft.make_state(q);
    append_rollout_row(&csv, sys, 0, s.q, u, nullptr);
    for (int t = 0; t < steps; ++t) {
      s = soft.advance(s, u, sys.h);
      append_rollout_row(&csv, sys, t + 1, s.q, u, nullptr);
    }
  } else {
    append_rollout_row(&csv, sys, 0, q, u, nullptr);
    for (int t = 0; t < steps; ++t) {
      const StepResult step = (kappa > 0) ? step_smoothed(sys, q, u, kappa)
                                          : step_nonsmooth(sys, q, u);
      q = step.q_next;
      append_rollout_row(&csv, sys, t + 1, q, u, &step);
    }
  }
  csv.write(ctx.path("rollout.csv"));
  ctx.finish();
  return 0;
}

int cmd_grad_check(RunContext& ctx, double kappa, double fd_step, const std::string& q0_csv,
                   const std::string& u_csv) {
  const SystemModel& sys = ctx.scenario.system;
  const VectorXd q = q0_csv.empty() ? sys.default_q : parse_vector(q0_csv);
  const VectorXd u = u_csv.empty() ? sys.actuated_part(q) : parse_vector(u_csv);
  const double kap = (kappa > 0) ? kappa : ctx.scenario.params.kappa;

  const LinearizedDynamics lin = linearize_u(sys, q, u, kap);
  BarrierOptions tight;
  tight.tol = 1e-13;
  std::vector<int> pairs;
  for (const auto& ck : lin.contacts) pairs.push_back(ck.pair_index);

  CsvWriter csv({"block", "row", "col", "analytic", "finite_difference", "rel_err"});
  double scale_b = std::max(1e-12, lin.B.cwiseAbs().maxCoeff());
  for (int j = 0; j < sys.n_qa; ++j) {
    VectorXd up = u, dn = u;
    up[j] += fd_step;
    dn[j] -= fd_step;
    const StepResult sp = step_smoothed(sys, q, up, kap, tight, &pairs);
    const StepResult sm = step_smoothed(sys, q, dn, kap, tight, &pairs);
    const VectorXd col = (sp.q_next - sm.q_next) / (2.0 * fd_step);
    for (int i = 0; i < sys.nq; ++i) {
      const double rel = std::abs(lin.B(i, j) - col[i]) / scale_b;
      csv.add_row_mixed({"B", std::to_string(i), std::to_string(j),
                         CsvWriter::format_double(lin.B(i, j)), CsvWriter::format_double(col[i]),
                         CsvWriter::format_double(rel)});
    }
    for (size_t ci = 0; ci < lin.contacts.size(); ++ci) {
      const VectorXd dcol = (sp.forces[ci] - sm.forces[ci]) / (2.0 * fd_step);
      const double scale_d = std::max(1e-12, lin.D[ci].cwiseAbs().maxCoeff());
      for (int i = 0; i < lin.contacts[ci].d; ++i) {
        const double rel = std::abs(lin.D[ci](i, j) - dcol[i]) / scale_d;
        csv.add_row_mixed({"D" + std::to_string(ci), std::to_string(i), std::to_string(j),
                           CsvWriter::format_double(lin.D[ci](i, j)),
                           CsvWriter::format_double(dcol[i]), CsvWriter::format_double(rel)});
      }
    }
  }
  csv.write(ctx.path("gradcheck.csv"));
  ctx.finish();
  return 0;
}

int cmd_trust_region(RunContext& ctx, const std::string& variant, double radius, int n,
                     bool svg, const std::string& q0_csv) {
  Scenario& sc = ctx.scenario;
  const SystemModel& sys = sc.system;
  const VectorXd q = q0_csv.empty() ? sys.default_q : parse_vector(q0_csv);
  const VectorXd u = sys.actuated_part(q);
  const TrustRegionVariant var = variant.empty() ? TrustRegionVariant::kRactr
                                                 : trust_region_variant_from_string(variant);
  const double r = (radius > 0) ? radius : sc.params.radius;

  LinearizedDynamics lin = linearize_u(sys, q, u, sc.params.kappa);
  if (!is_action_only(var)) linearize_q(sys, &lin, QLinearizationMode::kFiniteDifference);
  const TrustRegionConstraints cs =
      build_trust_region(TrustRegionSpec::ball(var, r, sc.params.kappa), lin, sys);
  const TrustRegionSamples samples = sample_trust_region(cs, n, ctx.seed);

  std::vector<std::string> cols;
  for (int i = 0; i < cs.dim(); ++i) cols.push_back("dz" + std::to_string(i));
  CsvWriter csv(cols);
  for (const VectorXd& s : samples.samples) {
    std::vector<double> row;
    for (int i = 0; i < s.size(); ++i) row.push_back(s[i]);
    csv.add_row(row);
  }
  csv.write(ctx.path("trust_region_samples.csv"));
  std::cout << "acceptance_rate " << samples.acceptance_rate << "\n";

  if (svg && cs.dim() >= 2) {
    SvgSeries series;
    series.color = "#ff7f0e";
    for (const VectorXd& s : samples.samples) series.points.push_back(Vector2d(s[0], s[1]));
    write_text_file(ctx.path("trust_region.svg"),
                    svg_scatter({series}, sc.name + " " + to_string(var)));
  }
  ctx.finish();
  return 0;
}

int cmd_motion_set(RunContext& ctx, const std::string& variant, double radius, int n, bool svg,
                   const std::string& q0_csv) {
  Scenario& sc = ctx.scenario;
  const SystemModel& sys = sc.system;
  const VectorXd q = q0_csv.empty() ? sys.default_q : parse_vector(q0_csv);
  const VectorXd u = sys.actuated_part(q);
  const TrustRegionVariant var = variant.empty() ? TrustRegionVariant::kRactr
                                                 : trust_region_variant_from_string(variant);
  const double r = (radius > 0) ? radius : sc.params.radius;

  const LinearizedDynamics lin = linearize_u(sys, q, u, sc.params.kappa);
  const TrustRegionConstraints cs =
      build_trust_region(TrustRegionSpec::ball(var, r, sc.params.kappa), lin, sys);
  const TrustRegionSamples samples = sample_trust_region(cs, n, ctx.seed);
  const std::vector<VectorXd> motion = motion_set_samples(lin, samples.samples, sys, true);
  const WrenchSamples wrench = wrench_set_samples(sys, lin, samples.samples);

  std::vector<std::string> cols;
  for (int i = 0; i < sys.n_qo; ++i) cols.push_back("qo" + std::to_string(i));
  CsvWriter csv(cols);
  for (const VectorXd& m : motion) {
    std::vector<double> row;
    for (int i = 0; i < m.size(); ++i) row.push_back(m[i]);
    csv.add_row(row);
  }
  csv.write(ctx.path("motion_set.csv"));

  std::vector<std::string> wcols;
  for (int i = 0; i < sys.n_qo; ++i) wcols.push_back("w" + std::to_string(i));
  CsvWriter wcsv(wcols);
  for (const VectorXd& w : wrench.total_wrenches) {
    std::vector<double> row;
    for (int i = 0; i < w.size(); ++i) row.push_back(w[i]);
    wcsv.add_row(row);
  }
  wcsv.write(ctx.path("wrench_set.csv"));

  if (svg && sys.n_qo >= 2) {
    SvgSeries series;
    series.color = "#2ca02c";
    for (const VectorXd& m : motion) series.points.push_back(Vector2d(m[0], m[1]));
    write_text_file(ctx.path("motion_set.svg"),
                    svg_scatter({series}, sc.name + " motion set"));
  }
  ctx.finish();
  return 0;
}

int cmd_plan(RunContext& ctx, const std::string& goal_csv, const std::string& q0_csv) {
  Scenario& sc = ctx.scenario;
  const SystemModel& sys = sc.system;
  const VectorXd q0 = q0_csv.empty() ? sys.default_q : parse_vector(q0_csv);
  const VectorXd q_o_goal = parse_vector(goal_csv);
  const VectorXd goal = goal_configuration(sys, q_o_goal, q0);

  const HeuristicResult h =
      initial_guess_heuristic(sys, q0, sc.params.kappa_pull, sc.params.phi_contact);
  std::vector<VectorXd> guess(sc.params.T, h.u);
  const TrajOptResult res = ctr_trajopt(sys, q0, goal, guess, sc.params, sys.actuated_part(q0));

  std::vector<std::string> cols{"knot"};
  for (int i = 0; i < sys.n_qa; ++i) cols.push_back("u" + std::to_string(i));
  CsvWriter csv(cols);
  for (size_t t = 0; t < res.u.size(); ++t) {
    std::vector<double> row{static_cast<double>(t)};
    for (int i = 0; i < sys.n_qa; ++i) row.push_back(res.u[t][i]);
    csv.add_row(row);
  }
  csv.write(ctx.path("plan.csv"));
  std::cout << "iterations " << res.iterations << " converged " << res.converged << "\n";
  ctx.finish();
  return 0;
}

int cmd_mpc(RunContext& ctx, const std::string& goal_csv, const std::string& q0_csv,
            bool projected) {
  Scenario& sc = ctx.scenario;
  const SystemModel& sys = sc.system;
  const VectorXd q0 = q0_csv.empty() ? sys.default_q : parse_vector(q0_csv);
  const VectorXd q_o_goal = parse_vector(goal_csv);
  const VectorXd goal = goal_configuration(sys, q_o_goal, q0);
  const MpcLog log = mpc_rollout(sys, q0, goal, sc.params, projected);

  CsvWriter csv(rollout_columns(sys));
  append_rollout_row(&csv, sys, 0, log.traj.q[0], sys.actuated_part(q0), nullptr);
  for (size_t t = 0; t < log.traj.u.size(); ++t)
    append_rollout_row(&csv, sys, static_cast<int>(t) + 1, log.traj.q[t + 1], log.traj.u[t],
                       nullptr);
  csv.write(ctx.path("mpc_rollout.csv"));
  std::cout << "terminal_error " << object_error(sys, log.traj.q.back(), q_o_goal)
            << " early_stop " << log.terminated_early << "\n";
  ctx.finish();
  return 0;
}

int cmd_bench(RunContext& ctx, int n_goals, const std::string& variants_csv) {
  Scenario& sc = ctx.scenario;
  const SystemModel& sys = sc.system;
  const VectorXd q_nominal = sys.default_q;
  const auto goals = generate_goals(sys, q_nominal, n_goals, ctx.seed, sc.params);

  std::vector<std::string> variants;
  {
    std::string cur;
    for (char c : variants_csv + ",") {
      if (c == ',') {
        if (!cur.empty()) variants.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
  }
  CsvWriter csv({"variant", "goals", "mean_trans_err", "std_trans_err", "mean_rot_err",
                 "std_rot_err", "success_rate", "infeasible"});
  for (const std::string& variant : variants) {
    PlannerParams params = sc.params;
    params.variant = trust_region_variant_from_string(variant);
    double sum_t = 0, sum_t2 = 0, sum_r = 0, sum_r2 = 0;
    int success = 0, infeasible = 0;
    for (const GoalSample& g : goals) {
      const VectorXd goal = goal_configuration(sys, g.q_o_goal, g.q0);
      const MpcLog log = mpc_rollout(sys, g.q0, goal, params);
      infeasible += log.infeasible_subproblems;
      const PoseError err =
          object_pose_error(sys, sys.object_part(log.traj.q.back()), g.q_o_goal);
      sum_t += err.translation;
      sum_t2 += err.translation * err.translation;
      sum_r += err.rotation;
      sum_r2 += err.rotation * err.rotation;
      if (err.translation <= 0.010 && err.rotation <= 0.050) ++success;
    }
    const double n = static_cast<double>(goals.size());
    const double mt = sum_t / n, mr = sum_r / n;
    csv.add_row_mixed({variant, std::to_string(goals.size()), CsvWriter::format_double(mt),
                       CsvWriter::format_double(std::sqrt(std::max(0.0, sum_t2 / n - mt * mt))),
                       CsvWriter::format_double(mr),
                       CsvWriter::format_double(std::sqrt(std::max(0.0, sum_r2 / n - mr * mr))),
                       CsvWriter::format_double(success / n), std::to_string(infeasible)});
  }
  csv.write(ctx.path("bench.csv"));
  ctx.finish();
  return 0;
}

int cmd_grasp(RunContext& ctx, const std::string& goal_csv, int n, double alpha, int field_res) {
  Scenario& sc = ctx.scenario;
  const SystemModel& sys = sc.system;
  const VectorXd q_o = sys.object_part(sys.default_q);
  const VectorXd q_o_goal = parse_vector(goal_csv);
  const double a = (alpha >= 0) ? alpha : sc.grasp.alpha;

  const GraspCandidate best = sample_grasps(sc, q_o, q_o_goal, n, a, ctx.seed);
  std::vector<std::string> cols;
  for (int i = 0; i < sys.n_qa; ++i) cols.push_back("qa" + std::to_string(i));
  cols.insert(cols.end(), {"value", "radius", "cost"});
  CsvWriter csv(cols);
  std::vector<double> row;
  for (int i = 0; i < sys.n_qa; ++i) row.push_back(best.q_a[i]);
  row.insert(row.end(), {best.value, best.radius, best.cost});
  csv.add_row(row);
  csv.write(ctx.path("grasp_best.csv"));

  if (field_res > 0 && sys.bodies.size() >= 2) {
    // Value-function landscape over free-robot positions (pusher scenarios).
    CsvWriter field({"x", "y", "value"});
    const VectorXd lb = sc.grasp.sample_lb, ub = sc.grasp.sample_ub;
    for (int i = 0; i < field_res; ++i) {
      for (int j = 0; j < field_res; ++j) {
        const double x = lb[0] + (ub[0] - lb[0]) * (i + 0.5) / field_res;
        const double y = lb[1] + (ub[1] - lb[1]) * (j + 0.5) / field_res;
        VectorXd q_a(2);
        q_a << x, y;
        bool bad = false;
        VectorXd q_full = sys.merge(q_o, q_a);
        for (const PairSpec& pair : sys.collision_pairs)
          if (pair_distance(sys, q_full, pair).phi < -1e-6) bad = true;
        double v = std::numeric_limits<double>::quiet_NaN();
        if (!bad) v = value_function(sc, q_a, q_o, q_o_goal);
        field.add_row({x, y, v});
      }
    }
    field.write(ctx.path("value_field.csv"));
  }
  ctx.finish();
  return 0;
}

int cmd_roadmap(RunContext& ctx, const std::string& action, const std::string& file,
                const std::string& goal_csv, int walk_steps, int grasp_samples) {
  Scenario& sc = ctx.scenario;
  const SystemModel& sys = sc.system;
  RoadmapParams rparams;

  if (action == "build") {
    if (sc.stable_poses.empty()) throw Error("bad-input", "scenario declares no stable poses");
    std::vector<RoadmapVertex> grasps;
    const VectorXd q_o = sc.stable_poses[0];
    // One grasp per basic rotation direction.
    const double dtheta = (sc.symmetry.order > 1) ? 2.0 * M_PI / sc.symmetry.order : 0.5;
    for (int dir = 0; dir < 2; ++dir) {
      VectorXd goal = q_o;
      if (sc.symmetry.theta_dof >= 0)
        goal[sc.symmetry.theta_dof] += (dir == 0 ? dtheta : -dtheta);
      const GraspCandidate g =
          sample_grasps(sc, q_o, goal, grasp_samples, sc.grasp.alpha, ctx.seed + dir);
      grasps.push_back(RoadmapVertex{q_o, g.q_a});
    }
    const Roadmap rm = build_roadmap(sc, grasps, rparams, ctx.seed);
    write_text_file(ctx.path(file.empty() ? "roadmap.json" : file), roadmap_to_json(rm));
    std::cout << "vertices " << rm.vertices.size() << " edges " << rm.edges.size() << "\n";
  } else if (action == "query") {
    std::ifstream in(fs::path(ctx.out_dir) / (file.empty() ? "roadmap.json" : file));
    if (!in) throw Error("io-error", "cannot read roadmap file");
    std::stringstream ss;
    ss << in.rdbuf();
    const Roadmap rm = roadmap_from_json(ss.str());
    const VectorXd q0 = rm.vertex_config(sys, 0);
    const QueryResult res =
        query_roadmap(sc, rm, q0, parse_vector(goal_csv), rparams, ctx.seed);
    CsvWriter csv(rollout_columns(sys));
    for (size_t t = 0; t < res.traj.q.size(); ++t)
      append_rollout_row(&csv, sys, static_cast<int>(t), res.traj.q[t],
                         t < res.traj.u.size() ? res.traj.u[t] : VectorXd(), nullptr);
    csv.write(ctx.path("roadmap_query.csv"));
    std::cout << "path_length " << res.path_length << " vertices " << res.vertex_path.size()
              << "\n";
  } else if (action == "walk") {
    std::ifstream in(fs::path(ctx.out_dir) / (file.empty() ? "roadmap.json" : file));
    if (!in) throw Error("io-error", "cannot read roadmap file");
    std::stringstream ss;
    ss << in.rdbuf();
    const Roadmap rm = roadmap_from_json(ss.str());
    const WalkResult walk = random_walk(sc, rm, walk_steps, ctx.seed, rparams);
    std::cout << "walk_successes " << walk.successes << "/" << walk.attempts << "\n";
  } else {
    throw CLI::ValidationError("roadmap action must be build|query|walk");
  }
  ctx.finish();
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"contact trust region toolkit"};
  app.require_subcommand(1);

  std::string scenario_name, out_dir_flag, q0_csv, u_csv, goal_csv, variant, plant = "cqdc";
  std::string roadmap_action, roadmap_file, variants_csv = "etr,ctr,r-ctr";
  uint64_t seed = 0;
  int steps = 10, n_samples = 2000, horizon = 0, T = 0, n_max = 0, n_goals = 20;
  int walk_steps = 20, grasp_n = 50, field_res = 0;
  double kappa = 0, radius = 0, fd_step = 1e-5, alpha = -1;
  bool svg = false, projected = false, deterministic = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("scenario", scenario_name, "built-in name or scenario JSON path")
        ->required();
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--out-dir", out_dir_flag, "artifact directory (default $CTR_OUT_DIR or out)");
    cmd->add_flag("--deterministic", deterministic, "suppress nondeterministic metadata (default)");
    cmd->add_option("--q0", q0_csv, "initial configuration, comma separated");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "roll out the dynamics");
  add_common(simulate);
  simulate->add_option("--steps", steps);
  simulate->add_option("--u-const", u_csv, "constant position command");
  simulate->add_option("--kappa", kappa, "smoothed dynamics when positive");
  simulate->add_option("--plant", plant, "cqdc|soft");

  CLI::App* grad = app.add_subcommand("grad-check", "sensitivity vs finite differences");
  add_common(grad);
  grad->add_option("--kappa", kappa);
  grad->add_option("--fd-step", fd_step);
  grad->add_option("--u", goal_csv, "nominal input override");

  CLI::App* tr = app.add_subcommand("trust-region", "sample a trust region");
  add_common(tr);
  tr->add_option("--variant", variant);
  tr->add_option("--r", radius);
  tr->add_option("--n", n_samples);
  tr->add_flag("--svg", svg);

  CLI::App* ms = app.add_subcommand("motion-set", "sample motion and wrench sets");
  add_common(ms);
  ms->add_option("--variant", variant);
  ms->add_option("--r", radius);
  ms->add_option("--n", n_samples);
  ms->add_flag("--svg", svg);

  CLI::App* plan = app.add_subcommand("plan", "trajectory optimization to an object goal");
  add_common(plan);
  plan->add_option("--goal", goal_csv)->required();
  plan->add_option("--variant", variant);
  plan->add_option("--r", radius);
  plan->add_option("--kappa", kappa);
  plan->add_option("--iters", n_max);

  CLI::App* mpc = app.add_subcommand("mpc", "closed-loop MPC rollout");
  add_common(mpc);
  mpc->add_option("--goal", goal_csv)->required();
  mpc->add_option("--variant", variant);
  mpc->add_option("--r", radius);
  mpc->add_option("--kappa", kappa);
  mpc->add_option("--H", horizon);
  mpc->add_flag("--projected", projected, "apply the contact heuristic at every step");

  CLI::App* bench = app.add_subcommand("bench", "goal-suite benchmark across variants");
  add_common(bench);
  bench->add_option("--goals", n_goals);
  bench->add_option("--variants", variants_csv);
  bench->add_option("--H", horizon);
  bench->add_option("--r", radius);

  CLI::App* grasp = app.add_subcommand("grasp", "goal-conditioned grasp search");
  add_common(grasp);
  grasp->add_option("--goal", goal_csv)->required();
  grasp->add_option("--n", grasp_n);
  grasp->add_option("--alpha", alpha);
  grasp->add_option("--field", field_res, "emit a value-function grid of this resolution");

  CLI::App* roadmap = app.add_subcommand("roadmap", "build/query/walk a roadmap");
  add_common(roadmap);
  roadmap->add_option("action", roadmap_action, "build|query|walk")->required();
  roadmap->add_option("--file", roadmap_file);
  roadmap->add_option("--goal", goal_csv);
  roadmap->add_option("--walk-steps", walk_steps);
  roadmap->add_option("--grasp-samples", grasp_n);

  std::vector<const char*> argv{"ctr"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return 0;
    }
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    RunContext ctx;
    ctx.seed = seed;
    ctx.command_line = join_args(args);
    ctx.out_dir = out_directory(out_dir_flag);
    fs::create_directories(ctx.out_dir);
    ctx.scenario = load_scenario(scenario_name);
    apply_planner_flags(&ctx.scenario, variant, radius, kappa, horizon, T, n_max);

    if (simulate->parsed())
      return cmd_simulate(ctx, steps, u_csv, kappa, plant, q0_csv);
    if (grad->parsed()) return cmd_grad_check(ctx, kappa, fd_step, q0_csv, goal_csv);
    if (tr->parsed()) return cmd_trust_region(ctx, variant, radius, n_samples, svg, q0_csv);
    if (ms->parsed()) return cmd_motion_set(ctx, variant, radius, n_samples, svg, q0_csv);
    if (plan->parsed()) return cmd_plan(ctx, goal_csv, q0_csv);
    if (mpc->parsed()) return cmd_mpc(ctx, goal_csv, q0_csv, projected);
    if (bench->parsed()) return cmd_bench(ctx, n_goals, variants_csv);
    if (grasp->parsed()) return cmd_grasp(ctx, goal_csv, grasp_n, alpha, field_res);
    if (roadmap->parsed())
      return cmd_roadmap(ctx, roadmap_action, roadmap_file, goal_csv, walk_steps, grasp_n);
    std::cerr << "usage error: no subcommand\n";
    return 2;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ctr
