#include "ctr/conic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace ctr {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kMaxIterations:
      return "max-iterations";
    case SolveStatus::kNumericalFailure:
      return "numerical-failure";
  }
  return "unknown";
}

void ConicProgram::validate() const {
  const int n = num_vars();
  if (P.rows() != n || P.cols() != n) throw Error("bad-program", "cost matrix size mismatch");
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + P.cwiseAbs().maxCoeff()))
    throw Error("bad-program", "cost matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(P, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()))
    throw Error("bad-program", "cost matrix not PSD");
  if (E.rows() > 0 && (E.cols() != n || f.size() != E.rows()))
    throw Error("bad-program", "equality constraint size mismatch");
  for (const ConeConstraint& k : cones) {
    if (k.A.cols() != n || k.c.size() != k.A.rows() || k.A.rows() < 1)
      throw Error("bad-program", "cone constraint size mismatch");
    if (k.mu < 0.0) throw Error("bad-program", "cone mu must be nonnegative");
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Jordan (spin) algebra helpers for the standard second-order cone
// { v : v_0 >= ||v_1:|| }. dim-1 blocks are plain nonnegative scalars.

double jdet(const VectorXd& u) {
  if (u.size() == 1) return u[0];
  return u[0] * u[0] - u.tail(u.size() - 1).squaredNorm();
}

// margin > 0 iff strictly interior.
double cone_margin(const VectorXd& u) {
  if (u.size() == 1) return u[0];
  return u[0] - u.tail(u.size() - 1).norm();
}

VectorXd jproduct(const VectorXd& u, const VectorXd& v) {
  if (u.size() == 1) return u.cwiseProduct(v);
  VectorXd out(u.size());
  out[0] = u.dot(v);
  out.tail(u.size() - 1) = u[0] * v.tail(v.size() - 1) + v[0] * u.tail(u.size() - 1);
  return out;
}

VectorXd jidentity(int dim) {
  VectorXd e = VectorXd::Zero(dim);
  e[0] = 1.0;
  return e;
}

// Spectral power u^p for strictly interior u.
VectorXd jpow(const VectorXd& u, double p) {
  if (u.size() == 1) return VectorXd::Constant(1, std::pow(u[0], p));
  const int m = static_cast<int>(u.size()) - 1;
  const double w = u.tail(m).norm();
  const double l1 = u[0] - w, l2 = u[0] + w;
  VectorXd dir = (w > 0.0) ? VectorXd(u.tail(m) / w) : VectorXd(VectorXd::Unit(m, 0));
  const double p1 = std::pow(l1, p), p2 = std::pow(l2, p);
  VectorXd out(u.size());
  out[0] = 0.5 * (p1 + p2);
  out.tail(m) = 0.5 * (p2 - p1) * dir;
  return out;
}

// Quadratic representation Q_u v = 2 u (u'v) - det(u) R v, R = diag(1, -I).
VectorXd quad_rep(const VectorXd& u, const VectorXd& v) {
  if (u.size() == 1) return VectorXd::Constant(1, u[0] * u[0] * v[0]);
  VectorXd rv(v.size());
  rv[0] = v[0];
  rv.tail(v.size() - 1) = -v.tail(v.size() - 1);
  return 2.0 * u * u.dot(v) - jdet(u) * rv;
}

// Solves (arrow of u) y = r, i.e. u o y = r, for interior u.
VectorXd arrow_solve(const VectorXd& u, const VectorXd& r) {
  if (u.size() == 1) return VectorXd::Constant(1, r[0] / u[0]);
  const int m = static_cast<int>(u.size()) - 1;
  const double d = jdet(u);
  const auto ub = u.tail(m);
  const auto rb = r.tail(m);
  VectorXd y(u.size());
  y[0] = (u[0] * r[0] - ub.dot(rb)) / d;
  y.tail(m) = (rb - y[0] * ub) / u[0];
  return y;
}

// Largest step with s + alpha*ds staying in the cone (s strictly interior).
double max_cone_step(const VectorXd& s, const VectorXd& ds) {
  if (s.size() == 1) {
    if (ds[0] >= 0.0) return kInf;
    return -s[0] / ds[0];
  }
  const int m = static_cast<int>(s.size()) - 1;
  const double a = ds[0] * ds[0] - ds.tail(m).squaredNorm();
  const double b = 2.0 * (s[0] * ds[0] - s.tail(m).dot(ds.tail(m)));
  const double c = jdet(s);
  if (std::abs(a) < 1e-300) {
    if (b >= 0.0) return kInf;
    return -c / b;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return (a > 0.0) ? kInf : 1e-12;
  const double sq = std::sqrt(disc);
  double r1 = (-b - sq) / (2.0 * a);
  double r2 = (-b + sq) / (2.0 * a);
  if (r1 > r2) std::swap(r1, r2);
  if (a > 0.0) {
    if (r1 > 0.0) return r1;
    return kInf;  // both roots nonpositive
  }
  return std::max(r2, 0.0);  // opens downward, exit at upper root
}

// ---------------------------------------------------------------------------
// Internal standard-form cone data: each block of s = Ax + c lies in the
// standard SOC (dim-1 blocks in R+). Original cones are rescaled by
// T = diag(1, mu I); degenerate mu = 0 cones keep only their first row.

struct StdCone {
  MatrixXd A;
  VectorXd c;
  int orig_index;
  int orig_dim;
  double mu;
};

struct StdForm {
  std::vector<StdCone> cones;
  int total_rows = 0;
};

StdForm to_standard(const ConicProgram& prog) {
  StdForm sf;
  for (size_t i = 0; i < prog.cones.size(); ++i) {
    const ConeConstraint& k = prog.cones[i];
    StdCone sc;
    sc.orig_index = static_cast<int>(i);
    sc.orig_dim = k.dim();
    sc.mu = k.mu;
    if (k.dim() == 1 || k.mu == 0.0) {
      sc.A = k.A.row(0);
      sc.c = k.c.head(1);
    } else {
      sc.A = k.A;
      sc.c = k.c;
      sc.A.bottomRows(k.dim() - 1) *= k.mu;
      sc.c.tail(k.dim() - 1) *= k.mu;
    }
    sf.total_rows += static_cast<int>(sc.A.rows());
    sf.cones.push_back(std::move(sc));
  }
  return sf;
}

// Maps a standard-form dual block back to the original cone: z -> T z,
// padding dropped tangential rows with zeros.
VectorXd dual_to_original(const StdCone& sc, const VectorXd& z) {
  VectorXd out = VectorXd::Zero(sc.orig_dim);
  out[0] = z[0];
  if (sc.orig_dim >= 2 && sc.mu > 0.0) out.tail(sc.orig_dim - 1) = sc.mu * z.tail(sc.orig_dim - 1);
  return out;
}

// Nullspace reduction of E x = f. x = x_p + N y.
struct EqReduction {
  VectorXd x_particular;
  MatrixXd nullspace;  // n x (n - rank)
  bool feasible = true;
};

EqReduction reduce_equalities(const MatrixXd& E, const VectorXd& f, int n) {
  EqReduction red;
  if (E.rows() == 0) {
    red.x_particular = VectorXd::Zero(n);
    red.nullspace = MatrixXd::Identity(n, n);
    return red;
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(E.transpose());
  const int rank = static_cast<int>(qr.rank());
  MatrixXd Q = qr.householderQ() * MatrixXd::Identity(n, n);
  red.nullspace = Q.rightCols(n - rank);
  // Min-norm particular solution via the same factorization.
  Eigen::ColPivHouseholderQR<MatrixXd> qr2(E);
  red.x_particular = qr2.solve(f);
  if ((E * red.x_particular - f).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + f.cwiseAbs().maxCoeff()))
    red.feasible = false;
  return red;
}

MatrixXd stack_cone_rows(const std::vector<StdCone>& cones, int n) {
  int rows = 0;
  for (const auto& k : cones) rows += static_cast<int>(k.A.rows());
  MatrixXd A(rows, n);
  int at = 0;
  for (const auto& k : cones) {
    A.middleRows(at, k.A.rows()) = k.A;
    at += static_cast<int>(k.A.rows());
  }
  return A;
}

}  // namespace

// ---------------------------------------------------------------------------

ConicSolution solve_socp(const ConicProgram& prog, const SocpOptions& opts) {
  prog.validate();
  const int n_full = prog.num_vars();

  EqReduction red = reduce_equalities(prog.E, prog.f, n_full);
  ConicSolution sol;
  if (!red.feasible) {
    sol.status = SolveStatus::kInfeasible;
    return sol;
  }
  const int n = static_cast<int>(red.nullspace.cols());

  StdForm sf = to_standard(prog);
  std::vector<StdCone> cones = sf.cones;
  for (StdCone& k : cones) {
    k.c = k.c + k.A * red.x_particular;
    k.A = k.A * red.nullspace;
  }
  const MatrixXd P = red.nullspace.transpose() * prog.P * red.nullspace;
  const VectorXd b = red.nullspace.transpose() * (prog.P * red.x_particular + prog.b);

  auto finish = [&](ConicSolution s, const VectorXd& y,
                    const std::vector<VectorXd>& zstd) -> ConicSolution {
    s.x = red.x_particular + red.nullspace * y;
    s.cone_duals.assign(prog.cones.size(), VectorXd());
    for (size_t i = 0; i < cones.size(); ++i)
      s.cone_duals[cones[i].orig_index] = dual_to_original(cones[i], zstd[i]);
    return s;
  };

  const int m = static_cast<int>(cones.size());
  if (m == 0) {
    // Equality-constrained QP; a single regularized solve.
    Eigen::LDLT<MatrixXd> ldlt(P + 1e-12 * MatrixXd::Identity(n, n));
    VectorXd y = ldlt.solve(-b);
    sol.status = SolveStatus::kOptimal;
    sol.iterations = 1;
    return finish(sol, y, {});
  }

  if (n == 0) {
    // Fully determined by equalities; just check feasibility.
    sol.status = SolveStatus::kOptimal;
    std::vector<VectorXd> zstd;
    for (const StdCone& k : cones) {
      if (cone_margin(k.c) < -1e-9) sol.status = SolveStatus::kInfeasible;
      zstd.push_back(VectorXd::Zero(k.c.size()));
    }
    return finish(sol, VectorXd::Zero(0), zstd);
  }

  const MatrixXd A = stack_cone_rows(cones, n);
  VectorXd c(A.rows());
  {
    int at = 0;
    for (const auto& k : cones) {
      c.segment(at, k.c.size()) = k.c;
      at += static_cast<int>(k.c.size());
    }
  }
  std::vector<int> offsets(m), dims(m);
  {
    int at = 0;
    for (int i = 0; i < m; ++i) {
      offsets[i] = at;
      dims[i] = static_cast<int>(cones[i].A.rows());
      at += dims[i];
    }
  }

  // Infeasible start: x = 0, blocks of s and z on the cone axis.
  VectorXd y = VectorXd::Zero(n);
  VectorXd s(A.rows()), z(A.rows());
  const double s_scale = std::max(1.0, c.size() ? c.cwiseAbs().maxCoeff() : 1.0);
  for (int i = 0; i < m; ++i) {
    s.segment(offsets[i], dims[i]) = s_scale * jidentity(dims[i]);
    z.segment(offsets[i], dims[i]) = jidentity(dims[i]);
  }

  const double bnorm = 1.0 + b.cwiseAbs().maxCoeff();
  const double cnorm = 1.0 + c.cwiseAbs().maxCoeff();
  const double obj_shift = (prog.P * red.x_particular + prog.b).dot(red.x_particular) * 0.5;

  std::ofstream trace;
  if (!opts.trace_csv.empty()) {
    trace.open(opts.trace_csv);
    trace << "# schema=v1\niter,gap,primal_residual,dual_residual\n";
  }

  auto block = [&](VectorXd& v, int i) { return v.segment(offsets[i], dims[i]); };
  auto cblock = [&](const VectorXd& v, int i) { return v.segment(offsets[i], dims[i]); };

  sol.status = SolveStatus::kMaxIterations;
  int iter = 0;
  for (iter = 0; iter < opts.max_iterations; ++iter) {
    const VectorXd rd = P * y + b - A.transpose() * z;
    const VectorXd rp = A * y + c - s;
    const double gap = s.dot(z);
    const double obj = 0.5 * y.dot(P * y) + b.dot(y) + obj_shift;

    const double pres = rp.cwiseAbs().maxCoeff() / cnorm;
    const double dres = rd.cwiseAbs().maxCoeff() / bnorm;

    if (trace.is_open()) {
      char line[128];
      std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g\n", iter, gap, pres, dres);
      trace << line;
    }

    if (pres <= std::max(opts.feas_tol, 1e-12) && dres <= std::max(opts.feas_tol, 1e-12) &&
        gap <= opts.tol * std::max(1.0, std::abs(obj))) {
      sol.status = SolveStatus::kOptimal;
      break;
    }

    // Farkas certificate for primal infeasibility: z in K*, A'z ~ 0, c'z < 0.
    {
      const double zn = z.cwiseAbs().maxCoeff();
      if (zn > 1e4) {
        const VectorXd zh = z / zn;
        if ((A.transpose() * zh).cwiseAbs().maxCoeff() <= 1e-8 &&
            c.dot(zh) < -1e-8) {
          sol.status = SolveStatus::kInfeasible;
          break;
        }
      }
    }

    // Nesterov-Todd scaling per cone.
    std::vector<VectorXd> w_half(m), w_half_inv(m), lambda(m);
    bool scaling_ok = true;
    for (int i = 0; i < m; ++i) {
      const VectorXd si = cblock(s, i), zi = cblock(z, i);
      if (cone_margin(si) <= 0.0 || cone_margin(zi) <= 0.0) {
        scaling_ok = false;
        break;
      }
      const VectorXd s_sqrt = jpow(si, 0.5);
      const VectorXd inner = quad_rep(s_sqrt, zi);
      const VectorXd w = quad_rep(s_sqrt, jpow(inner, -0.5));
      w_half[i] = jpow(w, 0.5);
      w_half_inv[i] = jpow(w, -0.5);
      lambda[i] = quad_rep(w_half[i], zi);
    }
    if (!scaling_ok) {
      sol.status = SolveStatus::kNumericalFailure;
      break;
    }

    // Schur complement M = P + A' W^-2 A, with W^-2 v = Q_{w^-1} v applied
    // per cone. Assemble via scaled copies of the cone rows.
    MatrixXd Aw(A.rows(), n);
    for (int i = 0; i < m; ++i) {
      for (int col = 0; col < n; ++col) {
        Aw.col(col).segment(offsets[i], dims[i]) =
            quad_rep(w_half_inv[i], A.col(col).segment(offsets[i], dims[i]));
      }
    }
    MatrixXd M = P + Aw.transpose() * Aw;
    Eigen::LLT<MatrixXd> llt(M);
    if (llt.info() != Eigen::Success) {
      M += 1e-10 * MatrixXd::Identity(n, n);
      llt.compute(M);
      if (llt.info() != Eigen::Success) {
        sol.status = SolveStatus::kNumericalFailure;
        break;
      }
    }

    const double mu_bar = gap / m;

    // g blocks -> directions; shared by predictor and corrector.
    auto solve_direction = [&](const std::vector<VectorXd>& g, VectorXd* dy, VectorXd* ds,
                               VectorXd* dz) {
      VectorXd rhs = -rd;
      VectorXd wg(A.rows()), w2rp(A.rows());
      for (int i = 0; i < m; ++i) {
        wg.segment(offsets[i], dims[i]) = quad_rep(w_half[i], g[i]);
        w2rp.segment(offsets[i], dims[i]) =
            quad_rep(w_half_inv[i], quad_rep(w_half_inv[i], cblock(rp, i)));
      }
      // W^-1 g per cone.
      VectorXd winv_g(A.rows());
      for (int i = 0; i < m; ++i)
        winv_g.segment(offsets[i], dims[i]) = quad_rep(w_half_inv[i], g[i]);
      rhs += A.transpose() * (winv_g - w2rp);
      *dy = llt.solve(rhs);
      // One refinement pass on the Schur system.
      *dy += llt.solve(rhs - M * (*dy));
      *dz = VectorXd(A.rows());
      const VectorXd Ady = A * (*dy);
      for (int i = 0; i < m; ++i) {
        dz->segment(offsets[i], dims[i]) =
            winv_g.segment(offsets[i], dims[i]) - w2rp.segment(offsets[i], dims[i]) -
            quad_rep(w_half_inv[i], quad_rep(w_half_inv[i], cblock(Ady, i)));
      }
      *ds = Ady + rp;
    };

    auto max_step_all = [&](const VectorXd& v, const VectorXd& dv) {
      double a = kInf;
      for (int i = 0; i < m; ++i)
        a = std::min(a, max_cone_step(cblock(v, i), cblock(dv, i)));
      return a;
    };

    // Predictor (affine) direction: g = -lambda.
    std::vector<VectorXd> g_aff(m);
    for (int i = 0; i < m; ++i) g_aff[i] = -lambda[i];
    VectorXd dy_a, ds_a, dz_a;
    solve_direction(g_aff, &dy_a, &ds_a, &dz_a);

    const double ap = std::min(1.0, max_step_all(s, ds_a));
    const double ad = std::min(1.0, max_step_all(z, dz_a));
    const double gap_aff = (s + ap * ds_a).dot(z + ad * dz_a);
    double sigma = std::pow(std::max(0.0, gap_aff / gap), 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);

    // Corrector with Mehrotra second-order term.
    std::vector<VectorXd> g(m);
    for (int i = 0; i < m; ++i) {
      const VectorXd eta = jproduct(quad_rep(w_half_inv[i], cblock(ds_a, i)),
                                    quad_rep(w_half[i], cblock(dz_a, i)));
      const VectorXd rhs_c =
          sigma * mu_bar * jidentity(dims[i]) - jproduct(lambda[i], lambda[i]) - eta;
      g[i] = arrow_solve(lambda[i], rhs_c);
    }
    VectorXd dy, ds, dz;
    solve_direction(g, &dy, &ds, &dz);

    double alpha = std::min({1.0, 0.99 * max_step_all(s, ds), 0.99 * max_step_all(z, dz)});
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      sol.status = SolveStatus::kNumericalFailure;
      break;
    }
    y += alpha * dy;
    s += alpha * ds;
    z += alpha * dz;
  }

  sol.iterations = iter;
  sol.comp_residual = s.dot(z);
  std::vector<VectorXd> zstd(m);
  for (int i = 0; i < m; ++i) zstd[i] = z.segment(offsets[i], dims[i]);
  return finish(sol, y, zstd);
}

// ---------------------------------------------------------------------------

namespace {

struct BarrierCone {
  MatrixXd A;  // rows in original (unscaled) form; mu == 0 keeps row 0 only
  VectorXd c;
  double mu;
  int orig_index;
  int orig_dim;
};

// Value, dual and Hessian contribution of -(1/kappa) log-barrier at slack nu.
struct BarrierEval {
  double value;
  VectorXd dual;    // lambda(nu) on the central path
  MatrixXd d2;      // Hessian of the barrier term w.r.t. nu (times 1/kappa)
  double margin;    // > 0 iff strictly interior
};

BarrierEval eval_barrier(const VectorXd& nu, double mu, double kappa) {
  BarrierEval out;
  const int d = static_cast<int>(nu.size());
  if (d == 1) {
    out.margin = nu[0];
    if (nu[0] <= 0.0) {
      out.value = kInf;
      return out;
    }
    out.value = -std::log(nu[0]) / kappa;
    out.dual = VectorXd::Constant(1, 1.0 / (kappa * nu[0]));
    out.d2 = MatrixXd::Constant(1, 1, 1.0 / (kappa * nu[0] * nu[0]));
    return out;
  }
  const int t = d - 1;
  const double n0 = nu[0];
  const VectorXd nt = nu.tail(t);
  const double D = n0 * n0 / (mu * mu) - nt.squaredNorm();
  out.margin = std::min(n0, D);
  if (n0 <= 0.0 || D <= 0.0) {
    out.value = kInf;
    return out;
  }
  out.value = -std::log(D) / kappa;
  VectorXd gD(d);
  gD[0] = 2.0 * n0 / (mu * mu);
  gD.tail(t) = -2.0 * nt;
  out.dual = VectorXd(d);
  out.dual[0] = (2.0 / (kappa * D)) * (n0 / (mu * mu));
  out.dual.tail(t) = -(2.0 / (kappa * D)) * nt;
  MatrixXd hD = MatrixXd::Zero(d, d);
  hD(0, 0) = 2.0 / (mu * mu);
  hD.bottomRightCorner(t, t) = -2.0 * MatrixXd::Identity(t, t);
  out.d2 = (gD * gD.transpose()) / (kappa * D * D) - hD / (kappa * D);
  return out;
}

}  // namespace

BarrierResult solve_barrier_newton(const ConicProgram& prog, double kappa, const VectorXd& x0,
                                   const BarrierOptions& opts) {
  prog.validate();
  if (kappa <= 0.0) throw Error("bad-input", "kappa must be positive");
  const int n_full = prog.num_vars();
  if (x0.size() != n_full) throw Error("bad-input", "x0 size mismatch");

  EqReduction red = reduce_equalities(prog.E, prog.f, n_full);
  if (!red.feasible) throw Error("infeasible-start", "equality constraints inconsistent");

  std::vector<BarrierCone> cones;
  for (size_t i = 0; i < prog.cones.size(); ++i) {
    const ConeConstraint& k = prog.cones[i];
    BarrierCone bc;
    bc.orig_index = static_cast<int>(i);
    bc.orig_dim = k.dim();
    bc.mu = k.mu;
    if (k.dim() == 1 || k.mu == 0.0) {
      bc.A = k.A.row(0);
      bc.c = k.c.head(1);
      bc.mu = 0.0;
    } else {
      bc.A = k.A;
      bc.c = k.c;
    }
    bc.A = bc.A * red.nullspace;  // reduced coordinates
    cones.push_back(std::move(bc));
  }
  // Shift the offset by the particular solution.
  std::vector<VectorXd> c_shift(cones.size());
  for (size_t i = 0; i < cones.size(); ++i) {
    const ConeConstraint& k = prog.cones[cones[i].orig_index];
    const MatrixXd A_orig = (k.dim() == 1 || k.mu == 0.0) ? MatrixXd(k.A.row(0)) : k.A;
    c_shift[i] = cones[i].c + A_orig * red.x_particular;
  }

  const MatrixXd P = red.nullspace.transpose() * prog.P * red.nullspace;
  const VectorXd b = red.nullspace.transpose() * (prog.P * red.x_particular + prog.b);
  const int n = static_cast<int>(red.nullspace.cols());

  // Express x0 in reduced coordinates (assumes x0 satisfies equalities).
  VectorXd y = red.nullspace.transpose() * (x0 - red.x_particular);

  auto slack_of = [&](size_t i, const VectorXd& yy) -> VectorXd {
    return cones[i].A * yy + c_shift[i];
  };

  auto total_value = [&](const VectorXd& yy) -> double {
    double v = 0.5 * yy.dot(P * yy) + b.dot(yy);
    for (size_t i = 0; i < cones.size(); ++i) {
      const BarrierEval ev = eval_barrier(slack_of(i, yy), cones[i].mu == 0.0 ? 1.0 : cones[i].mu,
                                          kappa);
      if (!std::isfinite(ev.value)) return kInf;
      v += ev.value;
    }
    return v;
  };

  for (size_t i = 0; i < cones.size(); ++i) {
    const VectorXd nu = slack_of(i, y);
    const double m = (cones[i].mu == 0.0 || nu.size() == 1)
                         ? nu[0]
                         : (nu[0] - cones[i].mu * nu.tail(nu.size() - 1).norm());
    if (m <= 0.0) throw Error("infeasible-start", "x0 not strictly interior");
  }

  const double grad_tol = opts.tol * (1.0 + prog.b.cwiseAbs().maxCoeff());
  BarrierResult result;
  int iter = 0;
  MatrixXd H;
  for (iter = 0; iter < opts.max_iterations; ++iter) {
    VectorXd grad = P * y + b;
    H = P;
    for (size_t i = 0; i < cones.size(); ++i) {
      const double mu_i = (cones[i].mu == 0.0) ? 1.0 : cones[i].mu;
      const BarrierEval ev = eval_barrier(slack_of(i, y), mu_i, kappa);
      grad -= cones[i].A.transpose() * ev.dual;
      H += cones[i].A.transpose() * ev.d2 * cones[i].A;
    }
    if (grad.cwiseAbs().maxCoeff() <= grad_tol) break;

    Eigen::LLT<MatrixXd> llt(H);
    if (llt.info() != Eigen::Success) {
      llt.compute(H + 1e-10 * MatrixXd::Identity(n, n));
      if (llt.info() != Eigen::Success)
        throw Error("numerical-failure", "barrier Hessian factorization failed");
    }
    VectorXd step = llt.solve(-grad);
    step += llt.solve(-grad - H * step);

    // Fraction-to-boundary, then backtracking on the value.
    double alpha = 1.0;
    for (size_t i = 0; i < cones.size(); ++i) {
      const VectorXd nu = slack_of(i, y);
      const VectorXd dnu = cones[i].A * step;
      VectorXd nu_std = nu, dnu_std = dnu;
      if (nu.size() >= 2) {
        const double mu_i = cones[i].mu;
        nu_std.tail(nu.size() - 1) *= mu_i;
        dnu_std.tail(nu.size() - 1) *= mu_i;
      }
      alpha = std::min(alpha, 0.99 * max_cone_step(nu_std, dnu_std));
    }
    const double f0 = total_value(y);
    const double slope = grad.dot(step);
    int bt = 0;
    while (bt < 60 && total_value(y + alpha * step) > f0 + 1e-4 * alpha * slope) {
      alpha *= 0.5;
      ++bt;
    }
    if (bt >= 60) throw Error("numerical-failure", "barrier line search failed");
    y += alpha * step;
  }
  if (iter >= opts.max_iterations)
    throw Error("numerical-failure", "barrier Newton did not converge");

  result.iterations = iter;
  result.x = red.x_particular + red.nullspace * y;
  // Report the Hessian in reduced coordinates when equalities are present;
  // dynamics problems have none, so this is the full-space Hessian.
  result.hessian = H;
  result.slacks.assign(prog.cones.size(), VectorXd());
  result.duals.assign(prog.cones.size(), VectorXd());
  for (size_t i = 0; i < cones.size(); ++i) {
    const double mu_i = (cones[i].mu == 0.0) ? 1.0 : cones[i].mu;
    const VectorXd nu = slack_of(i, y);
    const BarrierEval ev = eval_barrier(nu, mu_i, kappa);
    VectorXd nu_full = VectorXd::Zero(cones[i].orig_dim);
    VectorXd lam_full = VectorXd::Zero(cones[i].orig_dim);
    nu_full.head(nu.size()) = nu;
    lam_full.head(nu.size()) = ev.dual;
    if (cones[i].orig_dim >= 2 && prog.cones[cones[i].orig_index].mu == 0.0) {
      // Degenerate cone: tangential slack still well defined through A.
      const ConeConstraint& k = prog.cones[cones[i].orig_index];
      nu_full = k.A * result.x + k.c;
      lam_full.tail(cones[i].orig_dim - 1).setZero();
    }
    result.slacks[cones[i].orig_index] = nu_full;
    result.duals[cones[i].orig_index] = lam_full;
  }
  return result;
}

VectorXd central_path_dual(const VectorXd& nu, double mu, double kappa) {
  const double mu_eff = (nu.size() == 1 || mu == 0.0) ? 1.0 : mu;
  if (nu.size() >= 2 && mu == 0.0) {
    VectorXd lam = VectorXd::Zero(nu.size());
    lam[0] = 1.0 / (kappa * nu[0]);
    return lam;
  }
  return eval_barrier(nu, mu_eff, kappa).dual;
}

MatrixXd central_path_dual_jacobian(const VectorXd& nu, double mu, double kappa) {
  const int d = static_cast<int>(nu.size());
  if (d >= 2 && mu == 0.0) {
    MatrixXd S = MatrixXd::Zero(d, d);
    S(0, 0) = -1.0 / (kappa * nu[0] * nu[0]);
    return S;
  }
  const double mu_eff = (d == 1) ? 1.0 : mu;
  // lambda = -grad(barrier term), so d lambda / d nu = -(barrier Hessian).
  return -eval_barrier(nu, mu_eff, kappa).d2;
}

double chebyshev_radius(const std::vector<std::pair<VectorXd, double>>& halfspaces) {
  if (halfspaces.empty()) throw Error("bad-input", "chebyshev_radius: empty halfspace set");
  double r = kInf;
  for (const auto& [a, bb] : halfspaces) {
    const double an = a.norm();
    if (an <= 0.0) throw Error("bad-input", "chebyshev_radius: zero normal");
    r = std::min(r, -bb / an);
  }
  return std::max(r, 0.0);
}

}  // namespace ctr
