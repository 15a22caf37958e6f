#include "ctr/trust_region.hpp"

#include <cmath>

namespace ctr {

const char* to_string(TrustRegionVariant v) {
  switch (v) {
    case TrustRegionVariant::kEtr:
      return "etr";
    case TrustRegionVariant::kCtr:
      return "ctr";
    case TrustRegionVariant::kActr:
      return "a-ctr";
    case TrustRegionVariant::kRctr:
      return "r-ctr";
    case TrustRegionVariant::kRactr:
      return "ra-ctr";
  }
  return "unknown";
}

TrustRegionVariant trust_region_variant_from_string(const std::string& s) {
  if (s == "etr") return TrustRegionVariant::kEtr;
  if (s == "ctr") return TrustRegionVariant::kCtr;
  if (s == "a-ctr" || s == "actr") return TrustRegionVariant::kActr;
  if (s == "r-ctr" || s == "rctr") return TrustRegionVariant::kRctr;
  if (s == "ra-ctr" || s == "ractr") return TrustRegionVariant::kRactr;
  throw Error("bad-input", "unknown trust region variant: " + s);
}

bool is_action_only(TrustRegionVariant v) {
  return v == TrustRegionVariant::kActr || v == TrustRegionVariant::kRactr;
}

TrustRegionConstraints build_trust_region(const TrustRegionSpec& spec,
                                          const LinearizedDynamics& lin,
                                          const SystemModel& sys) {
  TrustRegionConstraints cs;
  cs.variant = spec.variant;
  cs.lin = lin;
  const int nq = lin.nq();
  const int na = static_cast<int>(lin.B.cols());
  const bool action_only = is_action_only(spec.variant);
  cs.dim_q = action_only ? 0 : nq;
  cs.dim_u = na;
  const int dz = cs.dim();

  const bool with_primal =
      spec.variant == TrustRegionVariant::kCtr || spec.variant == TrustRegionVariant::kActr;
  const bool with_dual = spec.variant != TrustRegionVariant::kEtr;

  if (!action_only && with_dual && !lin.has_A)
    throw Error("bad-input", "full-state trust region requires linearize_q");

  if (spec.sigma.size() > 0) {
    if (spec.sigma.rows() != dz) throw Error("bad-input", "trust region sigma size mismatch");
    cs.sigma = spec.sigma;
  } else {
    cs.sigma = MatrixXd::Identity(dz, dz) / (spec.radius * spec.radius);
  }

  // dz -> q_hat offset map, [A B] or just [B].
  MatrixXd map_q(nq, dz);
  if (action_only) {
    map_q = lin.B;
  } else {
    map_q.leftCols(nq) = lin.has_A ? lin.A : MatrixXd::Zero(nq, nq);
    map_q.rightCols(na) = lin.B;
  }

  for (size_t i = 0; i < lin.contacts.size(); ++i) {
    const ContactKinematics& ck = lin.contacts[i];
    if (with_primal) {
      // J_i q_hat + c_i in K_i, J_i and c_i frozen at the nominal.
      ConeConstraint cone;
      cone.A = ck.J * map_q;
      cone.c = ck.J * lin.f_nominal + ck.c_offset;
      cone.mu = (ck.d == 1) ? 0.0 : ck.mu;
      cs.primal_cones.push_back(std::move(cone));
    }
    if (with_dual) {
      ConeConstraint cone;
      cone.A = MatrixXd::Zero(ck.d, dz);
      if (action_only) {
        cone.A = lin.D[i];
      } else {
        cone.A.leftCols(nq) = lin.C[i];
        cone.A.rightCols(na) = lin.D[i];
      }
      cone.c = lin.lambda_nominal[i];
      cone.mu = (ck.d == 1) ? 0.0 : 1.0 / ck.mu;  // dual cone K*
      const double margin =
          (ck.d == 1) ? cone.c[0] : ck.mu * cone.c[0] - cone.c.tail(ck.d - 1).norm();
      if (margin <= 1e-12) cs.boundary_warning = true;
      cs.dual_cones.push_back(std::move(cone));
    }
  }

  const int u_off = cs.dim_q;
  auto push_row = [&](const Eigen::RowVectorXd& a, double c0) {
    ConeConstraint row;
    row.A = a;
    row.c = VectorXd::Constant(1, c0);
    row.mu = 0.0;
    cs.limit_rows.push_back(std::move(row));
  };

  // Position command box: q_lb <= u_nominal + du <= q_ub.
  if (spec.q_lb_a) {
    for (int k = 0; k < na; ++k) {
      Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(dz);
      a(u_off + k) = 1.0;
      push_row(a, lin.u_nominal[k] - (*spec.q_lb_a)[k]);
    }
  }
  if (spec.q_ub_a) {
    for (int k = 0; k < na; ++k) {
      Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(dz);
      a(u_off + k) = -1.0;
      push_row(a, (*spec.q_ub_a)[k] - lin.u_nominal[k]);
    }
  }

  // Steady-state torque box: tau = K_a (q_hat_a - (u_nominal + du)).
  if (spec.tau_lb || spec.tau_ub) {
    MatrixXd tau_map = MatrixXd::Zero(na, dz);
    VectorXd tau_off(na);
    for (int k = 0; k < na; ++k) {
      const int row = sys.actuated_idx[k];
      tau_map.row(k) = sys.k_a[k] * map_q.row(row);
      tau_map(k, u_off + k) -= sys.k_a[k];
      tau_off[k] = sys.k_a[k] * (lin.f_nominal[row] - lin.u_nominal[k]);
    }
    for (int k = 0; k < na; ++k) {
      if (spec.tau_lb) push_row(tau_map.row(k), tau_off[k] - (*spec.tau_lb)[k]);
      if (spec.tau_ub) push_row(-tau_map.row(k), (*spec.tau_ub)[k] - tau_off[k]);
    }
  }

  return cs;
}

namespace {

bool cone_holds(const ConeConstraint& cone, const VectorXd& dz, double tol) {
  const VectorXd v = cone.A * dz + cone.c;
  if (cone.dim() == 1 || cone.mu == 0.0) return v[0] >= -tol;
  return v[0] >= cone.mu * v.tail(v.size() - 1).norm() - tol;
}

}  // namespace

bool contains(const TrustRegionConstraints& cs, const VectorXd& dz, double tol) {
  if (dz.size() != cs.dim()) throw Error("bad-input", "contains: dz dimension mismatch");
  if (dz.dot(cs.sigma * dz) > 1.0 + tol) return false;
  for (const auto& cone : cs.primal_cones)
    if (!cone_holds(cone, dz, tol)) return false;
  for (const auto& cone : cs.dual_cones)
    if (!cone_holds(cone, dz, tol)) return false;
  for (const auto& cone : cs.limit_rows)
    if (!cone_holds(cone, dz, tol)) return false;
  return true;
}

TrustRegionSamples sample_trust_region(const TrustRegionConstraints& cs, int n, uint64_t seed) {
  if (n < 1) throw Error("bad-input", "sample_trust_region: n must be >= 1");
  const int dz = cs.dim();
  Eigen::LLT<MatrixXd> llt(cs.sigma);
  if (llt.info() != Eigen::Success) throw Error("bad-input", "trust region sigma must be SPD");
  const MatrixXd L = llt.matrixL();
  const MatrixXd Lt_inv = L.transpose().triangularView<Eigen::Upper>().solve(
      MatrixXd::Identity(dz, dz));

  Rng rng(seed);
  TrustRegionSamples out;
  long long proposals = 0;
  while (static_cast<int>(out.samples.size()) < n) {
    VectorXd g = rng.gaussian_vector(dz);
    const double norm = g.norm();
    if (norm < 1e-12) continue;
    const double radius = std::pow(rng.uniform(), 1.0 / dz);
    const VectorXd dz_sample = Lt_inv * (g * (radius / norm));
    ++proposals;
    if (contains(cs, dz_sample)) out.samples.push_back(dz_sample);
    if (proposals >= 100000 &&
        static_cast<double>(out.samples.size()) / static_cast<double>(proposals) < 1e-3) {
      throw Error("degenerate-region", "trust region acceptance rate below 1e-3");
    }
  }
  out.acceptance_rate = static_cast<double>(out.samples.size()) / static_cast<double>(proposals);
  return out;
}

std::vector<VectorXd> motion_set_samples(const LinearizedDynamics& lin,
                                         const std::vector<VectorXd>& dz_samples,
                                         const SystemModel& sys, bool object_rows_only) {
  const int nq = lin.nq();
  const int na = static_cast<int>(lin.B.cols());
  std::vector<VectorXd> out;
  out.reserve(dz_samples.size());
  for (const VectorXd& dz : dz_samples) {
    VectorXd q_hat;
    if (dz.size() == na) {
      q_hat = lin.f_nominal + lin.B * dz;
    } else if (dz.size() == nq + na) {
      q_hat = lin.f_nominal + lin.A * dz.head(nq) + lin.B * dz.tail(na);
    } else {
      throw Error("bad-input", "motion_set_samples: sample dimension mismatch");
    }
    out.push_back(object_rows_only ? sys.object_part(q_hat) : q_hat);
  }
  return out;
}

WrenchSamples wrench_set_samples(const SystemModel& sys, const LinearizedDynamics& lin,
                                 const std::vector<VectorXd>& du_samples) {
  WrenchSamples out;
  std::vector<MatrixXd> j_obj;
  for (const ContactKinematics& ck : lin.contacts) {
    MatrixXd jo(ck.d, sys.n_qo);
    for (int c = 0; c < sys.n_qo; ++c) jo.col(c) = ck.J.col(sys.unactuated_idx[c]);
    j_obj.push_back(std::move(jo));
  }
  for (const VectorXd& du : du_samples) {
    std::vector<VectorXd> forces, wrenches;
    VectorXd total = sys.tau_o;
    for (size_t i = 0; i < lin.contacts.size(); ++i) {
      VectorXd lam = lin.lambda_nominal[i] + lin.D[i] * du;
      VectorXd w = j_obj[i].transpose() * lam;
      total += w;
      forces.push_back(std::move(lam));
      wrenches.push_back(std::move(w));
    }
    out.contact_forces.push_back(std::move(forces));
    out.contact_wrenches.push_back(std::move(wrenches));
    out.total_wrenches.push_back(std::move(total));
  }
  return out;
}

std::vector<VectorXd> motion_set_from_wrench(const SystemModel& sys, const VectorXd& q_o_nominal,
                                             const std::vector<VectorXd>& wrenches) {
  const MatrixXd gain = (sys.h * sys.h / sys.epsilon) *
                        sys.mass_o.llt().solve(MatrixXd::Identity(sys.n_qo, sys.n_qo));
  std::vector<VectorXd> out;
  out.reserve(wrenches.size());
  for (const VectorXd& w : wrenches) out.push_back(q_o_nominal + gain * w);
  return out;
}

}  // namespace ctr
