#include "ctr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ctr {

namespace {

// Signed distance of a point to an origin-centered box, plus outward gradient.
// Ties on the interior nearest-face pick x before y.
double sd_box_point(const Vector2d& p, const Vector2d& half, Vector2d* grad) {
  const Vector2d d(std::abs(p.x()) - half.x(), std::abs(p.y()) - half.y());
  if (d.x() > 0.0 || d.y() > 0.0) {
    const Vector2d outside(std::max(d.x(), 0.0), std::max(d.y(), 0.0));
    const double dist = outside.norm();
    Vector2d g = outside / dist;
    g.x() *= (p.x() >= 0.0) ? 1.0 : -1.0;
    g.y() *= (p.y() >= 0.0) ? 1.0 : -1.0;
    *grad = g;
    return dist;
  }
  // Inside: nearest face.
  if (d.x() >= d.y()) {
    *grad = Vector2d((p.x() >= 0.0) ? 1.0 : -1.0, 0.0);
    return d.x();
  }
  *grad = Vector2d(0.0, (p.y() >= 0.0) ? 1.0 : -1.0);
  return d.y();
}

SdResult circle_circle(const Vector2d& ca, double ra, const Vector2d& cb, double rb) {
  SdResult out;
  Vector2d delta = ca - cb;
  const double dist = delta.norm();
  out.normal = (dist > 1e-12) ? Vector2d(delta / dist) : Vector2d(1.0, 0.0);
  out.phi = dist - ra - rb;
  out.witness_a = ca - ra * out.normal;
  out.witness_b = cb + rb * out.normal;
  return out;
}

// Circle A vs box B.
SdResult circle_box(const Vector2d& ca, double ra, const Pose2& pb, const Vector2d& half) {
  SdResult out;
  const Vector2d local = pb.to_local(ca);
  Vector2d grad_local;
  const double sd = sd_box_point(local, half, &grad_local);
  out.normal = pb.rotate(grad_local);
  out.phi = sd - ra;
  out.witness_b = pb.apply(local - sd * grad_local);
  out.witness_a = ca - ra * out.normal;
  return out;
}

// Circle A vs half-plane B (solid {p : n.p <= offset}).
SdResult circle_halfplane(const Vector2d& ca, double ra, const Vector2d& n, double offset) {
  SdResult out;
  out.normal = n;
  const double sd = n.dot(ca) - offset;
  out.phi = sd - ra;
  out.witness_b = ca - sd * n;
  out.witness_a = ca - ra * n;
  return out;
}

std::array<Vector2d, 4> box_corners(const Pose2& pose, const Vector2d& half) {
  return {pose.apply(Vector2d(-half.x(), -half.y())), pose.apply(Vector2d(half.x(), -half.y())),
          pose.apply(Vector2d(half.x(), half.y())), pose.apply(Vector2d(-half.x(), half.y()))};
}

// Box A vs half-plane B: deepest corner, ties by corner index.
SdResult box_halfplane(const Pose2& pa, const Vector2d& half, const Vector2d& n, double offset) {
  SdResult out;
  out.normal = n;
  double best = std::numeric_limits<double>::infinity();
  Vector2d best_corner(0, 0);
  for (const Vector2d& corner : box_corners(pa, half)) {
    const double sd = n.dot(corner) - offset;
    if (sd < best) {
      best = sd;
      best_corner = corner;
    }
  }
  out.phi = best;
  out.witness_a = best_corner;
  out.witness_b = best_corner - best * n;
  return out;
}

double point_segment_distance(const Vector2d& p, const Vector2d& a, const Vector2d& b,
                              Vector2d* closest) {
  const Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = (len2 > 1e-300) ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  *closest = a + t * ab;
  return (p - *closest).norm();
}

// Box A vs box B. Separation via vertex-edge distances (exact for convex
// polygons); penetration via SAT with a single deepest point, documented
// tie-breaks by axis then vertex index.
SdResult box_box(const Pose2& pa, const Vector2d& ha, const Pose2& pb, const Vector2d& hb) {
  const auto corners_a = box_corners(pa, ha);
  const auto corners_b = box_corners(pb, hb);

  // SAT overlap test on the 4 face axes.
  struct Axis {
    Vector2d n;  // world, oriented from B toward A
    double overlap;
  };
  double min_overlap = std::numeric_limits<double>::infinity();
  Vector2d min_axis(1, 0);
  bool separated = false;
  auto test_axes = [&](const Pose2& pose, const Vector2d& /*half*/) {
    for (int k = 0; k < 2; ++k) {
      Vector2d n = pose.rotate(k == 0 ? Vector2d(1, 0) : Vector2d(0, 1));
      double amin = std::numeric_limits<double>::infinity(), amax = -amin;
      double bmin = amin, bmax = amax;
      for (const auto& c : corners_a) {
        const double v = n.dot(c);
        amin = std::min(amin, v);
        amax = std::max(amax, v);
      }
      for (const auto& c : corners_b) {
        const double v = n.dot(c);
        bmin = std::min(bmin, v);
        bmax = std::max(bmax, v);
      }
      const double overlap = std::min(amax, bmax) - std::max(amin, bmin);
      if (overlap < 0.0) separated = true;
      if (overlap < min_overlap) {
        min_overlap = overlap;
        // Orient from B toward A by center projection.
        const double ca = 0.25 * (amin + amax) * 2.0;
        const double cb = 0.25 * (bmin + bmax) * 2.0;
        min_axis = (ca >= cb) ? n : Vector2d(-n);
      }
    }
  };
  test_axes(pa, ha);
  test_axes(pb, hb);

  SdResult out;
  if (separated) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        Vector2d cp;
        double d = point_segment_distance(corners_a[i], corners_b[j], corners_b[(j + 1) % 4], &cp);
        if (d < best) {
          best = d;
          out.witness_a = corners_a[i];
          out.witness_b = cp;
        }
        d = point_segment_distance(corners_b[i], corners_a[j], corners_a[(j + 1) % 4], &cp);
        if (d < best) {
          best = d;
          out.witness_a = cp;
          out.witness_b = corners_b[i];
        }
      }
    }
    out.phi = best;
    Vector2d delta = out.witness_a - out.witness_b;
    out.normal = (best > 1e-12) ? Vector2d(delta / best) : Vector2d(1.0, 0.0);
    return out;
  }

  // Penetrating: single deepest vertex of A along -axis (ties by index).
  out.normal = min_axis;
  out.phi = -min_overlap;
  double deepest = std::numeric_limits<double>::infinity();
  for (const auto& c : corners_a) {
    const double v = min_axis.dot(c);
    if (v < deepest) {
      deepest = v;
      out.witness_a = c;
    }
  }
  out.witness_b = out.witness_a - out.phi * min_axis;
  return out;
}

SdResult flip(SdResult r) {
  std::swap(r.witness_a, r.witness_b);
  r.normal = -r.normal;
  return r;
}

// Decomposes unions into members; min over member results, first wins ties.
std::vector<std::pair<Geom, Pose2>> expand(const Geom& g, const Pose2& pose) {
  if (g.kind != GeomKind::kBoxUnion) return {{g, pose}};
  std::vector<std::pair<Geom, Pose2>> parts;
  for (const BoxMember& m : g.members) {
    Geom box;
    box.kind = GeomKind::kBox;
    box.half = m.half;
    parts.push_back({box, pose.compose(m.local)});
  }
  return parts;
}

SdResult primitive_distance(const Geom& a, const Pose2& pa, const Geom& b, const Pose2& pb) {
  if (a.kind == GeomKind::kCircle) {
    const Vector2d ca = pa.p;
    switch (b.kind) {
      case GeomKind::kCircle:
        return circle_circle(ca, a.radius, pb.p, b.radius);
      case GeomKind::kBox:
        return circle_box(ca, a.radius, pb, b.half);
      case GeomKind::kHalfPlane: {
        const Vector2d n = pb.rotate(b.plane_normal);
        const double offset = n.dot(pb.p) + b.plane_offset;
        return circle_halfplane(ca, a.radius, n, offset);
      }
      default:
        break;
    }
  }
  if (a.kind == GeomKind::kBox) {
    switch (b.kind) {
      case GeomKind::kCircle:
        return flip(circle_box(pb.p, b.radius, pa, a.half));
      case GeomKind::kBox:
        return box_box(pa, a.half, pb, b.half);
      case GeomKind::kHalfPlane: {
        const Vector2d n = pb.rotate(b.plane_normal);
        const double offset = n.dot(pb.p) + b.plane_offset;
        return box_halfplane(pa, a.half, n, offset);
      }
      default:
        break;
    }
  }
  if (a.kind == GeomKind::kHalfPlane &&
      (b.kind == GeomKind::kCircle || b.kind == GeomKind::kBox)) {
    return flip(primitive_distance(b, pb, a, pa));
  }
  throw Error("unsupported-pair", "signed_distance: unsupported geometry pair");
}

}  // namespace

SdResult signed_distance(const Geom& a, const Pose2& pa, const Geom& b, const Pose2& pb) {
  const auto parts_a = expand(a, pa);
  const auto parts_b = expand(b, pb);
  SdResult best;
  bool first = true;
  for (const auto& [ga, posea] : parts_a) {
    for (const auto& [gb, poseb] : parts_b) {
      SdResult r = primitive_distance(ga, posea, gb, poseb);
      if (first || r.phi < best.phi) {
        best = r;
        first = false;
      }
    }
  }
  return best;
}

void SystemModel::finalize(double mu_default) {
  nq = 0;
  actuated_idx.clear();
  unactuated_idx.clear();
  for (Body& b : bodies) {
    b.dof_start = nq;
    for (int k = 0; k < b.ndof(); ++k) {
      if (b.actuated)
        actuated_idx.push_back(nq + k);
      else
        unactuated_idx.push_back(nq + k);
    }
    nq += b.ndof();
  }
  n_qa = static_cast<int>(actuated_idx.size());
  n_qo = static_cast<int>(unactuated_idx.size());

  if (k_a.size() == 0) k_a = VectorXd::Constant(n_qa, 100.0);
  if (mass_o.size() == 0) mass_o = MatrixXd::Identity(n_qo, n_qo);
  if (tau_a.size() == 0) tau_a = VectorXd::Zero(n_qa);
  if (tau_o.size() == 0) tau_o = VectorXd::Zero(n_qo);
  if (default_q.size() == 0) default_q = VectorXd::Zero(nq);

  if (k_a.size() != n_qa) throw Error("bad-model", "K_a size mismatch");
  if (mass_o.rows() != n_qo || mass_o.cols() != n_qo)
    throw Error("bad-model", "M_o size mismatch");
  if ((k_a.array() <= 0.0).any()) throw Error("bad-model", "K_a entries must be positive");
  if (h <= 0.0) throw Error("bad-model", "step size must be positive");
  if (n_qo > 0) {
    Eigen::LLT<MatrixXd> llt(mass_o);
    if (llt.info() != Eigen::Success) throw Error("bad-model", "M_o must be positive definite");
  }

  // Candidate pairs: dynamics couples the object with robots and the static
  // world; planning additionally checks robot vs static.
  contact_pairs.clear();
  collision_pairs.clear();
  int ga = 0;
  for (size_t ia = 0; ia < bodies.size(); ++ia) {
    for (size_t ja = 0; ja < bodies[ia].geoms.size(); ++ja, ++ga) {
      int gb = 0;
      for (size_t ib = 0; ib < bodies.size(); ++ib) {
        for (size_t jb = 0; jb < bodies[ib].geoms.size(); ++jb, ++gb) {
          if (gb <= ga || ia == ib) continue;
          const Body& a = bodies[ia];
          const Body& b = bodies[ib];
          const bool a_object = !a.actuated && a.kind != BodyKind::kFixed;
          const bool b_object = !b.actuated && b.kind != BodyKind::kFixed;
          PairSpec spec{ga, gb, static_cast<int>(ia), static_cast<int>(ib), mu_default};
          if (a_object != b_object) {
            contact_pairs.push_back(spec);
            collision_pairs.push_back(spec);
          } else if (a.actuated && b.kind == BodyKind::kFixed) {
            collision_pairs.push_back(spec);
          } else if (b.actuated && a.kind == BodyKind::kFixed) {
            collision_pairs.push_back(spec);
          }
        }
      }
    }
  }
}

int SystemModel::num_geoms() const {
  int n = 0;
  for (const Body& b : bodies) n += static_cast<int>(b.geoms.size());
  return n;
}

const Geom& SystemModel::geom(int global_index, int* body_index) const {
  int g = 0;
  for (size_t i = 0; i < bodies.size(); ++i) {
    for (const Geom& geom : bodies[i].geoms) {
      if (g == global_index) {
        if (body_index) *body_index = static_cast<int>(i);
        return geom;
      }
      ++g;
    }
  }
  throw Error("bad-index", "geometry index out of range");
}

VectorXd SystemModel::object_part(const VectorXd& q) const {
  VectorXd out(n_qo);
  for (int i = 0; i < n_qo; ++i) out[i] = q[unactuated_idx[i]];
  return out;
}

VectorXd SystemModel::actuated_part(const VectorXd& q) const {
  VectorXd out(n_qa);
  for (int i = 0; i < n_qa; ++i) out[i] = q[actuated_idx[i]];
  return out;
}

VectorXd SystemModel::merge(const VectorXd& q_o, const VectorXd& q_a) const {
  VectorXd out(nq);
  for (int i = 0; i < n_qo; ++i) out[unactuated_idx[i]] = q_o[i];
  for (int i = 0; i < n_qa; ++i) out[actuated_idx[i]] = q_a[i];
  return out;
}

Pose2 body_pose(const SystemModel& sys, const VectorXd& q, int body_index) {
  const Body& b = sys.bodies[body_index];
  Pose2 pose = b.base;
  if (b.kind == BodyKind::kFree) {
    for (size_t k = 0; k < b.axes.size(); ++k) {
      const double v = q[b.dof_start + static_cast<int>(k)];
      switch (b.axes[k]) {
        case DofAxis::kX:
          pose.p.x() += v;
          break;
        case DofAxis::kY:
          pose.p.y() += v;
          break;
        case DofAxis::kTheta:
          pose.th += v;
          break;
      }
    }
  }
  return pose;
}

std::vector<Vector2d> chain_joint_positions(const Body& body, const VectorXd& q_body) {
  std::vector<Vector2d> joints;
  joints.push_back(body.base.p);
  double angle = body.base.th;
  Vector2d p = body.base.p;
  for (size_t k = 0; k < body.link_lengths.size(); ++k) {
    angle += q_body[static_cast<int>(k)];
    p += body.link_lengths[k] * Vector2d(std::cos(angle), std::sin(angle));
    joints.push_back(p);  // distal end of link k
  }
  return joints;
}

Vector2d chain_tip_position(const Body& body, const VectorXd& q_body) {
  return chain_joint_positions(body, q_body).back();
}

namespace {

// World frame of chain link `k`, anchored at the proximal joint.
Pose2 chain_link_frame(const Body& body, const VectorXd& q_body, int link) {
  double angle = body.base.th;
  Vector2d p = body.base.p;
  for (int k = 0; k < link; ++k) {
    angle += q_body[k];
    p += body.link_lengths[k] * Vector2d(std::cos(angle), std::sin(angle));
  }
  angle += q_body[link];
  return Pose2{p, angle};
}

VectorXd body_q(const SystemModel& sys, const VectorXd& q, int body_index) {
  const Body& b = sys.bodies[body_index];
  return q.segment(b.dof_start, b.ndof());
}

}  // namespace

Pose2 geom_world_pose(const SystemModel& sys, const VectorXd& q, int geom_global_index) {
  int body_index = 0;
  const Geom& g = sys.geom(geom_global_index, &body_index);
  const Body& b = sys.bodies[body_index];
  if (b.kind == BodyKind::kChain) {
    const int link = (g.link >= 0) ? g.link : static_cast<int>(b.link_lengths.size()) - 1;
    return chain_link_frame(b, body_q(sys, q, body_index), link).compose(g.local);
  }
  return body_pose(sys, q, body_index).compose(g.local);
}

MatrixXd point_jacobian(const SystemModel& sys, const VectorXd& q, int body_index, int link,
                        const Vector2d& p_world) {
  const Body& b = sys.bodies[body_index];
  MatrixXd J = MatrixXd::Zero(2, sys.nq);
  if (b.kind == BodyKind::kFree) {
    const Pose2 pose = body_pose(sys, q, body_index);
    for (size_t k = 0; k < b.axes.size(); ++k) {
      const int col = b.dof_start + static_cast<int>(k);
      switch (b.axes[k]) {
        case DofAxis::kX:
          J(0, col) = 1.0;
          break;
        case DofAxis::kY:
          J(1, col) = 1.0;
          break;
        case DofAxis::kTheta: {
          const Vector2d r = perp(p_world - pose.p);
          J(0, col) = r.x();
          J(1, col) = r.y();
          break;
        }
      }
    }
  } else if (b.kind == BodyKind::kChain) {
    const auto joints = chain_joint_positions(b, body_q(sys, q, body_index));
    const int last = (link >= 0) ? link : static_cast<int>(b.link_lengths.size()) - 1;
    for (int j = 0; j <= last; ++j) {
      const Vector2d r = perp(p_world - joints[j]);
      J(0, b.dof_start + j) = r.x();
      J(1, b.dof_start + j) = r.y();
    }
  }
  return J;
}

SdResult pair_distance(const SystemModel& sys, const VectorXd& q, const PairSpec& pair) {
  int ba = 0, bb = 0;
  const Geom& ga = sys.geom(pair.geom_a, &ba);
  const Geom& gb = sys.geom(pair.geom_b, &bb);
  return signed_distance(ga, geom_world_pose(sys, q, pair.geom_a), gb,
                         geom_world_pose(sys, q, pair.geom_b));
}

ContactKinematics make_contact_kinematics(const SystemModel& sys, const VectorXd& q,
                                          int pair_index, const PairSpec& pair,
                                          const SdResult& sd) {
  ContactKinematics ck;
  ck.pair_index = pair_index;
  ck.phi = sd.phi;
  ck.mu = pair.mu;
  ck.d = (pair.mu > 0.0) ? 2 : 1;
  ck.witness_a = sd.witness_a;
  ck.witness_b = sd.witness_b;
  ck.normal = sd.normal;

  int link_a = -1, link_b = -1;
  const Geom& ga = sys.geom(pair.geom_a, nullptr);
  const Geom& gb = sys.geom(pair.geom_b, nullptr);
  link_a = ga.link;
  link_b = gb.link;

  const MatrixXd Ja = point_jacobian(sys, q, pair.body_a, link_a, sd.witness_a);
  const MatrixXd Jb = point_jacobian(sys, q, pair.body_b, link_b, sd.witness_b);
  const MatrixXd Jrel = Ja - Jb;

  ck.J = MatrixXd::Zero(ck.d, sys.nq);
  ck.J.row(0) = sd.normal.transpose() * Jrel;
  if (ck.d == 2) ck.J.row(1) = perp(sd.normal).transpose() * Jrel;

  ck.c_offset = VectorXd::Zero(ck.d);
  ck.c_offset[0] = sd.phi;
  ck.c_offset -= ck.J * q;
  return ck;
}

std::vector<ContactKinematics> detect_contacts(const SystemModel& sys, const VectorXd& q,
                                               double phi_threshold) {
  if (q.size() != sys.nq) throw Error("bad-input", "configuration size mismatch");
  std::vector<ContactKinematics> contacts;
  for (size_t i = 0; i < sys.contact_pairs.size(); ++i) {
    const PairSpec& pair = sys.contact_pairs[i];
    const SdResult sd = pair_distance(sys, q, pair);
    if (sd.phi < phi_threshold) {
      contacts.push_back(make_contact_kinematics(sys, q, static_cast<int>(i), pair, sd));
    }
  }
  return contacts;
}

}  // namespace ctr
