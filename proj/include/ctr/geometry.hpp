#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctr/types.hpp"

namespace ctr {

// Planar rigid transform.
struct Pose2 {
  Vector2d p{0.0, 0.0};
  double th = 0.0;

  Vector2d apply(const Vector2d& local) const {
    const double c = std::cos(th), s = std::sin(th);
    return Vector2d(p.x() + c * local.x() - s * local.y(),
                    p.y() + s * local.x() + c * local.y());
  }
  Vector2d rotate(const Vector2d& v) const {
    const double c = std::cos(th), s = std::sin(th);
    return Vector2d(c * v.x() - s * v.y(), s * v.x() + c * v.y());
  }
  Vector2d unrotate(const Vector2d& v) const {
    const double c = std::cos(th), s = std::sin(th);
    return Vector2d(c * v.x() + s * v.y(), -s * v.x() + c * v.y());
  }
  Vector2d to_local(const Vector2d& world) const { return unrotate(world - p); }
  Pose2 compose(const Pose2& rhs) const {
    return Pose2{apply(rhs.p), th + rhs.th};
  }
};

enum class GeomKind { kCircle, kBox, kHalfPlane, kBoxUnion };

struct BoxMember {
  Vector2d half;
  Pose2 local;
};

struct Geom {
  GeomKind kind = GeomKind::kCircle;
  double radius = 0.0;               // circle
  Vector2d half{0.0, 0.0};           // box half extents
  Vector2d plane_normal{0.0, 1.0};   // half-plane solid region {p : n.p <= offset}
  double plane_offset = 0.0;
  std::vector<BoxMember> members;    // union of boxes (e.g. the T shape)
  Pose2 local;                       // pose in body frame (chain: link frame)
  int link = -1;                     // chain link index, -1 for body frame
};

enum class BodyKind { kFixed, kFree, kChain };
enum class DofAxis { kX, kY, kTheta };

// A rigid body (or revolute chain) with up to 3 planar DOFs. Free bodies
// rotate about their own origin; chains have one revolute joint per link,
// link frames anchored at the proximal joint.
struct Body {
  std::string name;
  BodyKind kind = BodyKind::kFixed;
  bool actuated = false;
  Pose2 base;
  std::vector<DofAxis> axes;          // free bodies
  std::vector<double> link_lengths;   // chain bodies
  std::vector<Geom> geoms;
  int dof_start = 0;                  // assigned by SystemModel::finalize

  int ndof() const {
    if (kind == BodyKind::kFree) return static_cast<int>(axes.size());
    if (kind == BodyKind::kChain) return static_cast<int>(link_lengths.size());
    return 0;
  }
};

struct PairSpec {
  int geom_a = 0, geom_b = 0;  // global geometry indices, geom_a < geom_b
  int body_a = 0, body_b = 0;
  double mu = 0.0;
};

struct SdResult {
  double phi = 0.0;
  Vector2d witness_a{0, 0}, witness_b{0, 0};
  Vector2d normal{1, 0};  // unit, points from B toward A
};

// One detected contact: signed distance, cone dimension, Jacobian rows
// (normal first, then tangent for d=2) and the constant offset
// c = [phi, 0] - J q at the query configuration.
struct ContactKinematics {
  int pair_index = 0;
  double phi = 0.0;
  int d = 1;
  double mu = 0.0;
  MatrixXd J;
  VectorXd c_offset;
  Vector2d witness_a{0, 0}, witness_b{0, 0}, normal{1, 0};
};

struct SystemModel {
  std::vector<Body> bodies;
  std::vector<int> actuated_idx;    // global dof indices, ascending
  std::vector<int> unactuated_idx;
  VectorXd k_a;                     // diagonal stiffness, one entry per actuated dof
  MatrixXd mass_o;                  // object mass matrix over unactuated dofs
  double epsilon = 1.0;
  double h = 0.1;
  VectorXd tau_a, tau_o;            // external generalized forces
  double phi_threshold = 0.2;
  std::vector<PairSpec> contact_pairs;    // pairs entering the dynamics
  std::vector<PairSpec> collision_pairs;  // pairs checked during motion planning
  VectorXd default_q;

  int nq = 0, n_qa = 0, n_qo = 0;

  // Assigns dof offsets, builds index sets and candidate pair lists, and
  // validates invariants. Must be called once after bodies are populated.
  void finalize(double mu_default);

  int num_geoms() const;
  const Geom& geom(int global_index, int* body_index) const;

  VectorXd object_part(const VectorXd& q) const;
  VectorXd actuated_part(const VectorXd& q) const;
  // Scatters object/actuated sub-vectors back into a full configuration.
  VectorXd merge(const VectorXd& q_o, const VectorXd& q_a) const;
};

// Exact signed distance between two posed primitives. phi > 0 iff separated,
// normal points from B toward A, witness points realize phi. Coincident
// circle centers fall back to the +x axis.
SdResult signed_distance(const Geom& a, const Pose2& pa, const Geom& b, const Pose2& pb);

Pose2 body_pose(const SystemModel& sys, const VectorXd& q, int body_index);
Pose2 geom_world_pose(const SystemModel& sys, const VectorXd& q, int geom_global_index);

// 2 x nq jacobian of a world point rigidly attached to the given body/link.
MatrixXd point_jacobian(const SystemModel& sys, const VectorXd& q, int body_index,
                        int link, const Vector2d& p_world);

SdResult pair_distance(const SystemModel& sys, const VectorXd& q, const PairSpec& pair);

// All pairs with phi < threshold, lexicographic pair order, Jacobians and
// offsets evaluated at q.
std::vector<ContactKinematics> detect_contacts(const SystemModel& sys, const VectorXd& q,
                                               double phi_threshold);

ContactKinematics make_contact_kinematics(const SystemModel& sys, const VectorXd& q,
                                          int pair_index, const PairSpec& pair,
                                          const SdResult& sd);

// Chain helpers (used by IK and grasp sampling).
std::vector<Vector2d> chain_joint_positions(const Body& body, const VectorXd& q_body);
Vector2d chain_tip_position(const Body& body, const VectorXd& q_body);

}  // namespace ctr
