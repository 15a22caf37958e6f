#pragma once

#include <optional>
#include <vector>

#include "ctr/hull.hpp"
#include "ctr/rng.hpp"
#include "ctr/sensitivity.hpp"

namespace ctr {

enum class TrustRegionVariant { kEtr, kCtr, kActr, kRctr, kRactr };

const char* to_string(TrustRegionVariant v);
TrustRegionVariant trust_region_variant_from_string(const std::string& s);
bool is_action_only(TrustRegionVariant v);

struct TrustRegionSpec {
  TrustRegionVariant variant = TrustRegionVariant::kRctr;
  MatrixXd sigma;            // SPD over (dq,du), or du only; empty = radius^-2 I
  double radius = 0.1;
  double kappa = 1e4;
  std::optional<VectorXd> q_lb_a, q_ub_a;  // position command box
  std::optional<VectorXd> tau_lb, tau_ub;  // steady-state torque box

  static TrustRegionSpec ball(TrustRegionVariant variant, double r, double kappa) {
    TrustRegionSpec spec;
    spec.variant = variant;
    spec.radius = r;
    spec.kappa = kappa;
    return spec;
  }
};

// Explicit convex constraint set over dz = (dq, du) (du only for action-only
// variants): ellipsoid, frozen-geometry primal cones, dual cones and dim-1
// limit rows. CTR keeps primal and dual rows, R-CTR only dual, ETR neither.
struct TrustRegionConstraints {
  TrustRegionVariant variant = TrustRegionVariant::kRctr;
  int dim_q = 0, dim_u = 0;
  MatrixXd sigma;
  std::vector<ConeConstraint> primal_cones;
  std::vector<ConeConstraint> dual_cones;
  std::vector<ConeConstraint> limit_rows;
  bool boundary_warning = false;  // a nominal dual sat on its cone boundary
  LinearizedDynamics lin;

  int dim() const { return dim_q + dim_u; }
};

TrustRegionConstraints build_trust_region(const TrustRegionSpec& spec,
                                          const LinearizedDynamics& lin,
                                          const SystemModel& sys);

bool contains(const TrustRegionConstraints& cs, const VectorXd& dz, double tol = 1e-9);

struct TrustRegionSamples {
  std::vector<VectorXd> samples;
  double acceptance_rate = 1.0;
};

// Uniform rejection samples: proposals uniform in the ellipsoid, accepted by
// membership. Deterministic for a fixed seed. Throws "degenerate-region" when
// the acceptance rate collapses below 1e-3.
TrustRegionSamples sample_trust_region(const TrustRegionConstraints& cs, int n, uint64_t seed);

// Affine image q_hat = A dq + B du + f of trust-region samples; optionally the
// object rows only.
std::vector<VectorXd> motion_set_samples(const LinearizedDynamics& lin,
                                         const std::vector<VectorXd>& dz_samples,
                                         const SystemModel& sys, bool object_rows_only);

struct WrenchSamples {
  std::vector<std::vector<VectorXd>> contact_forces;  // [sample][contact]
  std::vector<std::vector<VectorXd>> contact_wrenches;
  std::vector<VectorXd> total_wrenches;  // tau_o + sum_i J_oi' lambda_i
};

// Per-sample linearized contact forces mapped through the object-side
// Jacobians (action-only linearization; samples must be dual-feasible).
WrenchSamples wrench_set_samples(const SystemModel& sys, const LinearizedDynamics& lin,
                                 const std::vector<VectorXd>& du_samples);

// Quasistatic object displacement map q+ = q_o + (h^2/eps) M_o^-1 w.
std::vector<VectorXd> motion_set_from_wrench(const SystemModel& sys, const VectorXd& q_o_nominal,
                                             const std::vector<VectorXd>& wrenches);

}  // namespace ctr
