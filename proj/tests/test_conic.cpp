#include <doctest.h>

#include <cmath>

#include "ctr/conic.hpp"
#include "ctr/rng.hpp"

using namespace ctr;

namespace {

ConicProgram empty_program(int n) {
  ConicProgram prog;
  prog.P = MatrixXd::Identity(n, n);
  prog.b = VectorXd::Zero(n);
  prog.E = MatrixXd(0, n);
  prog.f = VectorXd(0);
  return prog;
}

// Random feasible SOCP with a known strictly feasible point.
ConicProgram random_program(Rng* rng, int n, int m_cones, VectorXd* x_feasible) {
  ConicProgram prog = empty_program(n);
  MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = rng->gaussian();
  prog.P = G * G.transpose() + 0.1 * MatrixXd::Identity(n, n);
  prog.b = rng->gaussian_vector(n);
  VectorXd x_hat = rng->gaussian_vector(n);
  for (int k = 0; k < m_cones; ++k) {
    const int dim = 1 + rng->uniform_int(0, 2);
    ConeConstraint cone;
    cone.mu = (dim == 1) ? 0.0 : rng->uniform(0.3, 2.0);
    cone.A = MatrixXd(dim, n);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < n; ++j) cone.A(i, j) = rng->gaussian();
    VectorXd s_interior(dim);
    if (dim == 1) {
      s_interior[0] = rng->uniform(0.5, 2.0);
    } else {
      for (int i = 1; i < dim; ++i) s_interior[i] = rng->gaussian();
      s_interior[0] = cone.mu * s_interior.tail(dim - 1).norm() + rng->uniform(0.5, 2.0);
    }
    cone.c = s_interior - cone.A * x_hat;
    prog.cones.push_back(std::move(cone));
  }
  *x_feasible = x_hat;
  return prog;
}

double cone_violation(const ConeConstraint& cone, const VectorXd& x) {
  const VectorXd v = cone.A * x + cone.c;
  if (cone.dim() == 1 || cone.mu == 0.0) return -v[0];
  return cone.mu * v.tail(v.size() - 1).norm() - v[0];
}

double dual_violation(const ConeConstraint& cone, const VectorXd& z) {
  if (cone.dim() == 1 || cone.mu == 0.0) return -z[0];
  return z.tail(z.size() - 1).norm() - cone.mu * z[0];
}

}  // namespace

TEST_CASE("socp: unconstrained quadratic matches closed form") {
  ConicProgram prog = empty_program(3);
  prog.P << 4, 1, 0, 1, 3, 0, 0, 0, 2;
  prog.b << 1, -2, 0.5;
  const ConicSolution sol = solve_socp(prog);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  const VectorXd expected = -prog.P.llt().solve(prog.b);
  CHECK((sol.x - expected).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("socp: equality constrained QP matches KKT solve") {
  ConicProgram prog = empty_program(3);
  prog.P = MatrixXd::Identity(3, 3) * 2.0;
  prog.b << 1, 1, 1;
  prog.E = MatrixXd(1, 3);
  prog.E << 1, 1, 1;
  prog.f = VectorXd::Constant(1, 1.0);
  const ConicSolution sol = solve_socp(prog);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  MatrixXd K(4, 4);
  K.setZero();
  K.topLeftCorner(3, 3) = prog.P;
  K.topRightCorner(3, 1) = prog.E.transpose();
  K.bottomLeftCorner(1, 3) = prog.E;
  VectorXd rhs(4);
  rhs << -prog.b, prog.f;
  const VectorXd xy = K.fullPivLu().solve(rhs);
  CHECK((sol.x - xy.head(3)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("socp: random programs satisfy the KKT conditions") {
  Rng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    VectorXd x_hat;
    const ConicProgram prog = random_program(&rng, 2 + trial % 5, 1 + trial % 3, &x_hat);
    const ConicSolution sol = solve_socp(prog);
    REQUIRE(sol.status == SolveStatus::kOptimal);

    for (size_t i = 0; i < prog.cones.size(); ++i) {
      CHECK(cone_violation(prog.cones[i], sol.x) < 1e-7);
      CHECK(dual_violation(prog.cones[i], sol.cone_duals[i]) < 1e-7);
    }
    VectorXd grad = prog.P * sol.x + prog.b;
    for (size_t i = 0; i < prog.cones.size(); ++i)
      grad -= prog.cones[i].A.transpose() * sol.cone_duals[i];
    CHECK(grad.cwiseAbs().maxCoeff() < 1e-6 * (1.0 + prog.b.cwiseAbs().maxCoeff()));
    for (size_t i = 0; i < prog.cones.size(); ++i) {
      const VectorXd s = prog.cones[i].A * sol.x + prog.cones[i].c;
      CHECK(std::abs(s.dot(sol.cone_duals[i])) < 1e-6);
    }
    const auto value = [&](const VectorXd& x) {
      return 0.5 * x.dot(prog.P * x) + prog.b.dot(x);
    };
    CHECK(value(sol.x) <= value(x_hat) + 1e-7);
  }
}

TEST_CASE("socp: infeasible program is certified") {
  // x - 1 >= 0 and -x - 1 >= 0 cannot both hold.
  ConicProgram prog = empty_program(1);
  ConeConstraint a, b;
  a.A = MatrixXd::Constant(1, 1, 1.0);
  a.c = VectorXd::Constant(1, -1.0);
  a.mu = 0.0;
  b.A = MatrixXd::Constant(1, 1, -1.0);
  b.c = VectorXd::Constant(1, -1.0);
  b.mu = 0.0;
  prog.cones = {a, b};
  const ConicSolution sol = solve_socp(prog);
  CHECK(sol.status == SolveStatus::kInfeasible);
}

TEST_CASE("barrier: pure quadratic converges in one Newton step") {
  ConicProgram prog = empty_program(2);
  prog.P << 3, 0.5, 0.5, 2;
  prog.b << -1, 2;
  const BarrierResult res = solve_barrier_newton(prog, 100.0, VectorXd::Zero(2));
  const VectorXd expected = -prog.P.llt().solve(prog.b);
  CHECK((res.x - expected).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(res.iterations <= 2);
}

TEST_CASE("barrier: central-path complementarity per cone dimension") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    VectorXd x_hat;
    ConicProgram prog = random_program(&rng, 3, 2, &x_hat);
    const double kappa = 50.0;
    const BarrierResult res = solve_barrier_newton(prog, kappa, x_hat);
    for (size_t i = 0; i < prog.cones.size(); ++i) {
      const VectorXd nu = prog.cones[i].A * res.x + prog.cones[i].c;
      const double target = (prog.cones[i].dim() == 1 ? 1.0 : 2.0) / kappa;
      CHECK(std::abs(nu.dot(res.duals[i]) - target) / target < 1e-6);
      CHECK(dual_violation(prog.cones[i], res.duals[i]) < 1e-12);
    }
    VectorXd grad = prog.P * res.x + prog.b;
    for (size_t i = 0; i < prog.cones.size(); ++i)
      grad -= prog.cones[i].A.transpose() * res.duals[i];
    CHECK(grad.cwiseAbs().maxCoeff() < 1e-9 * (1.0 + prog.b.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("barrier: infeasible start is rejected") {
  ConicProgram prog = empty_program(1);
  ConeConstraint cone;
  cone.A = MatrixXd::Constant(1, 1, 1.0);
  cone.c = VectorXd::Constant(1, 0.0);
  cone.mu = 0.0;
  prog.cones = {cone};
  CHECK_THROWS_AS(solve_barrier_newton(prog, 10.0, VectorXd::Constant(1, -1.0)), Error);
}

TEST_CASE("barrier converges to the socp solution as kappa grows") {
  Rng rng(21);
  VectorXd x_hat;
  ConicProgram prog = random_program(&rng, 4, 2, &x_hat);
  const ConicSolution socp = solve_socp(prog);
  REQUIRE(socp.status == SolveStatus::kOptimal);
  double prev_gap = std::numeric_limits<double>::infinity();
  for (double kappa : {1e2, 1e4, 1e6}) {
    const BarrierResult res = solve_barrier_newton(prog, kappa, x_hat);
    const double gap = (res.x - socp.x).norm();
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 1e-4);
}

TEST_CASE("chebyshev radius") {
  auto hs = [](std::initializer_list<std::pair<std::initializer_list<double>, double>> rows) {
    std::vector<std::pair<VectorXd, double>> out;
    for (const auto& [a, b] : rows) {
      VectorXd v(static_cast<int>(a.size()));
      int i = 0;
      for (double x : a) v[i++] = x;
      out.push_back({v, b});
    }
    return out;
  };
  CHECK(chebyshev_radius(hs({{{1, 0}, -0.5}, {{-1, 0}, -0.5}, {{0, 1}, -0.5}, {{0, -1}, -0.5}})) ==
        doctest::Approx(0.5));
  CHECK(chebyshev_radius(hs({{{1, 0}, 0.1}})) == doctest::Approx(0.0));
  CHECK(chebyshev_radius(hs({{{2, 0}, -1.0}, {{-2, 0}, -1.0}, {{0, 2}, -3.0}, {{0, -2}, -3.0}})) ==
        doctest::Approx(0.5));
}
