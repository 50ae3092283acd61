#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "certalign/sdp.hpp"
#include "random_sdp.hpp"

using namespace certalign;

TEST(Sdp, Scalar) {
  sdp::Problem p;
  p.c = Eigen::MatrixXd::Ones(1, 1);
  p.constraints.push_back({Eigen::MatrixXd::Ones(1, 1), 2.0});
  const auto sol = sdp::solve(p);
  EXPECT_EQ(sol.status, sdp::Status::Optimal);
  EXPECT_NEAR(sol.x(0, 0), 2.0, 1e-9);
  EXPECT_NEAR(sol.primal_objective, 2.0, 1e-9);
  EXPECT_NEAR(sol.y(0), 1.0, 1e-9);
}

TEST(Sdp, TwoByTwoTrace) {
  sdp::Problem p;
  p.c = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd a(2, 2);
  a << 0, 0.5, 0.5, 0;
  p.constraints.push_back({a, 1.0});
  const auto sol = sdp::solve(p);
  EXPECT_EQ(sol.status, sdp::Status::Optimal);
  EXPECT_NEAR(sol.primal_objective, 2.0, 1e-9);
  EXPECT_NEAR((sol.x - Eigen::MatrixXd::Ones(2, 2)).norm(), 0.0, 1e-8);
}

TEST(Sdp, RandomFeasibleProblems) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const auto [n, m] = certalign::testing::random_size(rng);
    const auto p = certalign::testing::random_feasible_sdp(rng, n, m);
    const auto sol = sdp::solve(p);
    EXPECT_EQ(sol.status, sdp::Status::Optimal) << "n=" << n << " m=" << m;
    EXPECT_LE(sol.gap, 1e-8);
    EXPECT_LE(sol.iterations, 100);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sol.x).eigenvalues().minCoeff(), -1e-9);
  }
}

TEST(Sdp, DependentConstraintIsDropped) {
  sdp::Problem p;
  p.c = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd a(2, 2);
  a << 1, 0, 0, 0;
  p.constraints.push_back({a, 1.0});
  p.constraints.push_back({2.0 * a, 2.0});
  const auto sol = sdp::solve(p);
  EXPECT_EQ(sol.status, sdp::Status::Optimal);
  EXPECT_EQ(sol.dropped_constraints.size(), 1u);
  EXPECT_NEAR(sol.primal_objective, 1.0, 1e-8);
}

TEST(Sdp, InfeasibleProblem) {
  // X11 = -1 has no PSD solution
  sdp::Problem p;
  p.c = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd a(2, 2);
  a << 1, 0, 0, 0;
  p.constraints.push_back({a, -1.0});
  EXPECT_EQ(sdp::solve(p).status, sdp::Status::Infeasible);
}

TEST(Sdp, RejectsMalformedInput) {
  sdp::Problem p;
  p.c = Eigen::MatrixXd::Identity(2, 2);
  p.constraints.push_back({Eigen::MatrixXd::Identity(3, 3), 1.0});
  EXPECT_THROW(sdp::solve(p), std::invalid_argument);
  p.constraints[0].a = Eigen::MatrixXd::Identity(2, 2);
  sdp::Options o;
  o.tol = 1e-2;
  EXPECT_THROW(sdp::solve(p, o), std::invalid_argument);
}

TEST(Sdp, Deterministic) {
  std::mt19937_64 rng(5);
  const auto p = certalign::testing::random_feasible_sdp(rng, 6, 10);
  const auto a = sdp::solve(p), b = sdp::solve(p);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Sdp, ProblemRoundTrip) {
  std::mt19937_64 rng(6);
  const auto p = certalign::testing::random_feasible_sdp(rng, 4, 5);
  std::stringstream ss;
  sdp::write_problem(ss, p);
  const auto q = sdp::read_problem(ss);
  ASSERT_EQ(q.num_constraints(), p.num_constraints());
  EXPECT_EQ(q.c, p.c);
  for (int i = 0; i < p.num_constraints(); ++i) {
    EXPECT_EQ(q.constraints[i].a, p.constraints[i].a);
    EXPECT_EQ(q.constraints[i].b, p.constraints[i].b);
  }
}

TEST(Sdp, HistoryMonotoneGapWhenFeasible) {
  std::mt19937_64 rng(7);
  const auto p = certalign::testing::random_feasible_sdp(rng, 8, 20);
  sdp::Options o;
  o.record_history = true;
  const auto sol = sdp::solve(p, o);
  ASSERT_EQ(static_cast<int>(sol.history.size()), sol.iterations + 1);
  const double tol = sdp::Options{}.tol;
  for (std::size_t i = 0; i + 1 < sol.history.size(); ++i) {
    const auto& h = sol.history[i];
    if (h.primal_residual > 10 * tol || h.dual_residual > 10 * tol) continue;
    const auto& nx = sol.history[i + 1];
    EXPECT_LE(nx.primal_objective - nx.dual_objective,
              h.primal_objective - h.dual_objective + 10 * tol * (1 + std::abs(h.primal_objective)));
  }
}
