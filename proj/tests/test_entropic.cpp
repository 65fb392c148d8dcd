#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "otdual/entropic.hpp"
#include "otdual/random.hpp"

using namespace helpers;

namespace {

std::vector<double> to_d(const std::vector<Rational>& v) {
  std::vector<double> out;
  for (const auto& x : v) out.push_back(x.get_d());
  return out;
}

double dual_distance(const EntropicSolution& s, const DualPair& d) {
  return std::max(max_abs_diff(s.phi, to_d(d.phi)), max_abs_diff(s.psi, to_d(d.psi)));
}

double plan_distance(const Table<double>& a, const Table<double>& b) {
  double d = 0;
  for (std::size_t k = 0; k < a.data().size(); ++k) d = std::max(d, std::abs(a.data()[k] - b.data()[k]));
  return d;
}

double plan_cost(const Table<double>& p, const CostMatrix& c) {
  double total = 0;
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j) total += p(i, j) * c(i, j).get_d();
  return total;
}

}  // namespace

TEST_CASE("entropy of simple plans") {
  Table<double> one(1, 1, 1.0);
  CHECK(entropy(one) == doctest::Approx(-1.0));
  Table<double> quarter(2, 2, 0.25);
  CHECK(entropy(quarter) == doctest::Approx(-std::log(4.0) - 1.0));
  Table<double> sparse(2, 2, 0.0);
  sparse(0, 0) = sparse(1, 1) = 0.5;
  CHECK(entropy(sparse) == doctest::Approx(-std::log(2.0) - 1.0));
}

TEST_CASE("one-atom Sinkhorn") {
  DiscreteMeasure one(V({"1"}));
  auto s = sinkhorn(one, one, CostMatrix(T({{"3/2"}})), 0.05);
  CHECK(s.converged);
  CHECK(s.plan(0, 0) == doctest::Approx(1.0));
  CHECK(s.phi[0] == 0.0);
  CHECK(s.psi[0] == doctest::Approx(1.5));
}

TEST_CASE("Sinkhorn rejects bad parameters") {
  Instance in = fixture("first_worked_example.json");
  CHECK_THROWS_AS(sinkhorn(in.mu, in.nu, in.cost, 0.0), Error);
  CHECK_THROWS_AS(sinkhorn(in.mu, in.nu, in.cost, -1.0), Error);
  CHECK_THROWS_AS(sinkhorn(in.mu, in.nu, in.cost, 0.1, {}, 5), Error);
  SinkhornOptions tiny;
  tiny.max_iter = 1;
  tiny.block_steps = false;
  CHECK_FALSE(sinkhorn(in.mu, in.nu, in.cost, 1e-3, tiny).converged);
}

TEST_CASE("entropic plans approach the minimal-entropy optimal plan in the first worked example") {
  Instance in = fixture("first_worked_example.json");
  Table<double> star = oracle::min_entropy_on_face(in.mu.weights(), in.nu.weights(), in.cost.entries());
  double prev = 1e9;
  for (double eps : {0.1, 0.03, 0.01, 0.003}) {
    auto s = sinkhorn(in.mu, in.nu, in.cost, eps);
    REQUIRE(s.converged);
    double d = plan_distance(s.plan, star);
    CHECK(d < prev + 1e-9);
    prev = d;
  }
  CHECK(prev < 1e-3);
  // the limit has full support on the zero-cost cells
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK((star(i, j) > 1e-6) == (in.cost(i, j) == 0));
}

TEST_CASE("centroid tree of the centroid example") {
  Instance in = fixture("centroid_example.json");
  CentroidResult cr = centroid(*in.plan, in.mu, in.nu, in.cost);
  const auto& t = cr.tree;
  REQUIRE(t.size == 3);
  CHECK(t.delta(0, 1) == 1);
  CHECK(t.delta(0, 2) == R("1/2"));
  CHECK(t.delta(1, 2) == R("3/2"));
  CHECK(t.delta(1, 0) == t.delta(0, 1));
  CHECK(t.edges == std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}, {0, 1}});
  CHECK(t.L(0, 1) == 1);
  CHECK(t.L(0, 2) == R("1/2"));
  CHECK(t.L(1, 0) == -1);
  CHECK(cr.alpha == V({"0", "-1", "-1/2"}));
  CHECK(cr.dual.phi == V({"0", "-1", "-1", "-1/2"}));
  CHECK(cr.dual.psi == V({"1", "2", "1", "3/2", "3/2"}));
  // any optimal plan yields the same centroid
  auto sol = solve(in.mu, in.nu, in.cost);
  CHECK(centroid(sol.plan, in.mu, in.nu, in.cost).dual == cr.dual);
  // anchoring elsewhere translates the dual
  CentroidResult shifted = centroid(*in.plan, in.mu, in.nu, in.cost, 3);
  CHECK(shifted.dual.phi[3] == 0);
  CHECK(shifted.dual.phi[0] == R("1/2"));
}

TEST_CASE("Sinkhorn duals converge to the centroid in the centroid example") {
  Instance in = fixture("centroid_example.json");
  CentroidResult cr = centroid(*in.plan, in.mu, in.nu, in.cost);
  double prev = 1e9;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    auto s = sinkhorn(in.mu, in.nu, in.cost, eps);
    REQUIRE(s.converged);
    double d = dual_distance(s, cr.dual);
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev <= 2e-2);
}

TEST_CASE("pairwise tree and limit tree agree on the centroid example") {
  Instance in = fixture("centroid_example.json");
  DualPolytope p = merge_forced(characterize_duals(*in.plan, in.mu, in.nu, in.cost), in.mu, in.nu);
  CentroidTree pairwise = build_centroid_tree(p);
  CentroidTree limit = limit_tree(p);
  CHECK(pairwise.edges == limit.edges);
  CHECK(pairwise.delta == limit.delta);
  CHECK(tree_alpha(pairwise) == tree_alpha(limit));
}

TEST_CASE("a three-cycle binds before the pairwise half-widths") {
  // components ({1},{3}), ({2},{1,4}), ({3},{2}); pairwise half-widths 1, 3/2, 3/2 but the
  // cycle through all three has mean 1, so the third offset is fixed at the first level
  DiscreteMeasure mu(V({"5/12", "1/6", "5/12"})), nu(V({"1/12", "5/12", "5/12", "1/12"}));
  CostMatrix c(T({{"2", "0", "0", "2"}, {"2", "2", "2", "0"}, {"3", "0", "3", "1"}}));
  auto sol = solve(mu, nu, c);
  CentroidResult cr = centroid(sol.plan, mu, nu, c);
  REQUIRE(cr.polytope.size() == 3);
  CHECK(cr.tree.delta(0, 1) == 1);
  CHECK(cr.tree.delta(0, 2) == R("3/2"));
  CHECK(cr.tree.delta(1, 2) == R("3/2"));
  CHECK(cr.alpha == V({"0", "1", "1"}));
  CHECK(tree_alpha(build_centroid_tree(cr.polytope)) == V({"0", "1", "3/2"}));
  // the smallest slack off the union graph is 1 here and only 1/2 for the pairwise choice
  auto min_slack = [&](const DualPair& d) {
    Rational best = 100;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        Rational s = c(i, j) - d.phi[i] - d.psi[j];
        if (s > 0) best = std::min(best, s);
      }
    return best;
  };
  CHECK(min_slack(cr.dual) == 1);
  CHECK(min_slack(assemble_dual(cr.polytope, V({"0", "1", "3/2"}))) == R("1/2"));
  auto s = sinkhorn(mu, nu, c, 1e-3);
  CHECK(dual_distance(s, cr.dual) < 2e-2);
}

TEST_CASE("two components: centroid offset is the interval midpoint") {
  // a 2x2 instance with a diagonal plan and a degenerate split
  DiscreteMeasure u(V({"1/2", "1/2"}));
  CostMatrix c(T({{"0", "3"}, {"1", "0"}}));
  auto sol = solve(u, u, c);
  CentroidResult cr = centroid(sol.plan, u, u, c);
  REQUIRE(cr.polytope.size() == 2);
  auto [lo, hi] = cr.polytope.interval(0, 1);
  CHECK(cr.alpha[0] - cr.alpha[1] == (lo + hi) / 2);
  CHECK(cr.tree.edges.size() == 1);
  auto s = sinkhorn(u, u, c, 1e-3);
  CHECK(dual_distance(s, cr.dual) < 1e-2);
}

TEST_CASE("random degenerate instances: centroid is a dual optimizer with a spanning tree") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 60; ++rep) {
    Instance in = random_degenerate_instance(rng, 1 + rng() % 5, 1 + rng() % 5);
    auto sol = solve(in.mu, in.nu, in.cost);
    CentroidResult cr = centroid(sol.plan, in.mu, in.nu, in.cost);
    SupportGraph E = union_graph(sol.plan, sol.dual, in.mu, in.nu, in.cost);
    CHECK(is_dual_optimizer(cr.dual, in.mu, in.nu, in.cost, E));
    CHECK(cr.dual.phi[0] == 0);
    CHECK(cr.tree.edges.size() + 1 == cr.polytope.size());
    CHECK_NOTHROW(check_alpha(cr.polytope, cr.alpha));
    for (auto [n, m] : cr.tree.edges) CHECK(cr.alpha[n] - cr.alpha[m] == cr.tree.L(n, m));
  }
}

TEST_CASE("random degenerate 3x4 instances: epsilon schedule") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 10; ++rep) {
    Instance in = random_degenerate_instance(rng, 3, 4);
    auto sol = solve(in.mu, in.nu, in.cost);
    const double ot = sol.value.get_d();
    CentroidResult cr = centroid(sol.plan, in.mu, in.nu, in.cost);
    double prev_gap = 1e9, prev_dist = 1e9;
    for (double eps : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
      auto s = sinkhorn(in.mu, in.nu, in.cost, eps);
      REQUIRE(s.converged);
      // Gibbs form
      double worst = 0;
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j)
        {
          double exponent = (s.phi[i] + s.psi[j] - in.cost(i, j).get_d()) / eps;
          if (s.plan(i, j) > 0)
            worst = std::max(worst, std::abs(eps * std::log(s.plan(i, j)) + in.cost(i, j).get_d() - s.phi[i] - s.psi[j]));
          else
            CHECK(exponent < -700);  // underflowed cell
        }
      CHECK(worst < 1e-8);
      double gap = plan_cost(s.plan, in.cost) - ot;
      CHECK(gap >= -1e-8);
      // cost above the optimum is at most ε times the entropy range of plans
      CHECK(gap <= eps * (std::log(12.0) + 1e-9));
      CHECK(gap <= prev_gap + 1e-8);
      prev_gap = gap;
      double dist = dual_distance(s, cr.dual);
      CHECK(dist <= prev_dist + 1e-6);
      prev_dist = dist;
    }
    CHECK(prev_dist < 5e-2);
  }
}
