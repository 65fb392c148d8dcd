#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <vector>

#include "otdual/transport_graph.hpp"

namespace otdual {

/// lower ≤ α_n − α_m ≤ upper, with n < m (0-based component indices).
struct AlphaConstraint {
  std::size_t n = 0;
  std::size_t m = 0;
  Rational lower;
  Rational upper;
  friend bool operator==(const AlphaConstraint&, const AlphaConstraint&) = default;
};

/// All dual optimizers: φ = φ_n + (α_n − α_1) + t on X_n, ψ = ψ_n − (α_n − α_1) − t on Y_n,
/// for α satisfying every constraint and any translation t. Component 0 holds x0 and
/// α_1 is taken as 0.
class DualPolytope {
 public:
  DualPolytope() = default;
  DualPolytope(ComponentPartition partition, std::vector<std::size_t> anchors, std::vector<DualPair> base,
               std::vector<AlphaConstraint> constraints, CostMatrix cost, std::size_t x0);

  std::size_t size() const noexcept { return partition_.size(); }
  const ComponentPartition& partition() const noexcept { return partition_; }
  const std::vector<std::size_t>& anchors() const noexcept { return anchors_; }
  const std::vector<DualPair>& base_duals() const noexcept { return base_; }
  const std::vector<AlphaConstraint>& constraints() const noexcept { return constraints_; }
  const CostMatrix& cost() const noexcept { return cost_; }
  std::size_t x0() const noexcept { return x0_; }

  /// Interval for the pair (n, m), n ≠ m; swapped pairs are negated.
  std::pair<Rational, Rational> interval(std::size_t n, std::size_t m) const;
  /// U(n,m) = max allowed α_n − α_m before closure; diagonal 0.
  Table<Rational> upper_table() const;
  /// Tightest implied bounds: α_n − α_m ≤ closure(n,m).
  Table<Rational> closure() const;

  friend bool operator==(const DualPolytope&, const DualPolytope&) = default;

 private:
  ComponentPartition partition_;
  std::vector<std::size_t> anchors_;
  std::vector<DualPair> base_;
  std::vector<AlphaConstraint> constraints_;
  CostMatrix cost_;
  std::size_t x0_ = 0;
};

/// Polytope over the components of an arbitrary support subgraph `g` of the optimal face
/// (the support graph of γ, or the union graph).
DualPolytope polytope_from_graph(const SupportGraph& g, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 const CostMatrix& c, std::size_t x0);

/// Polytope over the components of the support graph of the optimal plan γ.
DualPolytope characterize_duals(const TransportPlan& gamma, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                const CostMatrix& c, std::size_t x0 = 0);

/// Same set of duals re-expressed over the components of the union graph G (every
/// forced difference absorbed into the base duals).
DualPolytope merge_forced(const DualPolytope& polytope, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Groups of components whose pairwise differences are fixed by the constraints.
std::vector<std::vector<std::size_t>> forced_classes(const DualPolytope& polytope);

bool is_dual_unique(const DualPolytope& polytope);

/// Throws kInvalidArgument naming the first violated pair.
void check_alpha(const DualPolytope& polytope, const std::vector<Rational>& alpha);

DualPair assemble_dual(const DualPolytope& polytope, const std::vector<Rational>& alpha,
                       const Rational& translation = Rational(0));

bool is_dual_optimizer(const DualPair& candidate, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const CostMatrix& c, const SupportGraph& union_g);

bool strict_interior_test(const DualPolytope& polytope, const std::vector<Rational>& alpha);

struct RecoveredAlpha {
  std::vector<Rational> alpha;  ///< alpha[0] == 0
  Rational translation;         ///< φ(x0)
};

/// Reads off the component offsets of a dual written in the polytope's parameterization.
/// Throws kInvalidArgument when the dual is not of that form.
RecoveredAlpha recover_alpha(const DualPolytope& polytope, const DualPair& dual);

/// Random feasible α (α_1 = 0): components are fixed one by one inside the bounds implied
/// by the closure, with values on a grid of `resolution` points per interval (endpoints included).
std::vector<Rational> sample_alpha(const DualPolytope& polytope, std::mt19937_64& rng, unsigned resolution = 64);

}  // namespace otdual
