#pragma once

#include <cstddef>
#include <vector>

#include "otdual/dual_polytope.hpp"

namespace otdual {

/// Σ γ_ij (ln γ_ij − 1), with 0 ln 0 = 0.
double entropy(const Table<double>& gamma);

struct SinkhornOptions {
  double tol = 1e-9;
  std::size_t max_iter = 100000;
  /// Interleave exact block-balance steps that resolve offsets between weakly
  /// coupled blocks (needed for small epsilon).
  bool block_steps = true;
  std::size_t check_every = 10;
};

struct EntropicSolution {
  Table<double> plan;
  std::vector<double> phi;
  std::vector<double> psi;
  double epsilon = 0;
  std::size_t iterations = 0;
  double residual = 0;  ///< max-norm marginal violation
  bool converged = false;
};

/// Log-domain Sinkhorn. Potentials are normalized so φ(x0) = 0. Returns the last
/// iterate with converged = false when max_iter is reached; throws kNumericalRange if
/// the iteration produces non-finite values. `warm` (optional) seeds φ, ψ.
EntropicSolution sinkhorn(const std::vector<double>& mu, const std::vector<double>& nu, const Table<double>& c,
                          double epsilon, const SinkhornOptions& options = {}, std::size_t x0 = 0,
                          const EntropicSolution* warm = nullptr);

EntropicSolution sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c, double epsilon,
                          const SinkhornOptions& options = {}, std::size_t x0 = 0);

struct CentroidTree {
  std::size_t size = 0;  ///< number of components N
  std::vector<std::pair<std::size_t, std::size_t>> edges;  ///< (n, m), n < m, in insertion order
  Table<Rational> delta;
  Table<Rational> L;  ///< antisymmetric; α_n − α_m = L(n,m) on tree edges
};

/// Pairwise construction: repeatedly join the pairs of least half-width δ(n,m) whose
/// ends are not yet connected; L(n,m) is the midpoint of the pairwise interval.
CentroidTree build_centroid_tree(const DualPolytope& polytope);

/// Exact ε→0 limit of the offsets. Level by level the common slack t of all remaining
/// α constraints is maximized (a minimum cycle mean of the contracted difference graph)
/// and the components on critical cycles are fixed together. Two-cycles give back the
/// pairwise δ; longer cycles can bind first, in which case the pairwise tree is wrong.
/// Edges are the binding pairs in order of fixing, δ is the pairwise table and
/// L(n,m) = α_n − α_m for every pair.
CentroidTree limit_tree(const DualPolytope& polytope);

/// α with α_1 = 0 and α_n − α_m = L(n,m) along the tree edges.
std::vector<Rational> tree_alpha(const CentroidTree& tree);

struct CentroidResult {
  DualPair dual;
  std::vector<Rational> alpha;
  CentroidTree tree;
  DualPolytope polytope;  ///< over the components of the union graph
};

/// ε→0 limit of the entropic dual optimizers, normalized φ(x0) = 0.
CentroidResult centroid(const TransportPlan& gamma, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        const CostMatrix& c, std::size_t x0 = 0);

}  // namespace otdual
