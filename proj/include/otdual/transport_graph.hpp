#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "otdual/measures.hpp"

namespace otdual {

using Edge = std::pair<std::size_t, std::size_t>;  // (x index, y index)

/// Bipartite graph on X ∪ Y. Edges are kept sorted and unique.
class SupportGraph {
 public:
  SupportGraph() = default;
  SupportGraph(std::vector<std::string> left, std::vector<std::string> right, std::vector<Edge> edges);

  std::size_t left_size() const noexcept { return left_.size(); }
  std::size_t right_size() const noexcept { return right_.size(); }
  const std::vector<std::string>& left() const noexcept { return left_; }
  const std::vector<std::string>& right() const noexcept { return right_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  bool has_edge(std::size_t x, std::size_t y) const;

  friend bool operator==(const SupportGraph&, const SupportGraph&) = default;

 private:
  std::vector<std::string> left_;
  std::vector<std::string> right_;
  std::vector<Edge> edges_;
};

struct Component {
  std::vector<std::size_t> xs;  ///< sorted
  std::vector<std::size_t> ys;  ///< sorted
  friend bool operator==(const Component&, const Component&) = default;
};

struct ComponentPartition {
  std::vector<Component> components;

  std::size_t size() const noexcept { return components.size(); }
  const Component& operator[](std::size_t n) const { return components.at(n); }
  /// Component index of each x (resp. y).
  std::vector<std::size_t> x_owner(std::size_t n_x) const;
  std::vector<std::size_t> y_owner(std::size_t n_y) const;
  friend bool operator==(const ComponentPartition&, const ComponentPartition&) = default;
};

struct Vertex {
  bool right = false;  ///< false: an atom of X, true: an atom of Y
  std::size_t index = 0;
  friend bool operator==(const Vertex&, const Vertex&) = default;
};

SupportGraph support_graph(const TransportPlan& gamma, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Components sorted by smallest X index (components without X atoms go last).
ComponentPartition connected_components(const SupportGraph& g);

/// Moves the component holding x0 to the front, keeping the others in order.
ComponentPartition anchor_first(ComponentPartition partition, std::size_t x0);

/// Asserts μ(X_n) = ν(Y_n) for every component (kInconsistent otherwise).
void check_balanced(const ComponentPartition& partition, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// BFS ordering from `root` with neighbours visited in index order. With `within`,
/// only that vertex set is explored and must be connected. Throws kInvalidArgument
/// when the explored graph is disconnected.
std::vector<Vertex> connected_ordering(const SupportGraph& g, Vertex root,
                                       const std::optional<Component>& within = std::nullopt);

/// Unique dual of the problem restricted to one connected component, obtained by
/// propagating φ(x)+ψ(y)=c(x,y) along a BFS ordering from `x_anchor` (φ(x_anchor)=0).
/// Entries are indexed like component.xs / component.ys. Throws kInconsistent if the
/// edges over-determine the potentials inconsistently.
DualPair component_dual(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                        const Component& component, const SupportGraph& g, std::size_t x_anchor);

/// Per-component base duals and cross slacks U(n,m) = min_{X_n × Y_m} c - φ_n - ψ_m.
struct ComponentSlack {
  ComponentPartition partition;
  std::vector<std::size_t> anchors;  ///< x0 for component 0, smallest x otherwise
  std::vector<DualPair> base;
  Table<Rational> upper;  ///< diagonal entries are 0
};

/// Requires g connected on every component of `partition`; checks that no dual
/// optimizer can be excluded by in-component slack (kInconsistent otherwise).
ComponentSlack component_slack(const ComponentPartition& partition, const SupportGraph& g, const DiscreteMeasure& mu,
                               const DiscreteMeasure& nu, const CostMatrix& c, std::size_t x0);

/// Shortest-path closure of the difference constraints α_n - α_m ≤ U(n,m).
/// Throws kInconsistent on a negative cycle (no dual optimizer exists).
Table<Rational> difference_closure(const Table<Rational>& upper);

/// Cells tight for every dual optimizer described by `slack` (same-component cells with
/// zero slack, cross cells whose slack equals a forced difference).
SupportGraph tight_for_all(const ComponentSlack& slack, const Table<Rational>& closure, const CostMatrix& c,
                           std::vector<std::string> left, std::vector<std::string> right);

/// Union of the supports of all primal optimizers.
SupportGraph union_graph(const TransportPlan& gamma, const DualPair& dual, const DiscreteMeasure& mu,
                         const DiscreteMeasure& nu, const CostMatrix& c);

}  // namespace otdual
