#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "otdual/error.hpp"
#include "otdual/rational.hpp"

namespace otdual {

/// Finite probability measure: strictly positive exact weights summing to 1.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  /// Throws kInconsistent when a weight is not positive or the sum differs from 1.
  explicit DiscreteMeasure(std::vector<Rational> weights, std::vector<std::string> labels = {});

  std::size_t size() const noexcept { return weights_.size(); }
  const Rational& weight(std::size_t i) const { return weights_.at(i); }
  const std::vector<Rational>& weights() const noexcept { return weights_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }

  friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

 private:
  std::vector<Rational> weights_;
  std::vector<std::string> labels_;
};

/// Labels "1", "2", ... used when an input omits them.
std::vector<std::string> default_labels(std::size_t n);

class CostMatrix {
 public:
  CostMatrix() = default;
  /// Throws kInvalidArgument on a negative entry.
  explicit CostMatrix(Table<Rational> entries);

  std::size_t rows() const noexcept { return entries_.rows(); }
  std::size_t cols() const noexcept { return entries_.cols(); }
  const Rational& operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
  const Table<Rational>& entries() const noexcept { return entries_; }

  friend bool operator==(const CostMatrix&, const CostMatrix&) = default;

 private:
  Table<Rational> entries_;
};

/// Coupling of two measures; marginals are verified exactly on construction.
class TransportPlan {
 public:
  TransportPlan() = default;
  TransportPlan(Table<Rational> entries, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

  std::size_t rows() const noexcept { return entries_.rows(); }
  std::size_t cols() const noexcept { return entries_.cols(); }
  const Rational& operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
  const Table<Rational>& entries() const noexcept { return entries_; }

  friend bool operator==(const TransportPlan&, const TransportPlan&) = default;

 private:
  Table<Rational> entries_;
};

struct DualPair {
  std::vector<Rational> phi;
  std::vector<Rational> psi;

  Rational value(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const;
  bool is_feasible(const CostMatrix& c) const;
  friend bool operator==(const DualPair&, const DualPair&) = default;
};

/// Builds a pair and checks φ_i + ψ_j ≤ c_ij (kInconsistent otherwise).
DualPair make_dual(std::vector<Rational> phi, std::vector<Rational> psi, const CostMatrix& c);

/// Raw result of the transportation simplex on unnormalized data.
struct TransportBasis {
  Table<Rational> flow;
  std::vector<Rational> u;  ///< row potentials, u[0] = 0
  std::vector<Rational> v;  ///< column potentials
  std::vector<std::pair<std::size_t, std::size_t>> basic_cells;
  std::size_t pivots = 0;
};

/// Transportation simplex (northwest-corner start, Bland pivoting) for nonnegative
/// supplies/demands with equal totals. Zero entries are allowed.
TransportBasis solve_transport(const std::vector<Rational>& supply, const std::vector<Rational>& demand,
                               const Table<Rational>& cost);

/// Exact optimal value for unnormalized supplies/demands.
Rational transport_value(const std::vector<Rational>& supply, const std::vector<Rational>& demand,
                         const Table<Rational>& cost);

struct TransportSolution {
  TransportPlan plan;
  DualPair dual;
  Rational value;
};

TransportSolution solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                        std::size_t x0 = 0);
TransportPlan solve_primal(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c);
DualPair solve_dual(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                    std::size_t x0 = 0);

Rational transport_cost(const TransportPlan& gamma, const CostMatrix& c);
bool is_complementary(const TransportPlan& gamma, const DualPair& dual, const CostMatrix& c);

/// Throws kInvalidArgument unless c is |mu| x |nu|.
void check_dimensions(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c);

/// k^c_i = min_j c_ij - k_j.
template <typename T>
std::vector<T> c_transform(const std::vector<T>& k, const Table<T>& c) {
  if (k.size() != c.cols())
    fail(ErrorCode::kInvalidArgument, "dimensions", "c_transform: k has wrong length");
  std::vector<T> out(c.rows());
  for (std::size_t i = 0; i < c.rows(); ++i) {
    T best = c(i, 0) - k[0];
    for (std::size_t j = 1; j < c.cols(); ++j) {
      T candidate = c(i, j) - k[j];
      if (candidate < best) best = candidate;
    }
    out[i] = best;
  }
  return out;
}

inline std::vector<Rational> c_transform(const std::vector<Rational>& k, const CostMatrix& c) {
  return c_transform<Rational>(k, c.entries());
}

}  // namespace otdual
