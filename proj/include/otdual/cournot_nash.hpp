#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "otdual/entropic.hpp"
#include "otdual/expression.hpp"

namespace otdual {

/// Congestion terms f_j with antiderivatives F_j (F_j(0) = 0).
struct Congestion {
  enum class Kind { kNone, kPower, kTable };
  Kind kind = Kind::kNone;
  double exponent = 1;     ///< power: f_j(x) = coefficient * x^exponent
  double coefficient = 1;
  /// table: values[j][s] = f_j(s / (values[j].size() - 1)), linear in between
  std::vector<std::vector<double>> values;

  double f(std::size_t j, double x) const;
  double F(std::size_t j, double x) const;
};

/// Admissible cost vectors K.
struct AdmissibleSet {
  enum class Kind { kAll, kNonnegative, kBox, kSlice };
  Kind kind = Kind::kAll;
  std::vector<double> lower, upper;          ///< box
  std::vector<std::optional<double>> fixed;  ///< slice: fixed coordinates, nullopt = free

  bool contains(const std::vector<double>& k, double tol = 1e-12) const;
};

struct Objective {
  enum class Kind { kSumOfSquares, kExpression };
  Kind kind = Kind::kSumOfSquares;
  Expression expr;

  double value(const std::vector<double>& nu, const std::vector<double>& k) const;
  bool depends_on_k() const { return kind == Kind::kExpression && expr.depends_on_k(); }
};

struct GameSpec {
  CostMatrix cost;
  Congestion congestion;
  Table<double> theta;  ///< symmetric n_Y x n_Y interaction
  AdmissibleSet admissible;
  Objective objective;

  std::size_t actions() const { return cost.cols(); }
  /// Checks symmetry of θ, dimensions, and monotonicity of f_j on a grid.
  void validate() const;
};

/// θ_aj = g(|a − j|) using the first n entries of g.
Table<double> toeplitz_interaction(const std::vector<double>& g, std::size_t n);

Table<double> agent_cost(const GameSpec& spec, const std::vector<double>& nu, const std::vector<double>& k);
double energy(const GameSpec& spec, const std::vector<double>& nu);
std::vector<double> energy_gradient(const GameSpec& spec, const std::vector<double>& nu);

struct BestResponseOptions {
  double epsilon = 1e-2;
  double tol = 1e-7;  ///< bound on max_j ν_j |g_j − ⟨ν, g⟩|
  std::size_t max_iter = 50000;
};

struct BestResponse {
  std::vector<double> nu;
  Table<double> plan;
  std::vector<double> psi;  ///< smoothed OT subgradient at nu
  double objective = 0;     ///< OT_ε + k·ν + ℰ
  std::size_t iterations = 0;
  double residual = 0;
  bool converged = false;
};

/// Minimizer of OT_ε(μ, ν) + k·ν + ℰ[ν] over the simplex by mirror descent.
BestResponse best_response(const GameSpec& spec, const DiscreteMeasure& mu, const std::vector<double>& k,
                           const BestResponseOptions& options = {}, const std::vector<double>* start = nullptr);

/// ψ^ε for (μ, ν), normalized so φ^ε(x0) = 0. ν must be strictly positive.
std::vector<double> ot_subdifferential_element(const DiscreteMeasure& mu, const std::vector<double>& nu,
                                               const CostMatrix& c, double epsilon, std::size_t x0 = 0);

struct Equilibrium {
  enum class Kind { kCNE, kSCNE };
  Kind kind = Kind::kCNE;
  Table<double> plan;
  std::vector<double> nu;
  std::vector<double> k;
  double value = 0;  ///< principal objective G(ν, k)
  double epsilon = 0;
  std::size_t iterations = 0;
  double residual = 0;
  bool converged = false;
  bool experimental = false;
  std::optional<double> reference_value;  ///< G with the centroid choice of k (k-dependent solver only)
};

/// Cournot-Nash equilibrium for fixed k.
Equilibrium solve_cne(const GameSpec& spec, const DiscreteMeasure& mu, const std::vector<double>& k,
                      const BestResponseOptions& options = {});

/// Stackelberg-Cournot-Nash equilibrium for an objective that does not depend on k.
Equilibrium solve_scne_k_independent(const GameSpec& spec, const DiscreteMeasure& mu,
                                     const BestResponseOptions& options = {});

struct ExperimentalOptions {
  unsigned grid = 8;  ///< simplex grid resolution (interior points only)
  std::size_t max_points = 5000;
  unsigned sweeps = 4;
};

/// k-dependent objective: search over a rational simplex grid, choosing at every grid
/// point the best k in (−∂OT − ∇ℰ) ∩ K over the exact dual polytope.
Equilibrium solve_scne_experimental(const GameSpec& spec, const DiscreteMeasure& mu,
                                    const ExperimentalOptions& options = {});

/// Shifts k by a constant so that it lies in K. Throws kInconsistent when no shift works.
std::vector<double> shift_into(const AdmissibleSet& K, std::vector<double> k);

/// max_j ν_j |g_j − ⟨ν,g⟩| with g = ψ^ε(ν) + k + ∇ℰ(ν).
double variational_residual(const GameSpec& spec, const DiscreteMeasure& mu, const std::vector<double>& nu,
                            const std::vector<double>& k, double epsilon);

struct CneCheck {
  bool ok = false;
  double marginal_error = 0;  ///< max |row sums − μ|
  double residual = 0;        ///< variational first-order residual
  double cost_gap = 0;        ///< plan cost minus exact OT of its normalized marginals
};

CneCheck check_cne(const GameSpec& spec, const DiscreteMeasure& mu, const Table<double>& plan,
                   const std::vector<double>& k, double tol, double epsilon = 1e-1);

}  // namespace otdual
