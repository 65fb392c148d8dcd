#include "otdual/cournot_nash.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>

namespace otdual {

double Congestion::f(std::size_t j, double x) const {
  switch (kind) {
    case Kind::kNone: return 0;
    case Kind::kPower: return coefficient * std::pow(std::max(x, 0.0), exponent);
    case Kind::kTable: {
      const auto& v = values.at(j);
      double pos = std::clamp(x, 0.0, 1.0) * static_cast<double>(v.size() - 1);
      std::size_t s = std::min(static_cast<std::size_t>(pos), v.size() - 2);
      double w = pos - static_cast<double>(s);
      return v[s] * (1 - w) + v[s + 1] * w;
    }
  }
  return 0;
}

double Congestion::F(std::size_t j, double x) const {
  switch (kind) {
    case Kind::kNone: return 0;
    case Kind::kPower: return coefficient * std::pow(std::max(x, 0.0), exponent + 1) / (exponent + 1);
    case Kind::kTable: {
      const auto& v = values.at(j);
      const double h = 1.0 / static_cast<double>(v.size() - 1);
      double xc = std::clamp(x, 0.0, 1.0), total = 0;
      for (std::size_t s = 0; s + 1 < v.size(); ++s) {
        double a = static_cast<double>(s) * h;
        if (xc <= a) break;
        double b = std::min(xc, a + h);
        total += 0.5 * (f(j, a) + f(j, b)) * (b - a);
      }
      return total;
    }
  }
  return 0;
}

bool AdmissibleSet::contains(const std::vector<double>& k, double tol) const {
  switch (kind) {
    case Kind::kAll: return true;
    case Kind::kNonnegative:
      return std::all_of(k.begin(), k.end(), [&](double v) { return v >= -tol; });
    case Kind::kBox:
      for (std::size_t j = 0; j < k.size(); ++j)
        if (k[j] < lower.at(j) - tol || k[j] > upper.at(j) + tol) return false;
      return true;
    case Kind::kSlice:
      for (std::size_t j = 0; j < k.size(); ++j)
        if (fixed.at(j) && std::abs(k[j] - *fixed[j]) > tol) return false;
      return true;
  }
  return false;
}

double Objective::value(const std::vector<double>& nu, const std::vector<double>& k) const {
  if (kind == Kind::kSumOfSquares) {
    double s = 0;
    for (double v : nu) s += v * v;
    return s;
  }
  return expr.evaluate(nu, k);
}

void GameSpec::validate() const {
  const std::size_t n = actions();
  if (theta.rows() != n || theta.cols() != n)
    fail(ErrorCode::kInvalidArgument, "interaction.dimensions", "interaction matrix must be n_Y x n_Y");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(theta(a, j) - theta(j, a)) > 1e-12)
        fail(ErrorCode::kInvalidArgument, "interaction.symmetric", "interaction matrix must be symmetric");
  if (congestion.kind == Congestion::Kind::kTable) {
    if (congestion.values.size() != n)
      fail(ErrorCode::kInvalidArgument, "congestion.table", "one congestion table per action required");
    for (const auto& v : congestion.values)
      if (v.size() < 2) fail(ErrorCode::kInvalidArgument, "congestion.table", "tables need at least two points");
  }
  if (congestion.kind == Congestion::Kind::kPower && !(congestion.exponent >= 0))
    fail(ErrorCode::kInvalidArgument, "congestion.exponent", "power exponent must be nonnegative");
  for (std::size_t j = 0; j < n; ++j)
    for (int s = 0; s < 100; ++s)
      if (congestion.f(j, (s + 1) / 100.0) < congestion.f(j, s / 100.0) - 1e-12)
        fail(ErrorCode::kInvalidArgument, "congestion.monotone", "congestion functions must be nondecreasing");
  switch (admissible.kind) {
    case AdmissibleSet::Kind::kBox:
      if (admissible.lower.size() != n || admissible.upper.size() != n)
        fail(ErrorCode::kInvalidArgument, "K.box", "box bounds must have n_Y entries");
      break;
    case AdmissibleSet::Kind::kSlice:
      if (admissible.fixed.size() != n) fail(ErrorCode::kInvalidArgument, "K.slice", "slice must have n_Y entries");
      break;
    default: break;
  }
}

Table<double> toeplitz_interaction(const std::vector<double>& g, std::size_t n) {
  if (g.size() < n)
    fail(ErrorCode::kInvalidArgument, "interaction.toeplitz", "g needs at least n_Y entries (lags 0..n_Y-1)");
  Table<double> theta(n, n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t j = 0; j < n; ++j) theta(a, j) = g[a > j ? a - j : j - a];
  return theta;
}

namespace {

void check_length(const std::vector<double>& v, std::size_t n, const char* what) {
  if (v.size() != n)
    fail(ErrorCode::kInvalidArgument, what, std::string(what) + " must have " + std::to_string(n) + " entries");
}

std::vector<double> interaction_term(const GameSpec& spec, const std::vector<double>& nu) {
  const std::size_t n = spec.actions();
  std::vector<double> out(n, 0.0);
  if (spec.theta.empty()) return out;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t a = 0; a < n; ++a) out[j] += spec.theta(a, j) * nu[a];
  return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double weighted_residual(const std::vector<double>& nu, const std::vector<double>& g) {
  double mean = dot(nu, g), r = 0;
  for (std::size_t j = 0; j < nu.size(); ++j) r = std::max(r, nu[j] * std::abs(g[j] - mean));
  return r;
}

struct Descent {
  std::vector<double> x;
  double value = 0;
  std::size_t iterations = 0;
  double residual = 0;
  bool converged = false;
};

// Exponentiated-gradient descent with the mirror-descent sufficient-decrease test.
// `evaluate` returns f(x) and fills the gradient.
Descent mirror_descent(const std::function<double(const std::vector<double>&, std::vector<double>&)>& evaluate,
                       std::vector<double> x, double tol, std::size_t max_iter) {
  const std::size_t n = x.size();
  std::vector<double> g(n), gt(n), trial(n);
  Descent out;
  double fx = evaluate(x, g);
  double eta = 1.0;
  for (std::size_t it = 0;; ++it) {
    out.iterations = it;
    out.residual = weighted_residual(x, g);
    if (out.residual <= tol) {
      out.converged = true;
      break;
    }
    if (it >= max_iter) break;
    double gmin = *std::min_element(g.begin(), g.end());
    bool accepted = false;
    while (eta > 1e-14) {
      double total = 0;
      for (std::size_t j = 0; j < n; ++j) {
        trial[j] = x[j] * std::exp(-eta * (g[j] - gmin));
        total += trial[j];
      }
      double kl = 0;
      for (std::size_t j = 0; j < n; ++j) {
        trial[j] = std::max(trial[j] / total, 1e-250);
        kl += trial[j] * std::log(trial[j] / x[j]);
      }
      double ft;
      try {
        ft = evaluate(trial, gt);
      } catch (const Error& e) {
        // extreme trial points can defeat the inner solver; treat them as a failed step
        if (e.code() != ErrorCode::kNonConvergence) throw;
        eta *= 0.5;
        continue;
      }
      double model = fx + dot(g, trial) - dot(g, x) + kl / eta;
      if (ft <= model + 1e-13 * (1 + std::abs(fx))) {
        x = trial;
        g = gt;
        fx = ft;
        eta *= 1.5;
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) {
      out.residual = weighted_residual(x, g);
      break;
    }
  }
  out.x = std::move(x);
  out.value = fx;
  return out;
}

double congestion_slope(const Congestion& cg, std::size_t j, double x) {
  const double h = 1e-6;
  double lo = std::max(x - h, 0.0), hi = x + h;
  return (cg.f(j, hi) - cg.f(j, lo)) / (hi - lo);
}

// Newton direction on {Σ dν = 0}. The smoothed transport Hessian is ε S⁺ with
// S = diag(ν) − Pᵀ diag(μ)⁻¹ P, so it enters through S dψ = ε dν instead of a pseudo-inverse.
struct NewtonStep {
  std::vector<double> dnu, dpsi;
};

std::optional<NewtonStep> newton_direction(const Table<double>& plan, const std::vector<double>& mu,
                                           const std::vector<double>& g, const Eigen::MatrixXd& he, double eps) {
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    if (!(mu[i] > 0)) continue;
    for (Eigen::Index a = 0; a < n; ++a) {
      S(a, a) += plan(i, static_cast<std::size_t>(a));
      for (Eigen::Index b = 0; b < n; ++b)
        S(a, b) -= plan(i, static_cast<std::size_t>(a)) * plan(i, static_cast<std::size_t>(b)) / mu[i];
    }
  }
  // unknowns (dν, dψ, λ)
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n + 2, 2 * n + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * n + 2);
  A.block(0, n, n, n) = S;
  A.block(0, 0, n, n) -= eps * Eigen::MatrixXd::Identity(n, n);
  A.block(n, 0, n, n) = he;
  A.block(n, n, n, n) += Eigen::MatrixXd::Identity(n, n);
  A.block(n, 2 * n, n, 1).setConstant(-1.0);
  for (Eigen::Index j = 0; j < n; ++j) rhs(n + j) = -g[static_cast<std::size_t>(j)];
  A.block(2 * n, 0, 1, n).setOnes();
  A(2 * n + 1, n) = 1.0;
  Eigen::VectorXd z = A.colPivHouseholderQr().solve(rhs);
  if (!z.allFinite() || (A * z - rhs).norm() > 1e-8 * (1 + rhs.norm())) return std::nullopt;
  NewtonStep step{std::vector<double>(g.size()), std::vector<double>(g.size())};
  for (Eigen::Index j = 0; j < n; ++j) {
    step.dnu[static_cast<std::size_t>(j)] = z(j);
    step.dpsi[static_cast<std::size_t>(j)] = z(n + j);
  }
  if (!(dot(step.dnu, g) < 0)) return std::nullopt;
  return step;
}

std::vector<double> positive_simplex(std::vector<double> nu) {
  double total = 0;
  for (double& v : nu) {
    v = std::max(v, 1e-15);
    total += v;
  }
  for (double& v : nu) v /= total;
  return nu;
}

}  // namespace

Table<double> agent_cost(const GameSpec& spec, const std::vector<double>& nu, const std::vector<double>& k) {
  const std::size_t n = spec.actions();
  check_length(nu, n, "nu");
  check_length(k, n, "k");
  auto inter = interaction_term(spec, nu);
  Table<double> out(spec.cost.rows(), n, 0.0);
  for (std::size_t i = 0; i < spec.cost.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j)
      out(i, j) = spec.cost(i, j).get_d() + k[j] + spec.congestion.f(j, nu[j]) + inter[j];
  return out;
}

double energy(const GameSpec& spec, const std::vector<double>& nu) {
  check_length(nu, spec.actions(), "nu");
  auto inter = interaction_term(spec, nu);
  double e = 0;
  for (std::size_t j = 0; j < nu.size(); ++j) e += spec.congestion.F(j, nu[j]) + 0.5 * inter[j] * nu[j];
  return e;
}

std::vector<double> energy_gradient(const GameSpec& spec, const std::vector<double>& nu) {
  check_length(nu, spec.actions(), "nu");
  auto grad = interaction_term(spec, nu);
  for (std::size_t j = 0; j < nu.size(); ++j) grad[j] += spec.congestion.f(j, nu[j]);
  return grad;
}

namespace {

// Gibbs plan with first marginal μ and column potential ψ; its second marginal is the
// ν for which (φ, ψ) solves the smoothed transport problem, so no Sinkhorn solve is needed.
struct GibbsPoint {
  Table<double> plan;
  std::vector<double> phi, psi, nu;
  double ot = 0;
};

GibbsPoint gibbs_point(const std::vector<double>& mu, const Table<double>& c, const std::vector<double>& psi,
                       double eps) {
  const std::size_t m = c.rows(), n = c.cols();
  GibbsPoint p{Table<double>(m, n, 0.0), std::vector<double>(m, 0.0), psi, std::vector<double>(n, 0.0), 0};
  std::vector<double> a(n);
  double mass = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!(mu[i] > 0)) continue;
    double top = -std::numeric_limits<double>::infinity(), sum = 0;
    for (std::size_t j = 0; j < n; ++j) top = std::max(top, a[j] = (psi[j] - c(i, j)) / eps);
    for (std::size_t j = 0; j < n; ++j) sum += std::exp(a[j] - top);
    double lse = top + std::log(sum);
    p.phi[i] = eps * (std::log(mu[i]) - lse);
    for (std::size_t j = 0; j < n; ++j) {
      p.plan(i, j) = mu[i] * std::exp(a[j] - lse);
      p.nu[j] += p.plan(i, j);
      mass += p.plan(i, j);
    }
  }
  p.ot = dot(p.phi, mu) + dot(p.psi, p.nu) - eps * mass;
  return p;
}

}  // namespace

BestResponse best_response(const GameSpec& spec, const DiscreteMeasure& mu, const std::vector<double>& k,
                           const BestResponseOptions& options, const std::vector<double>* start) {
  const std::size_t n = spec.actions();
  if (mu.size() != spec.cost.rows()) fail(ErrorCode::kInvalidArgument, "dimensions", "mu does not match the cost");
  check_length(k, n, "k");
  if (!(options.epsilon > 0)) fail(ErrorCode::kInvalidArgument, "epsilon", "epsilon must be positive");
  if (!(options.tol > 0)) fail(ErrorCode::kInvalidArgument, "tol", "tolerance must be positive");

  const auto mu_d = to_double(mu.weights());
  const auto c = to_double(spec.cost.entries());
  const double eps = options.epsilon;

  // The best response is parameterized by ψ; optimality is ψ = −(k + ∇ℰ(ν)) up to a constant.
  struct State {
    GibbsPoint p;
    std::vector<double> g;
    double f = 0;
  };
  auto evaluate = [&](const std::vector<double>& psi) {
    State s{gibbs_point(mu_d, c, psi, eps), {}, 0};
    auto de = energy_gradient(spec, s.p.nu);
    s.g.resize(n);
    for (std::size_t j = 0; j < n; ++j) s.g[j] = psi[j] + k[j] + de[j];
    s.f = s.p.ot + dot(k, s.p.nu) + energy(spec, s.p.nu);
    for (double v : s.g)
      if (!std::isfinite(v) || !std::isfinite(s.f))
        fail(ErrorCode::kNumericalRange, "best_response.finite", "non-finite value in the best-response iteration");
    return s;
  };
  auto hessian = [&](const std::vector<double>& nu) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < n; ++a) {
      auto ia = static_cast<Eigen::Index>(a);
      h(ia, ia) += congestion_slope(spec.congestion, a, nu[a]);
      if (!spec.theta.empty())
        for (std::size_t b = 0; b < n; ++b) h(ia, static_cast<Eigen::Index>(b)) += spec.theta(a, b);
    }
    return h;
  };

  std::vector<double> nu0(n, 1.0 / static_cast<double>(n));
  if (start) {
    check_length(*start, n, "start");
    nu0 = positive_simplex(*start);
  }
  std::vector<double> psi = energy_gradient(spec, nu0);
  for (std::size_t j = 0; j < n; ++j) psi[j] = -(psi[j] + k[j]);
  State cur = evaluate(psi);

  // damped Newton; steepest descent in ψ (ν moves along −S g) when the Newton system fails
  BestResponse out;
  for (std::size_t it = 0;; ++it) {
    out.iterations = it;
    out.residual = weighted_residual(cur.p.nu, cur.g);
    if (out.residual <= options.tol) {
      out.converged = true;
      break;
    }
    if (it >= options.max_iter) break;
    std::vector<double> dpsi;
    double slope = 0;
    if (auto step = newton_direction(cur.p.plan, mu_d, cur.g, hessian(cur.p.nu), eps)) {
      dpsi = step->dpsi;
      slope = dot(cur.g, step->dnu);
    } else {
      dpsi.assign(n, 0.0);
      double mean = dot(cur.p.nu, cur.g);
      for (std::size_t j = 0; j < n; ++j) dpsi[j] = -(cur.g[j] - mean);
      // dν = S dψ / ε
      for (std::size_t j = 0; j < n; ++j) slope += cur.g[j] * cur.p.nu[j] * dpsi[j];
      for (std::size_t i = 0; i < cur.p.plan.rows(); ++i) {
        if (!(mu_d[i] > 0)) continue;
        double a = 0, b = 0;
        for (std::size_t j = 0; j < n; ++j) {
          a += cur.p.plan(i, j) * cur.g[j];
          b += cur.p.plan(i, j) * dpsi[j];
        }
        slope -= a * b / mu_d[i];
      }
      slope /= eps;
    }
    bool accepted = false;
    if (slope < 0) {
      std::vector<double> trial(n);
      double t = 1.0;
      for (int tries = 0; tries < 60 && !accepted; ++tries, t *= 0.5) {
        for (std::size_t j = 0; j < n; ++j) trial[j] = psi[j] + t * dpsi[j];
        State next;
        try {
          next = evaluate(trial);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kNumericalRange) throw;
          continue;
        }
        if (next.f <= cur.f + 1e-4 * t * slope + 1e-13 * (1 + std::abs(cur.f))) {
          psi = trial;
          cur = std::move(next);
          accepted = true;
        }
      }
    }
    if (!accepted) break;
  }

  // report potentials with φ = 0 at the first atom that carries mass
  std::size_t x0 = 0;
  while (x0 + 1 < mu_d.size() && !(mu_d[x0] > 0)) ++x0;
  double shift = cur.p.phi[x0];
  for (double& v : cur.p.psi) v += shift;
  out.nu = cur.p.nu;
  out.plan = cur.p.plan;
  out.psi = cur.p.psi;
  out.objective = cur.f;
  out.residual = weighted_residual(cur.p.nu, cur.g);
  return out;
}

std::vector<double> ot_subdifferential_element(const DiscreteMeasure& mu, const std::vector<double>& nu,
                                               const CostMatrix& c, double epsilon, std::size_t x0) {
  if (nu.size() != c.cols() || mu.size() != c.rows())
    fail(ErrorCode::kInvalidArgument, "dimensions", "marginals do not match the cost");
  for (double v : nu)
    if (!(v > 0))
      fail(ErrorCode::kInvalidArgument, "nu.interior",
           "nu lies on the simplex boundary; the subdifferential may be empty there");
  SinkhornOptions o;
  o.tol = 1e-12;
  auto s = sinkhorn(to_double(mu.weights()), nu, to_double(c.entries()), epsilon, o, x0);
  if (!s.converged && !(s.residual <= 1e-9))
    fail(ErrorCode::kNonConvergence, "sinkhorn.converged", "Sinkhorn did not converge");
  return s.psi;
}

double variational_residual(const GameSpec& spec, const DiscreteMeasure& mu, const std::vector<double>& nu,
                            const std::vector<double>& k, double epsilon) {
  const std::size_t n = spec.actions();
  check_length(nu, n, "nu");
  check_length(k, n, "k");
  auto inner = positive_simplex(nu);
  auto psi = ot_subdifferential_element(mu, inner, spec.cost, epsilon);
  auto de = energy_gradient(spec, nu);
  std::vector<double> g(n);
  for (std::size_t j = 0; j < n; ++j) g[j] = psi[j] + k[j] + de[j];
  return weighted_residual(nu, g);
}

Equilibrium solve_cne(const GameSpec& spec, const DiscreteMeasure& mu, const std::vector<double>& k,
                      const BestResponseOptions& options) {
  BestResponse br = best_response(spec, mu, k, options);
  Equilibrium eq;
  eq.kind = Equilibrium::Kind::kCNE;
  eq.plan = br.plan;
  eq.nu = br.nu;
  eq.k = k;
  eq.value = spec.objective.value(br.nu, k);
  eq.epsilon = options.epsilon;
  eq.iterations = br.iterations;
  eq.residual = br.residual;
  eq.converged = br.converged;
  return eq;
}

std::vector<double> shift_into(const AdmissibleSet& K, std::vector<double> k) {
  double s = 0;
  switch (K.kind) {
    case AdmissibleSet::Kind::kAll: break;
    case AdmissibleSet::Kind::kNonnegative:
      s = std::max(0.0, -*std::min_element(k.begin(), k.end()));
      break;
    case AdmissibleSet::Kind::kBox: {
      double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k.size(); ++j) {
        lo = std::max(lo, K.lower.at(j) - k[j]);
        hi = std::min(hi, K.upper.at(j) - k[j]);
      }
      if (lo > hi + 1e-12) fail(ErrorCode::kInconsistent, "K.empty", "no translate of k lies in the box K");
      s = std::clamp(0.0, lo, std::max(lo, hi));
      break;
    }
    case AdmissibleSet::Kind::kSlice: {
      bool first = true;
      for (std::size_t j = 0; j < k.size(); ++j) {
        if (!K.fixed.at(j)) continue;
        double need = *K.fixed[j] - k[j];
        if (first) {
          s = need;
          first = false;
        } else if (std::abs(need - s) > 1e-9) {
          fail(ErrorCode::kInconsistent, "K.empty", "no translate of k matches every fixed coordinate of K");
        }
      }
      break;
    }
  }
  for (double& v : k) v += s;
  return k;
}

Equilibrium solve_scne_k_independent(const GameSpec& spec, const DiscreteMeasure& mu,
                                     const BestResponseOptions& options) {
  if (spec.objective.depends_on_k())
    fail(ErrorCode::kInvalidArgument, "objective.k_dependent",
         "objective depends on k; use the experimental solver for k-dependent objectives");
  const std::size_t n = spec.actions();
  if (mu.size() != spec.cost.rows()) fail(ErrorCode::kInvalidArgument, "dimensions", "mu does not match the cost");

  Equilibrium eq;
  eq.kind = Equilibrium::Kind::kSCNE;
  eq.epsilon = options.epsilon;
  std::vector<double> nu(n, 1.0 / static_cast<double>(n));
  if (spec.objective.kind == Objective::Kind::kSumOfSquares) {
    eq.converged = true;
  } else {
    const std::vector<double> zero_k(n, 0.0);
    auto evaluate = [&](const std::vector<double>& x, std::vector<double>& grad) {
      std::vector<double> y = x;
      for (std::size_t j = 0; j < n; ++j) {
        double h = 1e-6 * std::max(1.0, std::abs(x[j]));
        y[j] = x[j] + h;
        double up = spec.objective.value(y, zero_k);
        y[j] = x[j] - h;
        double down = spec.objective.value(y, zero_k);
        y[j] = x[j];
        grad[j] = (up - down) / (2 * h);
      }
      double v = spec.objective.value(x, zero_k);
      if (!std::isfinite(v)) fail(ErrorCode::kNumericalRange, "objective.finite", "objective is not finite");
      return v;
    };
    Descent d = mirror_descent(evaluate, nu, options.tol, options.max_iter);
    nu = d.x;
    eq.iterations = d.iterations;
    eq.converged = d.converged;
  }
  if (*std::min_element(nu.begin(), nu.end()) < 1e-8)
    fail(ErrorCode::kInconsistent, "scne.boundary",
         "the minimizer of G lies on the simplex boundary; the subdifferential construction needs an interior point");

  auto psi = ot_subdifferential_element(mu, nu, spec.cost, options.epsilon);
  auto de = energy_gradient(spec, nu);
  std::vector<double> k(n);
  for (std::size_t j = 0; j < n; ++j) k[j] = -psi[j] - de[j];
  k = shift_into(spec.admissible, std::move(k));

  SinkhornOptions o;
  o.tol = 1e-12;
  eq.plan = sinkhorn(to_double(mu.weights()), nu, to_double(spec.cost.entries()), options.epsilon, o).plan;
  eq.nu = nu;
  eq.k = k;
  eq.value = spec.objective.value(nu, k);
  eq.residual = variational_residual(spec, mu, nu, k, options.epsilon);
  return eq;
}

namespace {

void compositions(unsigned total, std::size_t parts, std::vector<unsigned>& cur, std::vector<std::vector<unsigned>>& out,
                  std::size_t limit) {
  if (out.size() > limit) return;
  if (parts == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (unsigned first = 1; first + parts - 1 <= total; ++first) {
    cur.push_back(first);
    compositions(total - first, parts - 1, cur, out, limit);
    cur.pop_back();
  }
}

// Minimizes a 1-D function on [lo, hi] by sampling followed by golden-section refinement.
double line_minimize(const std::function<double(double)>& f, double lo, double hi) {
  if (!(hi > lo)) return lo;
  const int samples = 32;
  double best_x = lo, best_f = f(lo);
  for (int s = 1; s <= samples; ++s) {
    double x = lo + (hi - lo) * s / samples;
    double v = f(x);
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
  }
  double step = (hi - lo) / samples;
  double a = std::max(lo, best_x - step), b = std::min(hi, best_x + step);
  const double r = (std::sqrt(5.0) - 1) / 2;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    }
  }
  double x = f1 < f2 ? x1 : x2;
  return std::min(f1, f2) < best_f ? x : best_x;
}

}  // namespace

Equilibrium solve_scne_experimental(const GameSpec& spec, const DiscreteMeasure& mu,
                                    const ExperimentalOptions& options) {
  const std::size_t n = spec.actions();
  if (mu.size() != spec.cost.rows()) fail(ErrorCode::kInvalidArgument, "dimensions", "mu does not match the cost");
  if (options.grid < n)
    fail(ErrorCode::kInvalidArgument, "grid", "grid resolution must be at least n_Y for interior points");

  std::vector<std::vector<unsigned>> grid;
  std::vector<unsigned> cur;
  compositions(options.grid, n, cur, grid, options.max_points);
  if (grid.size() > options.max_points)
    fail(ErrorCode::kInvalidArgument, "grid", "simplex grid exceeds the configured point budget");

  const auto& K = spec.admissible;
  double best_value = std::numeric_limits<double>::infinity();
  std::optional<double> reference;
  std::vector<double> best_nu, best_k;
  Table<double> best_plan;

  for (const auto& counts : grid) {
    std::vector<Rational> w;
    std::vector<double> nu;
    for (unsigned cnt : counts) {
      w.emplace_back(cnt, options.grid);
      w.back().canonicalize();
      nu.push_back(static_cast<double>(cnt) / options.grid);
    }
    DiscreteMeasure nu_r(w);
    TransportSolution sol = solve(mu, nu_r, spec.cost);
    DualPolytope poly = merge_forced(characterize_duals(sol.plan, mu, nu_r, spec.cost), mu, nu_r);
    const auto de = energy_gradient(spec, nu);
    const std::size_t N = poly.size();
    const Table<Rational> closure = poly.closure();

    // k(α, s) = −ψ(α) − ∇ℰ + s.
    auto k_of = [&](const std::vector<double>& alpha, double s) {
      std::vector<double> k(n);
      for (std::size_t m = 0; m < N; ++m) {
        const auto& comp = poly.partition()[m];
        for (std::size_t b = 0; b < comp.ys.size(); ++b)
          k[comp.ys[b]] = -(poly.base_duals()[m].psi[b].get_d() - alpha[m]) - de[comp.ys[b]] + s;
      }
      return k;
    };
    std::optional<std::size_t> fixed_coord;
    if (K.kind == AdmissibleSet::Kind::kSlice)
      for (std::size_t j = 0; j < n && !fixed_coord; ++j)
        if (K.fixed.at(j)) fixed_coord = j;

    auto s_range = [&](const std::vector<double>& alpha) -> std::pair<double, double> {
      auto k0 = k_of(alpha, 0.0);
      double spread = 0;
      for (double v : k0) spread = std::max(spread, std::abs(v));
      double width = 10.0 * (1.0 + spread);
      switch (K.kind) {
        case AdmissibleSet::Kind::kAll: return {-width, width};
        case AdmissibleSet::Kind::kNonnegative: {
          double lo = -*std::min_element(k0.begin(), k0.end());
          return {lo, lo + width};
        }
        case AdmissibleSet::Kind::kBox: {
          double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
          for (std::size_t j = 0; j < n; ++j) {
            lo = std::max(lo, K.lower[j] - k0[j]);
            hi = std::min(hi, K.upper[j] - k0[j]);
          }
          return {lo, hi};
        }
        case AdmissibleSet::Kind::kSlice: {
          double s = fixed_coord ? *K.fixed[*fixed_coord] - k0[*fixed_coord] : 0.0;
          return {s, s};
        }
      }
      return {0.0, 0.0};
    };
    auto value_at = [&](const std::vector<double>& alpha, double s) {
      auto k = k_of(alpha, s);
      if (!K.contains(k, 1e-9)) return std::numeric_limits<double>::infinity();
      double v = spec.objective.value(nu, k);
      return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    auto best_s = [&](const std::vector<double>& alpha) {
      auto [lo, hi] = s_range(alpha);
      if (lo > hi) return std::numeric_limits<double>::quiet_NaN();
      return line_minimize([&](double s) { return value_at(alpha, s); }, lo, hi);
    };

    // Reference: the centroid dual (the entropic limit) with the best admissible shift.
    {
      std::vector<double> alpha;
      for (const auto& a : tree_alpha(limit_tree(poly))) alpha.push_back(a.get_d());
      double s = best_s(alpha);
      if (!std::isnan(s)) {
        double v = value_at(alpha, s);
        if (std::isfinite(v) && (!reference || v < *reference)) reference = v;
      }
    }

    std::vector<double> alpha(N, 0.0);
    {
      // Start from the feasible midpoint-free choice α = 0 adjusted into the closure bounds.
      for (std::size_t m = 1; m < N; ++m) {
        double lo = -closure(0, m).get_d(), hi = closure(m, 0).get_d();
        for (std::size_t q = 1; q < m; ++q) {
          lo = std::max(lo, alpha[q] - closure(q, m).get_d());
          hi = std::min(hi, alpha[q] + closure(m, q).get_d());
        }
        alpha[m] = std::clamp(0.0, lo, std::max(lo, hi));
      }
    }
    double s = best_s(alpha);
    if (std::isnan(s)) continue;
    double value = value_at(alpha, s);
    for (unsigned sweep = 0; sweep < options.sweeps && N > 1; ++sweep) {
      for (std::size_t m = 1; m < N; ++m) {
        double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
        for (std::size_t q = 0; q < N; ++q) {
          if (q == m) continue;
          lo = std::max(lo, alpha[q] - closure(q, m).get_d());
          hi = std::min(hi, alpha[q] + closure(m, q).get_d());
        }
        auto along = [&](double a) {
          auto trial = alpha;
          trial[m] = a;
          double ts = best_s(trial);
          return std::isnan(ts) ? std::numeric_limits<double>::infinity() : value_at(trial, ts);
        };
        double a = line_minimize(along, lo, hi);
        if (along(a) <= value) {
          alpha[m] = a;
          s = best_s(alpha);
          value = value_at(alpha, s);
        }
      }
    }
    if (value < best_value) {
      best_value = value;
      best_nu = nu;
      best_k = k_of(alpha, s);
      best_plan = to_double(sol.plan.entries());
    }
  }
  if (best_nu.empty())
    fail(ErrorCode::kInconsistent, "K.empty", "no grid point admits a cost vector in K");

  Equilibrium eq;
  eq.kind = Equilibrium::Kind::kSCNE;
  eq.plan = std::move(best_plan);
  eq.nu = std::move(best_nu);
  eq.k = std::move(best_k);
  eq.value = best_value;
  eq.experimental = true;
  eq.converged = true;
  eq.reference_value = reference;
  return eq;
}

CneCheck check_cne(const GameSpec& spec, const DiscreteMeasure& mu, const Table<double>& plan,
                   const std::vector<double>& k, double tol, double epsilon) {
  const std::size_t n = spec.actions();
  if (plan.rows() != mu.size() || plan.cols() != n)
    fail(ErrorCode::kInvalidArgument, "plan.dimensions", "plan dimensions do not match the game");
  check_length(k, n, "k");
  CneCheck out;
  for (double p : plan.data())
    if (!(p >= 0)) return out;

  auto rows = plan.row_sums();
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.marginal_error = std::max(out.marginal_error, std::abs(rows[i] - mu.weight(i).get_d()));

  Table<Rational> exact = from_double(plan);
  auto rs = exact.row_sums(), cs = exact.col_sums();
  Rational total = std::accumulate(rs.begin(), rs.end(), Rational(0));
  if (total <= 0) return out;
  Rational cost = 0;
  for (std::size_t i = 0; i < plan.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j) cost += exact(i, j) * spec.cost(i, j);
  for (auto& v : rs) v /= total;
  for (auto& v : cs) v /= total;
  Rational ot = transport_value(rs, cs, spec.cost.entries());
  out.cost_gap = Rational(cost / total - ot).get_d();

  std::vector<double> nu = to_double(cs);
  out.residual = variational_residual(spec, mu, nu, k, epsilon);
  out.ok = out.marginal_error <= tol && out.residual <= tol && out.cost_gap <= tol;
  return out;
}

}  // namespace otdual
