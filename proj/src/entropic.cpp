#include "otdual/entropic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>

namespace otdual {

double entropy(const Table<double>& gamma) {
  double h = 0;
  for (double g : gamma.data()) {
    if (g < 0) fail(ErrorCode::kInvalidArgument, "entropy.domain", "plan entries must be nonnegative");
    if (g > 0) h += g * (std::log(g) - 1.0);
  }
  return h;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

template <typename F>
double log_sum_exp(std::size_t count, F term) {
  double hi = kNegInf;
  for (std::size_t k = 0; k < count; ++k) hi = std::max(hi, term(k));
  if (hi == kNegInf || !std::isfinite(hi)) return hi;
  double s = 0;
  for (std::size_t k = 0; k < count; ++k) s += std::exp(term(k) - hi);
  return hi + std::log(s);
}

struct Problem {
  std::size_t m, n;
  const std::vector<double>& mu;
  const std::vector<double>& nu;
  std::vector<double> log_mu, log_nu;
  const Table<double>& c;
  double eps;

  double log_plan(const std::vector<double>& phi, const std::vector<double>& psi, std::size_t i, std::size_t j) const {
    return (phi[i] + psi[j] - c(i, j)) / eps;
  }

  void update_phi(std::vector<double>& phi, const std::vector<double>& psi) const {
    for (std::size_t i = 0; i < m; ++i)
      phi[i] = eps * log_mu[i] - eps * log_sum_exp(n, [&](std::size_t j) { return (psi[j] - c(i, j)) / eps; });
  }

  void update_psi(const std::vector<double>& phi, std::vector<double>& psi) const {
    for (std::size_t j = 0; j < n; ++j)
      psi[j] = eps * log_nu[j] - eps * log_sum_exp(m, [&](std::size_t i) { return (phi[i] - c(i, j)) / eps; });
  }

  double residual(const std::vector<double>& phi, const std::vector<double>& psi) const {
    std::vector<double> rows(m, 0.0), cols(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double p = std::exp(log_plan(phi, psi, i, j));
        rows[i] += p;
        cols[j] += p;
      }
    double r = 0;
    for (std::size_t i = 0; i < m; ++i) r = std::max(r, std::abs(rows[i] - mu[i]));
    for (std::size_t j = 0; j < n; ++j) r = std::max(r, std::abs(cols[j] - nu[j]));
    return r;
  }
};

struct Blocks {
  std::vector<std::size_t> of;  // block id per vertex (rows first, then columns)
  std::size_t count = 0;
};

Blocks strong_blocks(const Problem& p, const std::vector<double>& phi, const std::vector<double>& psi, double theta) {
  const std::size_t V = p.m + p.n;
  std::vector<std::size_t> parent(V);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t i = 0; i < p.m; ++i)
    for (std::size_t j = 0; j < p.n; ++j)
      if (p.log_plan(phi, psi, i, j) - std::min(p.log_mu[i], p.log_nu[j]) >= -theta) {
        std::size_t a = find(i), b = find(p.m + j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  Blocks out;
  out.of.assign(V, SIZE_MAX);
  std::vector<std::size_t> id(V, SIZE_MAX);
  for (std::size_t v = 0; v < V; ++v) {
    std::size_t r = find(v);
    if (id[r] == SIZE_MAX) id[r] = out.count++;
    out.of[v] = id[r];
  }
  return out;
}

// Solves the exact block-balance equations log(outflow_k) = log(inflow_k) for block
// translations t (in units of ε) and applies them. Returns the largest |ε t| applied.
double balance_blocks(const Problem& p, const Blocks& blocks, std::vector<double>& phi, std::vector<double>& psi) {
  const std::size_t K = blocks.count;
  Table<double> ell(K, K, kNegInf);
  for (std::size_t i = 0; i < p.m; ++i)
    for (std::size_t j = 0; j < p.n; ++j) {
      std::size_t a = blocks.of[i], b = blocks.of[p.m + j];
      if (a != b) ell(a, b) = log_add(ell(a, b), p.log_plan(phi, psi, i, j));
    }

  auto residual = [&](const std::vector<double>& t, std::vector<double>& r) {
    double worst = 0;
    for (std::size_t k = 0; k < K; ++k) {
      double out = kNegInf, in = kNegInf;
      for (std::size_t l = 0; l < K; ++l) {
        if (l == k) continue;
        out = log_add(out, ell(k, l) + t[k] - t[l]);
        in = log_add(in, ell(l, k) + t[l] - t[k]);
      }
      r[k] = out - in;
      if (!std::isfinite(r[k])) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, std::abs(r[k]));
    }
    return worst;
  };

  std::vector<double> t(K, 0.0), r(K), trial(K), rt(K);
  double merit0 = residual(t, r);
  if (!std::isfinite(merit0)) return 0;
  double merit = merit0;
  for (int iter = 0; iter < 200 && merit > 1e-13; ++iter) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(K - 1, K - 1);
    Eigen::VectorXd rhs(K - 1);
    for (std::size_t k = 1; k < K; ++k) {
      double out = kNegInf, in = kNegInf;
      for (std::size_t l = 0; l < K; ++l) {
        if (l == k) continue;
        out = log_add(out, ell(k, l) + t[k] - t[l]);
        in = log_add(in, ell(l, k) + t[l] - t[k]);
      }
      J(k - 1, k - 1) = 2.0;
      for (std::size_t l = 1; l < K; ++l) {
        if (l == k) continue;
        double q = std::exp(ell(k, l) + t[k] - t[l] - out);
        double s = std::exp(ell(l, k) + t[l] - t[k] - in);
        J(k - 1, l - 1) = -(q + s);
      }
      rhs(k - 1) = -r[k];
    }
    Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(rhs);
    double largest = step.cwiseAbs().maxCoeff();
    if (!std::isfinite(largest) || largest < 1e-15) break;
    double scale = largest > 50.0 ? 50.0 / largest : 1.0;
    bool improved = false;
    for (int halving = 0; halving < 40; ++halving) {
      trial[0] = 0;
      for (std::size_t k = 1; k < K; ++k) trial[k] = t[k] + scale * step(k - 1);
      double mt = residual(trial, rt);
      if (mt < merit) {
        t = trial;
        r = rt;
        merit = mt;
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    if (!improved) break;
  }
  if (!(merit < merit0)) return 0;

  double moved = 0;
  for (std::size_t i = 0; i < p.m; ++i) phi[i] += p.eps * t[blocks.of[i]];
  for (std::size_t j = 0; j < p.n; ++j) psi[j] -= p.eps * t[blocks.of[p.m + j]];
  for (double tk : t) moved = std::max(moved, p.eps * std::abs(tk));
  return moved;
}

double block_step(const Problem& p, std::vector<double>& phi, std::vector<double>& psi) {
  double moved = 0;
  std::vector<std::size_t> previous;
  for (double theta = 4.0; theta < 1e7; theta *= 2.0) {
    Blocks blocks = strong_blocks(p, phi, psi, theta);
    if (blocks.count <= 1) break;
    if (blocks.of == previous) continue;
    previous = blocks.of;

    std::vector<double> d(blocks.count, 0.0);
    std::vector<int> has_x(blocks.count, 0), has_y(blocks.count, 0);
    for (std::size_t i = 0; i < p.m; ++i) {
      d[blocks.of[i]] += p.mu[i];
      has_x[blocks.of[i]] = 1;
    }
    for (std::size_t j = 0; j < p.n; ++j) {
      d[blocks.of[p.m + j]] -= p.nu[j];
      has_y[blocks.of[p.m + j]] = 1;
    }
    bool balanced = true;
    for (std::size_t k = 0; k < blocks.count; ++k)
      if (std::abs(d[k]) > 1e-12 || !has_x[k] || !has_y[k]) balanced = false;
    if (!balanced) continue;
    moved = std::max(moved, balance_blocks(p, blocks, phi, psi));
  }
  return moved;
}

void require_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x))
      fail(ErrorCode::kNumericalRange, "sinkhorn.finite",
           "Sinkhorn potentials left the floating-point range; epsilon is too small for this cost scale");
}

}  // namespace

EntropicSolution sinkhorn(const std::vector<double>& mu, const std::vector<double>& nu, const Table<double>& c,
                          double epsilon, const SinkhornOptions& options, std::size_t x0, const EntropicSolution* warm) {
  if (!(epsilon > 0) || !std::isfinite(epsilon))
    fail(ErrorCode::kInvalidArgument, "epsilon", "epsilon must be a positive finite number");
  if (!(options.tol > 0)) fail(ErrorCode::kInvalidArgument, "tol", "tolerance must be positive");
  if (mu.empty() || nu.empty() || c.rows() != mu.size() || c.cols() != nu.size())
    fail(ErrorCode::kInvalidArgument, "dimensions", "cost matrix does not match the marginals");
  if (x0 >= mu.size()) fail(ErrorCode::kInvalidArgument, "anchor", "anchor is not an atom of X");
  for (double w : mu)
    if (!(w > 0) || !std::isfinite(w)) fail(ErrorCode::kInvalidArgument, "mu.positive", "mu must be positive");
  for (double w : nu)
    if (!(w > 0) || !std::isfinite(w)) fail(ErrorCode::kInvalidArgument, "nu.positive", "nu must be positive");
  for (double v : c.data())
    if (!std::isfinite(v)) fail(ErrorCode::kInvalidArgument, "cost.finite", "cost entries must be finite");

  Problem p{mu.size(), nu.size(), mu, nu, {}, {}, c, epsilon};
  for (double w : mu) p.log_mu.push_back(std::log(w));
  for (double w : nu) p.log_nu.push_back(std::log(w));

  std::vector<double> phi(p.m, 0.0), psi(p.n, 0.0);
  if (warm && warm->phi.size() == p.m && warm->psi.size() == p.n) {
    phi = warm->phi;
    psi = warm->psi;
  }

  EntropicSolution sol;
  sol.epsilon = epsilon;
  const std::size_t every = std::max<std::size_t>(options.check_every, 1);
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    p.update_phi(phi, psi);
    p.update_psi(phi, psi);
    sol.iterations = it;
    if (it != 1 && it % every != 0 && it != options.max_iter) continue;

    require_finite(phi);
    require_finite(psi);
    double moved = 0;
    if (options.block_steps && p.m > 1 && p.n > 1) {
      moved = block_step(p, phi, psi);
      if (moved > 0) {
        p.update_phi(phi, psi);
        p.update_psi(phi, psi);
      }
    }
    residual = p.residual(phi, psi);
    if (!std::isfinite(residual))
      fail(ErrorCode::kNumericalRange, "sinkhorn.finite", "Sinkhorn plan left the floating-point range");
    if (residual <= options.tol && moved <= options.tol) {
      sol.converged = true;
      break;
    }
  }

  double shift = phi[x0];
  for (double& v : phi) v -= shift;
  for (double& v : psi) v += shift;
  require_finite(phi);
  require_finite(psi);

  sol.plan = Table<double>(p.m, p.n, 0.0);
  for (std::size_t i = 0; i < p.m; ++i)
    for (std::size_t j = 0; j < p.n; ++j) sol.plan(i, j) = std::exp(p.log_plan(phi, psi, i, j));
  sol.residual = p.residual(phi, psi);
  sol.converged = sol.converged && sol.residual <= options.tol;
  sol.phi = std::move(phi);
  sol.psi = std::move(psi);
  return sol;
}

EntropicSolution sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c, double epsilon,
                          const SinkhornOptions& options, std::size_t x0) {
  check_dimensions(mu, nu, c);
  return sinkhorn(to_double(mu.weights()), to_double(nu.weights()), to_double(c.entries()), epsilon, options, x0);
}

CentroidTree build_centroid_tree(const DualPolytope& polytope) {
  const std::size_t N = polytope.size();
  Table<Rational> u = polytope.upper_table();
  CentroidTree tree;
  tree.size = N;
  tree.delta = Table<Rational>(N, N, Rational(0));
  tree.L = Table<Rational>(N, N, Rational(0));
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t m = 0; m < N; ++m) {
      if (n == m) continue;
      tree.delta(n, m) = (u(n, m) + u(m, n)) / 2;
      tree.L(n, m) = (u(n, m) - u(m, n)) / 2;
    }

  std::vector<std::size_t> parent(N);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };

  std::vector<std::pair<std::size_t, std::size_t>> candidates;
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t m = n + 1; m < N; ++m) candidates.emplace_back(n, m);

  while (!candidates.empty()) {
    Rational best = tree.delta(candidates[0].first, candidates[0].second);
    for (auto [n, m] : candidates) best = std::min(best, tree.delta(n, m));
    for (auto [n, m] : candidates) {
      if (tree.delta(n, m) != best) continue;
      std::size_t a = find(n), b = find(m);
      if (a == b) continue;
      parent[std::max(a, b)] = std::min(a, b);
      tree.edges.emplace_back(n, m);
    }
    std::erase_if(candidates, [&](const auto& e) { return find(e.first) == find(e.second); });
  }
  return tree;
}

namespace {

// Minimum cycle mean of the complete digraph with arc weights w(a,b), a ≠ b (Karp).
Rational min_cycle_mean(const Table<Rational>& w) {
  const std::size_t K = w.rows();
  std::vector<std::vector<std::optional<Rational>>> D(K + 1, std::vector<std::optional<Rational>>(K));
  for (std::size_t v = 0; v < K; ++v) D[0][v] = Rational(0);
  for (std::size_t k = 1; k <= K; ++k)
    for (std::size_t v = 0; v < K; ++v)
      for (std::size_t u = 0; u < K; ++u) {
        if (u == v || !D[k - 1][u]) continue;
        Rational cand = *D[k - 1][u] + w(u, v);
        if (!D[k][v] || cand < *D[k][v]) D[k][v] = cand;
      }
  std::optional<Rational> best;
  for (std::size_t v = 0; v < K; ++v) {
    if (!D[K][v]) continue;
    std::optional<Rational> worst;
    for (std::size_t k = 0; k < K; ++k) {
      if (!D[k][v]) continue;
      Rational r = (*D[K][v] - *D[k][v]) / Rational(static_cast<long>(K - k));
      if (!worst || r > *worst) worst = r;
    }
    if (worst && (!best || *worst < *best)) best = worst;
  }
  if (!best) fail(ErrorCode::kInternal, "centroid.cycle", "no cycle in the component graph");
  return *best;
}

}  // namespace

CentroidTree limit_tree(const DualPolytope& polytope) {
  const std::size_t N = polytope.size();
  Table<Rational> u = polytope.upper_table();
  CentroidTree tree;
  tree.size = N;
  tree.delta = Table<Rational>(N, N, Rational(0));
  tree.L = Table<Rational>(N, N, Rational(0));
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t m = 0; m < N; ++m)
      if (n != m) tree.delta(n, m) = (u(n, m) + u(m, n)) / 2;

  // α_n = β_group(n) + offset[n]; groups are merged level by level.
  std::vector<std::size_t> group(N);
  std::iota(group.begin(), group.end(), 0);
  std::vector<Rational> offset(N, Rational(0));
  for (std::size_t K = N; K > 1;) {
    // Contracted bounds β_a − β_b ≤ W(a,b) and the component pair attaining each.
    Table<Rational> W(K, K, Rational(0));
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> arg(K, std::vector<std::pair<std::size_t, std::size_t>>(K));
    std::vector<std::vector<bool>> set(K, std::vector<bool>(K, false));
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t m = 0; m < N; ++m) {
        std::size_t a = group[n], b = group[m];
        if (a == b) continue;
        Rational v = u(n, m) - offset[n] + offset[m];
        if (!set[a][b] || v < W(a, b)) {
          W(a, b) = v;
          arg[a][b] = {std::min(n, m), std::max(n, m)};
          set[a][b] = true;
        }
      }
    // Largest common slack t: every constraint keeps distance t from its bound.
    Rational t = min_cycle_mean(W);
    std::vector<Rational> x(K, Rational(0));
    for (std::size_t pass = 0; pass < K; ++pass)
      for (std::size_t a = 0; a < K; ++a)
        for (std::size_t b = 0; b < K; ++b)
          if (a != b && x[b] + W(a, b) - t < x[a]) x[a] = x[b] + W(a, b) - t;
    std::vector<std::vector<bool>> reach(K, std::vector<bool>(K, false));
    for (std::size_t a = 0; a < K; ++a) {
      reach[a][a] = true;
      for (std::size_t b = 0; b < K; ++b)
        if (a != b && x[a] - x[b] == W(a, b) - t) reach[a][b] = true;
    }
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t a = 0; a < K; ++a)
        for (std::size_t b = 0; b < K; ++b)
          if (reach[a][k] && reach[k][b]) reach[a][b] = true;

    // Groups on a common critical cycle have their differences fixed at this level.
    std::vector<std::size_t> merged(K, SIZE_MAX);
    std::size_t next = 0;
    for (std::size_t a = 0; a < K; ++a) {
      if (merged[a] != SIZE_MAX) continue;
      std::vector<std::size_t> scc;
      for (std::size_t b = a; b < K; ++b)
        if (merged[b] == SIZE_MAX && reach[a][b] && reach[b][a]) {
          merged[b] = next;
          scc.push_back(b);
        }
      ++next;
      std::vector<bool> in_tree(K, false);
      in_tree[a] = true;
      for (bool grew = true; grew;) {
        grew = false;
        for (std::size_t p : scc)
          for (std::size_t q : scc) {
            if (!in_tree[p] || in_tree[q]) continue;
            bool tight = x[p] - x[q] == W(p, q) - t || x[q] - x[p] == W(q, p) - t;
            if (!tight) continue;
            auto pq = x[p] - x[q] == W(p, q) - t ? arg[p][q] : arg[q][p];
            tree.edges.push_back(pq);
            in_tree[q] = grew = true;
          }
      }
    }
    if (next == K) fail(ErrorCode::kInternal, "centroid.level", "no constraint became binding");
    for (std::size_t n = 0; n < N; ++n) offset[n] += x[group[n]];
    for (std::size_t n = 0; n < N; ++n) group[n] = merged[group[n]];
    K = next;
  }
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t m = 0; m < N; ++m) tree.L(n, m) = offset[n] - offset[m];
  return tree;
}

std::vector<Rational> tree_alpha(const CentroidTree& tree) {
  const std::size_t N = tree.size;
  std::vector<std::vector<std::size_t>> adj(N);
  for (auto [n, m] : tree.edges) {
    adj[n].push_back(m);
    adj[m].push_back(n);
  }
  std::vector<Rational> alpha(N, Rational(0));
  std::vector<bool> seen(N, false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    std::size_t n = queue.front();
    queue.pop_front();
    for (std::size_t m : adj[n]) {
      if (seen[m]) continue;
      seen[m] = true;
      alpha[m] = alpha[n] - tree.L(n, m);
      queue.push_back(m);
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    fail(ErrorCode::kInvalidArgument, "tree.spanning", "tree does not span the components");
  return alpha;
}

CentroidResult centroid(const TransportPlan& gamma, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        const CostMatrix& c, std::size_t x0) {
  DualPolytope merged = merge_forced(characterize_duals(gamma, mu, nu, c, x0), mu, nu);
  CentroidTree tree = limit_tree(merged);
  std::vector<Rational> alpha = tree_alpha(tree);
  DualPair dual = assemble_dual(merged, alpha);
  return CentroidResult{std::move(dual), std::move(alpha), std::move(tree), std::move(merged)};
}

}  // namespace otdual
