#include "oracles.hpp"

#include <Eigen/Dense>
#include <bit>
#include <cmath>

namespace oracle {

std::optional<std::vector<Rational>> solve_unique(std::vector<std::vector<Rational>> A, std::vector<Rational> b) {
  const std::size_t rows = A.size(), cols = rows ? A[0].size() : 0;
  std::size_t r = 0;
  std::vector<std::size_t> pivot_col;
  for (std::size_t col = 0; col < cols && r < rows; ++col) {
    std::size_t p = r;
    while (p < rows && A[p][col] == 0) ++p;
    if (p == rows) return std::nullopt;  // free column: not unique
    std::swap(A[p], A[r]);
    std::swap(b[p], b[r]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || A[i][col] == 0) continue;
      Rational f = A[i][col] / A[r][col];
      for (std::size_t j = col; j < cols; ++j) A[i][j] -= f * A[r][j];
      b[i] -= f * b[r];
    }
    pivot_col.push_back(col);
    ++r;
  }
  if (r < cols) return std::nullopt;
  for (std::size_t i = r; i < rows; ++i)
    if (b[i] != 0) return std::nullopt;
  std::vector<Rational> x(cols);
  for (std::size_t i = 0; i < r; ++i) x[pivot_col[i]] = b[i] / A[i][pivot_col[i]];
  return x;
}

namespace {

template <typename F>
void for_each_subset(std::size_t total, std::size_t size, F&& f) {
  std::vector<std::size_t> pick;
  for (std::uint32_t mask = 0; mask < (1u << total); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != size) continue;
    pick.clear();
    for (std::size_t k = 0; k < total; ++k)
      if (mask & (1u << k)) pick.push_back(k);
    f(pick);
  }
}

}  // namespace

std::vector<Table<Rational>> transport_vertices(const std::vector<Rational>& mu, const std::vector<Rational>& nu) {
  const std::size_t m = mu.size(), n = nu.size(), cells = m * n;
  std::vector<Table<Rational>> out;
  for_each_subset(cells, std::min(cells, m + n - 1), [&](const std::vector<std::size_t>& s) {
    std::vector<std::vector<Rational>> A(m + n, std::vector<Rational>(s.size(), Rational(0)));
    std::vector<Rational> b;
    for (auto v : mu) b.push_back(v);
    for (auto v : nu) b.push_back(v);
    for (std::size_t k = 0; k < s.size(); ++k) {
      A[s[k] / n][k] = 1;
      A[m + s[k] % n][k] = 1;
    }
    auto x = solve_unique(A, b);
    if (!x) return;
    Table<Rational> plan(m, n, Rational(0));
    for (std::size_t k = 0; k < s.size(); ++k) {
      if ((*x)[k] < 0) return;
      plan(s[k] / n, s[k] % n) = (*x)[k];
    }
    for (const auto& v : out)
      if (v == plan) return;
    out.push_back(plan);
  });
  return out;
}

Rational plan_cost(const Table<Rational>& plan, const Table<Rational>& c) {
  Rational total = 0;
  for (std::size_t i = 0; i < plan.rows(); ++i)
    for (std::size_t j = 0; j < plan.cols(); ++j) total += plan(i, j) * c(i, j);
  return total;
}

Rational brute_force_ot(const std::vector<Rational>& mu, const std::vector<Rational>& nu, const Table<Rational>& c) {
  auto vs = transport_vertices(mu, nu);
  Rational best = plan_cost(vs.at(0), c);
  for (const auto& v : vs) best = std::min(best, plan_cost(v, c));
  return best;
}

std::set<Cell> optimal_support_union(const std::vector<Rational>& mu, const std::vector<Rational>& nu,
                                     const Table<Rational>& c) {
  auto vs = transport_vertices(mu, nu);
  Rational best = brute_force_ot(mu, nu, c);
  std::set<Cell> out;
  for (const auto& v : vs) {
    if (plan_cost(v, c) != best) continue;
    for (std::size_t i = 0; i < v.rows(); ++i)
      for (std::size_t j = 0; j < v.cols(); ++j)
        if (v(i, j) > 0) out.emplace(i, j);
  }
  return out;
}

std::set<Potentials> dual_optimal_vertices(const std::vector<Rational>& mu, const std::vector<Rational>& nu,
                                           const Table<Rational>& c, std::size_t x0) {
  const std::size_t m = mu.size(), n = nu.size(), cells = m * n;
  const Rational ot = brute_force_ot(mu, nu, c);
  std::set<Potentials> out;
  for_each_subset(cells, std::min(cells, m + n - 1), [&](const std::vector<std::size_t>& s) {
    std::vector<std::vector<Rational>> A;
    std::vector<Rational> b;
    std::vector<Rational> row(m + n, Rational(0));
    row[x0] = 1;
    A.push_back(row);
    b.push_back(0);
    for (auto k : s) {
      std::vector<Rational> r(m + n, Rational(0));
      r[k / n] = 1;
      r[m + k % n] = 1;
      A.push_back(r);
      b.push_back(c(k / n, k % n));
    }
    auto x = solve_unique(A, b);
    if (!x) return;
    Potentials p{std::vector<Rational>(x->begin(), x->begin() + m), std::vector<Rational>(x->begin() + m, x->end())};
    Rational value = 0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (p.phi[i] + p.psi[j] > c(i, j)) return;
    for (std::size_t i = 0; i < m; ++i) value += p.phi[i] * mu[i];
    for (std::size_t j = 0; j < n; ++j) value += p.psi[j] * nu[j];
    if (value == ot) out.insert(p);
  });
  return out;
}

std::vector<std::vector<Rational>> alpha_vertices(std::size_t N, const std::vector<otdual::AlphaConstraint>& cons) {
  if (N == 1) return {{Rational(0)}};
  // Halfspaces s·(α_n − α_m) ≤ bound.
  struct Half {
    std::size_t n, m;
    int sign;
    Rational bound;
  };
  std::vector<Half> hs;
  for (const auto& k : cons) {
    hs.push_back({k.n, k.m, 1, k.upper});
    hs.push_back({k.n, k.m, -1, -k.lower});
  }
  std::vector<std::vector<Rational>> out;
  for_each_subset(hs.size(), N - 1, [&](const std::vector<std::size_t>& s) {
    std::vector<std::vector<Rational>> A;
    std::vector<Rational> b;
    std::vector<Rational> fix(N, Rational(0));
    fix[0] = 1;
    A.push_back(fix);
    b.push_back(0);
    for (auto k : s) {
      std::vector<Rational> r(N, Rational(0));
      r[hs[k].n] += hs[k].sign;
      r[hs[k].m] -= hs[k].sign;
      A.push_back(r);
      b.push_back(hs[k].bound);
    }
    auto x = solve_unique(A, b);
    if (!x) return;
    for (const auto& h : hs)
      if (h.sign * ((*x)[h.n] - (*x)[h.m]) > h.bound) return;
    for (const auto& v : out)
      if (v == *x) return;
    out.push_back(*x);
  });
  return out;
}

bool prefix_connected(const otdual::SupportGraph& g, const std::vector<otdual::Vertex>& order) {
  for (std::size_t len = 1; len <= order.size(); ++len) {
    std::vector<bool> seen(len, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < len; ++b) {
        if (seen[b] || order[a].right == order[b].right) continue;
        std::size_t x = order[a].right ? order[b].index : order[a].index;
        std::size_t y = order[a].right ? order[a].index : order[b].index;
        if (g.has_edge(x, y)) {
          seen[b] = true;
          stack.push_back(b);
        }
      }
    }
    for (bool s : seen)
      if (!s) return false;
  }
  return true;
}

std::size_t count_components(std::size_t nx, std::size_t ny, const std::set<Cell>& edges) {
  std::vector<int> label(nx + ny, -1);
  std::size_t count = 0;
  for (std::size_t start = 0; start < nx + ny; ++start) {
    if (label[start] >= 0) continue;
    std::vector<std::size_t> stack{start};
    label[start] = static_cast<int>(count);
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (auto [x, y] : edges) {
        std::size_t a = x, b = nx + y;
        std::size_t other = v == a ? b : v == b ? a : SIZE_MAX;
        if (other != SIZE_MAX && label[other] < 0) {
          label[other] = static_cast<int>(count);
          stack.push_back(other);
        }
      }
    }
    ++count;
  }
  return count;
}

std::vector<Rational> c_transform(const std::vector<Rational>& k, const Table<Rational>& c) {
  std::vector<Rational> out;
  for (std::size_t i = 0; i < c.rows(); ++i) {
    std::vector<Rational> candidates;
    for (std::size_t j = 0; j < c.cols(); ++j) candidates.push_back(c(i, j) - k[j]);
    out.push_back(*std::min_element(candidates.begin(), candidates.end()));
  }
  return out;
}

double partial(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x, std::size_t j,
               double h) {
  double x0 = x[j];
  x[j] = x0 + h;
  double up = f(x);
  x[j] = x0 - h;
  double down = f(x);
  return (up - down) / (2 * h);
}

Table<double> min_entropy_on_face(const std::vector<Rational>& mu, const std::vector<Rational>& nu,
                                  const Table<Rational>& c) {
  const std::size_t m = mu.size(), n = nu.size();
  auto vs = transport_vertices(mu, nu);
  Rational best = brute_force_ot(mu, nu, c);
  std::vector<Cell> cells;
  Table<double> start(m, n, 0.0);
  std::size_t count = 0;
  for (const auto& v : vs) {
    if (plan_cost(v, c) != best) continue;
    ++count;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) start(i, j) += v(i, j).get_d();
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (start(i, j) > 0) cells.emplace_back(i, j);
  const Eigen::Index k = static_cast<Eigen::Index>(cells.size());
  Eigen::VectorXd x(k);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m + n), k);
  for (Eigen::Index e = 0; e < k; ++e) {
    auto [i, j] = cells[static_cast<std::size_t>(e)];
    x(e) = start(i, j) / static_cast<double>(count);
    A(static_cast<Eigen::Index>(i), e) = 1;
    A(static_cast<Eigen::Index>(m + j), e) = 1;
  }
  Eigen::MatrixXd N = Eigen::FullPivLU<Eigen::MatrixXd>(A).kernel();
  if (N.cols() > 0 && N.norm() > 0) {
    N = Eigen::HouseholderQR<Eigen::MatrixXd>(N).householderQ() * Eigen::MatrixXd::Identity(k, N.cols());
    auto f = [](const Eigen::VectorXd& v) { return (v.array() * (v.array().log() - 1)).sum(); };
    for (int it = 0; it < 200; ++it) {
      Eigen::VectorXd g = N.transpose() * x.array().log().matrix();
      if (g.lpNorm<Eigen::Infinity>() < 1e-14) break;
      Eigen::MatrixXd H = N.transpose() * x.cwiseInverse().asDiagonal() * N;
      Eigen::VectorXd d = -N * H.ldlt().solve(g);
      double t = 1, fx = f(x);
      while (t > 1e-16) {
        Eigen::VectorXd y = x + t * d;
        if ((y.array() > 0).all() && f(y) <= fx + 1e-4 * t * g.dot(N.transpose() * d)) {
          x = y;
          break;
        }
        t *= 0.5;
      }
      if (t <= 1e-16) break;
    }
  }
  Table<double> out(m, n, 0.0);
  for (Eigen::Index e = 0; e < k; ++e) out(cells[static_cast<std::size_t>(e)].first, cells[static_cast<std::size_t>(e)].second) = x(e);
  return out;
}

}  // namespace oracle
