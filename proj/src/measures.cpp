#include "otdual/measures.hpp"

#include <deque>
#include <utility>

namespace otdual {

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i + 1));
  return out;
}

DiscreteMeasure::DiscreteMeasure(std::vector<Rational> weights, std::vector<std::string> labels)
    : weights_(std::move(weights)), labels_(std::move(labels)) {
  if (weights_.empty()) fail(ErrorCode::kSchema, "measure.empty", "a measure needs at least one atom");
  if (labels_.empty()) labels_ = default_labels(weights_.size());
  if (labels_.size() != weights_.size())
    fail(ErrorCode::kSchema, "measure.labels", "label count differs from weight count");
  Rational total = 0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    weights_[i].canonicalize();
    if (weights_[i] <= 0)
      fail(ErrorCode::kInconsistent, "measure.positive",
           "weight of atom " + labels_[i] + " is not strictly positive");
    total += weights_[i];
  }
  if (total != 1)
    fail(ErrorCode::kInconsistent, "measure.sum", "weights sum to " + to_string(total) + ", not 1");
}

CostMatrix::CostMatrix(Table<Rational> entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.cols() == 0)
    fail(ErrorCode::kSchema, "cost.empty", "cost matrix is empty");
  for (const auto& e : entries_.data())
    if (e < 0) fail(ErrorCode::kInvalidArgument, "cost.nonnegative", "cost entries must be nonnegative");
}

TransportPlan::TransportPlan(Table<Rational> entries, const DiscreteMeasure& mu, const DiscreteMeasure& nu)
    : entries_(std::move(entries)) {
  if (entries_.rows() != mu.size() || entries_.cols() != nu.size())
    fail(ErrorCode::kInvalidArgument, "plan.dimensions", "plan dimensions differ from the marginals");
  for (const auto& e : entries_.data())
    if (e < 0 || e > 1) fail(ErrorCode::kInconsistent, "plan.range", "plan entries must lie in [0,1]");
  auto rows = entries_.row_sums();
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i] != mu.weight(i))
      fail(ErrorCode::kInconsistent, "plan.marginal_x", "row " + mu.label(i) + " does not sum to mu");
  auto cols = entries_.col_sums();
  for (std::size_t j = 0; j < cols.size(); ++j)
    if (cols[j] != nu.weight(j))
      fail(ErrorCode::kInconsistent, "plan.marginal_y", "column " + nu.label(j) + " does not sum to nu");
}

Rational DualPair::value(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
  Rational total = 0;
  for (std::size_t i = 0; i < phi.size(); ++i) total += phi[i] * mu.weight(i);
  for (std::size_t j = 0; j < psi.size(); ++j) total += psi[j] * nu.weight(j);
  return total;
}

bool DualPair::is_feasible(const CostMatrix& c) const {
  if (phi.size() != c.rows() || psi.size() != c.cols()) return false;
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j)
      if (phi[i] + psi[j] > c(i, j)) return false;
  return true;
}

DualPair make_dual(std::vector<Rational> phi, std::vector<Rational> psi, const CostMatrix& c) {
  DualPair d{std::move(phi), std::move(psi)};
  if (d.phi.size() != c.rows() || d.psi.size() != c.cols())
    fail(ErrorCode::kInvalidArgument, "dual.dimensions", "dual dimensions differ from the cost matrix");
  if (!d.is_feasible(c)) fail(ErrorCode::kInconsistent, "dual.feasible", "phi(x) + psi(y) exceeds c(x,y)");
  return d;
}

void check_dimensions(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c) {
  if (c.rows() != mu.size() || c.cols() != nu.size())
    fail(ErrorCode::kInvalidArgument, "dimensions",
         "cost matrix is " + std::to_string(c.rows()) + "x" + std::to_string(c.cols()) + " but marginals have " +
             std::to_string(mu.size()) + " and " + std::to_string(nu.size()) + " atoms");
}

namespace {

// Spanning tree over rows 0..m-1 and columns m..m+n-1 given by the basic cells.
struct BasisTree {
  std::size_t m, n;
  std::vector<std::vector<std::size_t>> adj;  // neighbour node ids
  std::vector<std::size_t> parent;
  std::vector<std::size_t> depth;

  BasisTree(std::size_t m_, std::size_t n_, const std::vector<std::pair<std::size_t, std::size_t>>& cells)
      : m(m_), n(n_), adj(m_ + n_), parent(m_ + n_, SIZE_MAX), depth(m_ + n_, 0) {
    for (auto [i, j] : cells) {
      adj[i].push_back(m + j);
      adj[m + j].push_back(i);
    }
    std::vector<bool> seen(m + n, false);
    std::deque<std::size_t> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
      std::size_t a = queue.front();
      queue.pop_front();
      for (std::size_t b : adj[a]) {
        if (seen[b]) continue;
        seen[b] = true;
        parent[b] = a;
        depth[b] = depth[a] + 1;
        queue.push_back(b);
      }
    }
    for (bool s : seen)
      if (!s) fail(ErrorCode::kInternal, "simplex.basis", "basis is not a spanning tree");
  }

  // Nodes along the tree path from a to b, both included.
  std::vector<std::size_t> path(std::size_t a, std::size_t b) const {
    std::vector<std::size_t> front{a}, back{b};
    while (a != b) {
      if (depth[a] >= depth[b]) {
        a = parent[a];
        front.push_back(a);
      } else {
        b = parent[b];
        back.push_back(b);
      }
    }
    back.pop_back();
    front.insert(front.end(), back.rbegin(), back.rend());
    return front;
  }

  void potentials(const Table<Rational>& cost, std::vector<Rational>& u, std::vector<Rational>& v) const {
    u.assign(m, Rational(0));
    v.assign(n, Rational(0));
    std::vector<bool> seen(m + n, false);
    std::deque<std::size_t> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
      std::size_t a = queue.front();
      queue.pop_front();
      for (std::size_t b : adj[a]) {
        if (seen[b]) continue;
        seen[b] = true;
        if (a < m) v[b - m] = cost(a, b - m) - u[a];
        else u[b] = cost(b, a - m) - v[a - m];
        queue.push_back(b);
      }
    }
  }
};

}  // namespace

TransportBasis solve_transport(const std::vector<Rational>& supply, const std::vector<Rational>& demand,
                               const Table<Rational>& cost) {
  const std::size_t m = supply.size(), n = demand.size();
  if (m == 0 || n == 0) fail(ErrorCode::kInvalidArgument, "dimensions", "empty transport problem");
  if (cost.rows() != m || cost.cols() != n)
    fail(ErrorCode::kInvalidArgument, "dimensions", "cost matrix does not match supplies/demands");
  Rational total_s = 0, total_d = 0;
  for (const auto& s : supply) {
    if (s < 0) fail(ErrorCode::kInvalidArgument, "transport.nonnegative", "negative supply");
    total_s += s;
  }
  for (const auto& d : demand) {
    if (d < 0) fail(ErrorCode::kInvalidArgument, "transport.nonnegative", "negative demand");
    total_d += d;
  }
  if (total_s != total_d)
    fail(ErrorCode::kInconsistent, "transport.balance", "supplies and demands have different totals");

  TransportBasis out;
  out.flow = Table<Rational>(m, n, Rational(0));
  std::vector<bool> basic(m * n, false);

  // Northwest corner; a simultaneous row/column exhaustion steps down only.
  std::vector<Rational> rs = supply, cd = demand;
  for (std::size_t i = 0, j = 0;;) {
    Rational q = rs[i] < cd[j] ? rs[i] : cd[j];
    out.flow(i, j) = q;
    basic[i * n + j] = true;
    rs[i] -= q;
    cd[j] -= q;
    if (i == m - 1 && j == n - 1) break;
    if ((rs[i] == 0 && i < m - 1) || j == n - 1) ++i;
    else ++j;
  }

  auto cells = [&] {
    std::vector<std::pair<std::size_t, std::size_t>> c;
    for (std::size_t k = 0; k < m * n; ++k)
      if (basic[k]) c.emplace_back(k / n, k % n);
    return c;
  };

  for (;;) {
    BasisTree tree(m, n, cells());
    tree.potentials(cost, out.u, out.v);

    std::size_t entering = SIZE_MAX;
    for (std::size_t k = 0; k < m * n && entering == SIZE_MAX; ++k) {
      if (basic[k]) continue;
      std::size_t i = k / n, j = k % n;
      if (cost(i, j) - out.u[i] - out.v[j] < 0) entering = k;
    }
    if (entering == SIZE_MAX) break;

    const std::size_t ei = entering / n, ej = entering % n;
    auto nodes = tree.path(m + ej, ei);
    // Edges along the path alternate -, +, -, ... starting at the entering column.
    std::vector<std::size_t> minus, plus;
    for (std::size_t e = 0; e + 1 < nodes.size(); ++e) {
      std::size_t a = nodes[e], b = nodes[e + 1];
      std::size_t row = a < m ? a : b, col = (a < m ? b : a) - m;
      (e % 2 == 0 ? minus : plus).push_back(row * n + col);
    }
    Rational theta = out.flow(minus[0] / n, minus[0] % n);
    for (std::size_t k : minus) theta = std::min(theta, out.flow(k / n, k % n));
    std::size_t leaving = SIZE_MAX;
    for (std::size_t k : minus)
      if (out.flow(k / n, k % n) == theta) leaving = std::min(leaving, k);

    for (std::size_t k : minus) out.flow(k / n, k % n) -= theta;
    for (std::size_t k : plus) out.flow(k / n, k % n) += theta;
    out.flow(ei, ej) = theta;
    basic[entering] = true;
    basic[leaving] = false;
    ++out.pivots;
  }
  out.basic_cells = cells();
  return out;
}

Rational transport_value(const std::vector<Rational>& supply, const std::vector<Rational>& demand,
                         const Table<Rational>& cost) {
  auto basis = solve_transport(supply, demand, cost);
  Rational total = 0;
  for (auto [i, j] : basis.basic_cells) total += basis.flow(i, j) * cost(i, j);
  return total;
}

TransportSolution solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c, std::size_t x0) {
  check_dimensions(mu, nu, c);
  if (x0 >= mu.size()) fail(ErrorCode::kInvalidArgument, "anchor", "anchor is not an atom of X");
  auto basis = solve_transport(mu.weights(), nu.weights(), c.entries());
  Rational shift = basis.u[x0];
  DualPair dual;
  dual.phi = basis.u;
  dual.psi = basis.v;
  for (auto& p : dual.phi) p -= shift;
  for (auto& p : dual.psi) p += shift;
  TransportSolution sol{TransportPlan(std::move(basis.flow), mu, nu), std::move(dual), Rational(0)};
  sol.value = transport_cost(sol.plan, c);
  return sol;
}

TransportPlan solve_primal(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c) {
  return solve(mu, nu, c, 0).plan;
}

DualPair solve_dual(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c, std::size_t x0) {
  return solve(mu, nu, c, x0).dual;
}

Rational transport_cost(const TransportPlan& gamma, const CostMatrix& c) {
  if (gamma.rows() != c.rows() || gamma.cols() != c.cols())
    fail(ErrorCode::kInvalidArgument, "dimensions", "plan and cost dimensions differ");
  Rational total = 0;
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j)
      if (gamma(i, j) != 0) total += gamma(i, j) * c(i, j);
  return total;
}

bool is_complementary(const TransportPlan& gamma, const DualPair& dual, const CostMatrix& c) {
  if (gamma.rows() != c.rows() || gamma.cols() != c.cols() || dual.phi.size() != c.rows() ||
      dual.psi.size() != c.cols())
    return false;
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j)
      if (gamma(i, j) > 0 && dual.phi[i] + dual.psi[j] != c(i, j)) return false;
  return true;
}

}  // namespace otdual
