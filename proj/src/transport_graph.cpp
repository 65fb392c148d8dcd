#include "otdual/transport_graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace otdual {

SupportGraph::SupportGraph(std::vector<std::string> left, std::vector<std::string> right, std::vector<Edge> edges)
    : left_(std::move(left)), right_(std::move(right)), edges_(std::move(edges)) {
  for (auto [x, y] : edges_)
    if (x >= left_.size() || y >= right_.size())
      fail(ErrorCode::kInvalidArgument, "graph.edge", "edge endpoint out of range");
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

bool SupportGraph::has_edge(std::size_t x, std::size_t y) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{x, y});
}

std::vector<std::size_t> ComponentPartition::x_owner(std::size_t n_x) const {
  std::vector<std::size_t> owner(n_x, SIZE_MAX);
  for (std::size_t n = 0; n < components.size(); ++n)
    for (std::size_t x : components[n].xs) owner.at(x) = n;
  return owner;
}

std::vector<std::size_t> ComponentPartition::y_owner(std::size_t n_y) const {
  std::vector<std::size_t> owner(n_y, SIZE_MAX);
  for (std::size_t n = 0; n < components.size(); ++n)
    for (std::size_t y : components[n].ys) owner.at(y) = n;
  return owner;
}

SupportGraph support_graph(const TransportPlan& gamma, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (gamma.rows() != mu.size() || gamma.cols() != nu.size())
    fail(ErrorCode::kInvalidArgument, "dimensions", "plan dimensions differ from the marginals");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < gamma.rows(); ++i)
    for (std::size_t j = 0; j < gamma.cols(); ++j)
      if (gamma(i, j) > 0) edges.emplace_back(i, j);
  return SupportGraph(mu.labels(), nu.labels(), std::move(edges));
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

ComponentPartition connected_components(const SupportGraph& g) {
  const std::size_t nx = g.left_size(), ny = g.right_size();
  UnionFind uf(nx + ny);
  for (auto [x, y] : g.edges()) uf.unite(x, nx + y);

  std::vector<std::size_t> slot(nx + ny, SIZE_MAX);
  ComponentPartition out;
  // Roots are minimal ids, so scanning X first yields the smallest-X ordering.
  for (std::size_t v = 0; v < nx + ny; ++v) {
    std::size_t r = uf.find(v);
    if (slot[r] == SIZE_MAX) {
      slot[r] = out.components.size();
      out.components.emplace_back();
    }
    auto& comp = out.components[slot[r]];
    if (v < nx) comp.xs.push_back(v);
    else comp.ys.push_back(v - nx);
  }
  return out;
}

ComponentPartition anchor_first(ComponentPartition partition, std::size_t x0) {
  auto& comps = partition.components;
  auto it = std::find_if(comps.begin(), comps.end(), [&](const Component& c) {
    return std::binary_search(c.xs.begin(), c.xs.end(), x0);
  });
  if (it == comps.end()) fail(ErrorCode::kInvalidArgument, "anchor", "anchor is not an atom of X");
  std::rotate(comps.begin(), it, it + 1);
  return partition;
}

void check_balanced(const ComponentPartition& partition, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  for (std::size_t n = 0; n < partition.size(); ++n) {
    Rational mx = 0, ny = 0;
    for (std::size_t x : partition[n].xs) mx += mu.weight(x);
    for (std::size_t y : partition[n].ys) ny += nu.weight(y);
    if (mx != ny)
      fail(ErrorCode::kInconsistent, "component.balance",
           "component " + std::to_string(n + 1) + " has mu mass " + to_string(mx) + " but nu mass " + to_string(ny));
  }
}

std::vector<Vertex> connected_ordering(const SupportGraph& g, Vertex root, const std::optional<Component>& within) {
  const std::size_t nx = g.left_size(), ny = g.right_size();
  if ((root.right ? ny : nx) <= root.index) fail(ErrorCode::kInvalidArgument, "ordering.root", "root not in graph");

  std::vector<bool> allowed(nx + ny, !within.has_value());
  if (within) {
    for (std::size_t x : within->xs) allowed.at(x) = true;
    for (std::size_t y : within->ys) allowed.at(nx + y) = true;
  }
  auto id = [&](Vertex v) { return v.right ? nx + v.index : v.index; };
  if (!allowed[id(root)]) fail(ErrorCode::kInvalidArgument, "ordering.root", "root outside the component");

  std::vector<std::vector<std::size_t>> adj(nx + ny);
  for (auto [x, y] : g.edges()) {
    if (!allowed[x] || !allowed[nx + y]) continue;
    adj[x].push_back(nx + y);
    adj[nx + y].push_back(x);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  std::vector<bool> seen(nx + ny, false);
  std::vector<Vertex> order;
  std::deque<std::size_t> queue{id(root)};
  seen[id(root)] = true;
  while (!queue.empty()) {
    std::size_t a = queue.front();
    queue.pop_front();
    order.push_back(a < nx ? Vertex{false, a} : Vertex{true, a - nx});
    for (std::size_t b : adj[a])
      if (!seen[b]) {
        seen[b] = true;
        queue.push_back(b);
      }
  }
  std::size_t expected = static_cast<std::size_t>(std::count(allowed.begin(), allowed.end(), true));
  if (order.size() != expected) fail(ErrorCode::kInvalidArgument, "ordering.connected", "graph is not connected");
  return order;
}

DualPair component_dual(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                        const Component& component, const SupportGraph& g, std::size_t x_anchor) {
  check_dimensions(mu, nu, c);
  auto order = connected_ordering(g, Vertex{false, x_anchor}, component);

  const std::size_t nx = c.rows(), ny = c.cols();
  std::vector<std::size_t> xpos(nx, SIZE_MAX), ypos(ny, SIZE_MAX);
  for (std::size_t k = 0; k < component.xs.size(); ++k) xpos[component.xs[k]] = k;
  for (std::size_t k = 0; k < component.ys.size(); ++k) ypos[component.ys[k]] = k;

  DualPair d{std::vector<Rational>(component.xs.size()), std::vector<Rational>(component.ys.size())};
  std::vector<bool> xset(nx, false), yset(ny, false);
  xset[x_anchor] = true;
  d.phi[xpos[x_anchor]] = 0;
  for (const Vertex& v : order) {
    if (v.right) {
      for (std::size_t x : component.xs)
        if (!xset[x] && g.has_edge(x, v.index)) {
          d.phi[xpos[x]] = c(x, v.index) - d.psi[ypos[v.index]];
          xset[x] = true;
        }
    } else {
      for (std::size_t y : component.ys)
        if (!yset[y] && g.has_edge(v.index, y)) {
          d.psi[ypos[y]] = c(v.index, y) - d.phi[xpos[v.index]];
          yset[y] = true;
        }
    }
  }
  for (auto [x, y] : g.edges()) {
    if (xpos[x] == SIZE_MAX || ypos[y] == SIZE_MAX) continue;
    if (d.phi[xpos[x]] + d.psi[ypos[y]] != c(x, y))
      fail(ErrorCode::kInconsistent, "complementarity",
           "support edge (" + g.left()[x] + "," + g.right()[y] + ") cannot be tight for any dual; plan is not optimal");
  }
  return d;
}

ComponentSlack component_slack(const ComponentPartition& partition, const SupportGraph& g, const DiscreteMeasure& mu,
                               const DiscreteMeasure& nu, const CostMatrix& c, std::size_t x0) {
  ComponentSlack out;
  out.partition = partition;
  const std::size_t N = partition.size();
  for (std::size_t n = 0; n < N; ++n) {
    const Component& comp = partition[n];
    if (comp.xs.empty() || comp.ys.empty())
      fail(ErrorCode::kInconsistent, "component.isolated", "component without both X and Y atoms");
    std::size_t anchor = comp.xs.front();
    if (n == 0) {
      if (!std::binary_search(comp.xs.begin(), comp.xs.end(), x0))
        fail(ErrorCode::kInternal, "anchor", "first component does not contain the anchor");
      anchor = x0;
    }
    out.anchors.push_back(anchor);
    out.base.push_back(component_dual(mu, nu, c, comp, g, anchor));
  }

  out.upper = Table<Rational>(N, N, Rational(0));
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t m = 0; m < N; ++m) {
      const auto& cn = partition[n];
      const auto& cm = partition[m];
      bool first = true;
      Rational best;
      for (std::size_t a = 0; a < cn.xs.size(); ++a)
        for (std::size_t b = 0; b < cm.ys.size(); ++b) {
          Rational s = c(cn.xs[a], cm.ys[b]) - out.base[n].phi[a] - out.base[m].psi[b];
          if (first || s < best) {
            best = s;
            first = false;
          }
        }
      if (n == m) {
        if (best < 0)
          fail(ErrorCode::kInconsistent, "dual.feasible",
               "restricted dual of component " + std::to_string(n + 1) + " is infeasible; plan is not optimal");
      } else {
        out.upper(n, m) = best;
      }
    }
  return out;
}

Table<Rational> difference_closure(const Table<Rational>& upper) {
  const std::size_t N = upper.rows();
  Table<Rational> b = upper;
  for (std::size_t n = 0; n < N; ++n) b(n, n) = 0;
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t m = 0; m < N; ++m) {
        Rational via = b(n, k) + b(k, m);
        if (via < b(n, m)) b(n, m) = via;
      }
  for (std::size_t n = 0; n < N; ++n)
    if (b(n, n) < 0)
      fail(ErrorCode::kInconsistent, "alpha.feasible", "translation constraints are infeasible; plan is not optimal");
  return b;
}

SupportGraph union_graph(const TransportPlan& gamma, const DualPair& dual, const DiscreteMeasure& mu,
                         const DiscreteMeasure& nu, const CostMatrix& c) {
  check_dimensions(mu, nu, c);
  if (!dual.is_feasible(c)) fail(ErrorCode::kInconsistent, "dual.feasible", "dual pair is not feasible");
  if (!is_complementary(gamma, dual, c))
    fail(ErrorCode::kInconsistent, "complementarity", "plan and dual are not complementary");

  SupportGraph g = support_graph(gamma, mu, nu);
  ComponentPartition parts = connected_components(g);
  auto slack = component_slack(parts, g, mu, nu, c, parts[0].xs.front());
  Table<Rational> closure = difference_closure(slack.upper);

  return tight_for_all(slack, closure, c, mu.labels(), nu.labels());
}

SupportGraph tight_for_all(const ComponentSlack& slack, const Table<Rational>& closure, const CostMatrix& c,
                           std::vector<std::string> left, std::vector<std::string> right) {
  const auto& parts = slack.partition;
  const std::size_t N = parts.size();
  std::vector<Edge> edges;
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t m = 0; m < N; ++m) {
      // Cells between n and m are tight for every optimizer only if α_n - α_m is forced.
      if (n != m && closure(n, m) + closure(m, n) != 0) continue;
      const auto& cn = parts[n];
      const auto& cm = parts[m];
      for (std::size_t a = 0; a < cn.xs.size(); ++a)
        for (std::size_t b = 0; b < cm.ys.size(); ++b) {
          Rational s = c(cn.xs[a], cm.ys[b]) - slack.base[n].phi[a] - slack.base[m].psi[b];
          if (s == closure(n, m)) edges.emplace_back(cn.xs[a], cm.ys[b]);
        }
    }
  return SupportGraph(std::move(left), std::move(right), std::move(edges));
}

}  // namespace otdual
