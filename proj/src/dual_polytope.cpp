#include "otdual/dual_polytope.hpp"

#include <algorithm>

namespace otdual {

DualPolytope::DualPolytope(ComponentPartition partition, std::vector<std::size_t> anchors, std::vector<DualPair> base,
                           std::vector<AlphaConstraint> constraints, CostMatrix cost, std::size_t x0)
    : partition_(std::move(partition)),
      anchors_(std::move(anchors)),
      base_(std::move(base)),
      constraints_(std::move(constraints)),
      cost_(std::move(cost)),
      x0_(x0) {
  const std::size_t N = partition_.size();
  if (N == 0 || base_.size() != N || anchors_.size() != N)
    fail(ErrorCode::kInvalidArgument, "polytope.shape", "one base dual and anchor per component required");
  if (constraints_.size() != N * (N - 1) / 2)
    fail(ErrorCode::kInvalidArgument, "polytope.shape", "one constraint per unordered component pair required");
  for (const auto& k : constraints_) {
    if (k.n >= k.m || k.m >= N) fail(ErrorCode::kInvalidArgument, "polytope.pair", "constraint pair out of range");
    if (k.lower > k.upper) fail(ErrorCode::kInconsistent, "polytope.interval", "empty constraint interval");
  }
  if (std::find(partition_[0].xs.begin(), partition_[0].xs.end(), x0_) == partition_[0].xs.end())
    fail(ErrorCode::kInvalidArgument, "anchor", "first component must contain x0");
}

std::pair<Rational, Rational> DualPolytope::interval(std::size_t n, std::size_t m) const {
  if (n == m || n >= size() || m >= size()) fail(ErrorCode::kInvalidArgument, "polytope.pair", "invalid pair");
  bool swapped = n > m;
  if (swapped) std::swap(n, m);
  for (const auto& k : constraints_)
    if (k.n == n && k.m == m) return swapped ? std::pair{-k.upper, -k.lower} : std::pair{k.lower, k.upper};
  fail(ErrorCode::kInternal, "polytope.pair", "missing constraint");
}

Table<Rational> DualPolytope::upper_table() const {
  Table<Rational> u(size(), size(), Rational(0));
  for (const auto& k : constraints_) {
    u(k.n, k.m) = k.upper;
    u(k.m, k.n) = -k.lower;
  }
  return u;
}

Table<Rational> DualPolytope::closure() const { return difference_closure(upper_table()); }

DualPolytope polytope_from_graph(const SupportGraph& g, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 const CostMatrix& c, std::size_t x0) {
  check_dimensions(mu, nu, c);
  if (x0 >= mu.size()) fail(ErrorCode::kInvalidArgument, "anchor", "anchor is not an atom of X");
  ComponentPartition parts = anchor_first(connected_components(g), x0);
  check_balanced(parts, mu, nu);
  ComponentSlack slack = component_slack(parts, g, mu, nu, c, x0);
  difference_closure(slack.upper);

  std::vector<AlphaConstraint> constraints;
  for (std::size_t n = 0; n < parts.size(); ++n)
    for (std::size_t m = n + 1; m < parts.size(); ++m)
      constraints.push_back({n, m, -slack.upper(m, n), slack.upper(n, m)});
  return DualPolytope(std::move(slack.partition), std::move(slack.anchors), std::move(slack.base),
                      std::move(constraints), c, x0);
}

DualPolytope characterize_duals(const TransportPlan& gamma, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                const CostMatrix& c, std::size_t x0) {
  return polytope_from_graph(support_graph(gamma, mu, nu), mu, nu, c, x0);
}

namespace {

ComponentSlack as_slack(const DualPolytope& p) {
  return ComponentSlack{p.partition(), p.anchors(), p.base_duals(), p.upper_table()};
}

}  // namespace

DualPolytope merge_forced(const DualPolytope& polytope, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  SupportGraph g = tight_for_all(as_slack(polytope), polytope.closure(), polytope.cost(), mu.labels(), nu.labels());
  return polytope_from_graph(g, mu, nu, polytope.cost(), polytope.x0());
}

std::vector<std::vector<std::size_t>> forced_classes(const DualPolytope& polytope) {
  Table<Rational> b = polytope.closure();
  const std::size_t N = polytope.size();
  std::vector<std::size_t> owner(N, SIZE_MAX);
  std::vector<std::vector<std::size_t>> classes;
  for (std::size_t n = 0; n < N; ++n) {
    if (owner[n] != SIZE_MAX) continue;
    owner[n] = classes.size();
    classes.push_back({n});
    for (std::size_t m = n + 1; m < N; ++m)
      if (owner[m] == SIZE_MAX && b(n, m) + b(m, n) == 0) {
        owner[m] = owner[n];
        classes.back().push_back(m);
      }
  }
  return classes;
}

bool is_dual_unique(const DualPolytope& polytope) { return forced_classes(polytope).size() == 1; }

void check_alpha(const DualPolytope& polytope, const std::vector<Rational>& alpha) {
  if (alpha.size() != polytope.size())
    fail(ErrorCode::kInvalidArgument, "alpha.size",
         "expected " + std::to_string(polytope.size()) + " alpha values, got " + std::to_string(alpha.size()));
  for (const auto& k : polytope.constraints()) {
    Rational d = alpha[k.n] - alpha[k.m];
    if (d < k.lower || d > k.upper)
      fail(ErrorCode::kInvalidArgument, "alpha.constraint",
           "alpha_" + std::to_string(k.n + 1) + " - alpha_" + std::to_string(k.m + 1) + " = " + to_string(d) +
               " lies outside [" + to_string(k.lower) + ", " + to_string(k.upper) + "]");
  }
}

DualPair assemble_dual(const DualPolytope& polytope, const std::vector<Rational>& alpha, const Rational& translation) {
  check_alpha(polytope, alpha);
  const auto& c = polytope.cost();
  DualPair d{std::vector<Rational>(c.rows()), std::vector<Rational>(c.cols())};
  for (std::size_t n = 0; n < polytope.size(); ++n) {
    const auto& comp = polytope.partition()[n];
    const auto& base = polytope.base_duals()[n];
    Rational offset = alpha[n] - alpha[0] + translation;
    for (std::size_t a = 0; a < comp.xs.size(); ++a) d.phi[comp.xs[a]] = base.phi[a] + offset;
    for (std::size_t b = 0; b < comp.ys.size(); ++b) d.psi[comp.ys[b]] = base.psi[b] - offset;
  }
  return d;
}

bool is_dual_optimizer(const DualPair& candidate, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const CostMatrix& c, const SupportGraph& union_g) {
  check_dimensions(mu, nu, c);
  if (candidate.phi.size() != c.rows() || candidate.psi.size() != c.cols())
    fail(ErrorCode::kInvalidArgument, "dual.dimensions", "dual dimensions differ from the cost matrix");
  if (!candidate.is_feasible(c)) return false;
  for (auto [x, y] : union_g.edges())
    if (candidate.phi[x] + candidate.psi[y] != c(x, y)) return false;
  return true;
}

bool strict_interior_test(const DualPolytope& polytope, const std::vector<Rational>& alpha) {
  check_alpha(polytope, alpha);
  for (const auto& k : polytope.constraints()) {
    Rational d = alpha[k.n] - alpha[k.m];
    if (d <= k.lower || d >= k.upper) return false;
  }
  return true;
}

RecoveredAlpha recover_alpha(const DualPolytope& polytope, const DualPair& dual) {
  const auto& c = polytope.cost();
  if (dual.phi.size() != c.rows() || dual.psi.size() != c.cols())
    fail(ErrorCode::kInvalidArgument, "dual.dimensions", "dual dimensions differ from the cost matrix");
  const std::size_t N = polytope.size();
  std::vector<Rational> offset(N);
  for (std::size_t n = 0; n < N; ++n) {
    const auto& comp = polytope.partition()[n];
    const auto& base = polytope.base_duals()[n];
    offset[n] = dual.phi[comp.xs[0]] - base.phi[0];
    for (std::size_t a = 0; a < comp.xs.size(); ++a)
      if (dual.phi[comp.xs[a]] - base.phi[a] != offset[n])
        fail(ErrorCode::kInvalidArgument, "dual.shape",
             "phi is not a translate of the base dual on component " + std::to_string(n + 1));
    for (std::size_t b = 0; b < comp.ys.size(); ++b)
      if (base.psi[b] - dual.psi[comp.ys[b]] != offset[n])
        fail(ErrorCode::kInvalidArgument, "dual.shape",
             "psi is not a translate of the base dual on component " + std::to_string(n + 1));
  }
  RecoveredAlpha out{std::vector<Rational>(N), offset[0]};
  for (std::size_t n = 0; n < N; ++n) out.alpha[n] = offset[n] - offset[0];
  return out;
}

std::vector<Rational> sample_alpha(const DualPolytope& polytope, std::mt19937_64& rng, unsigned resolution) {
  if (resolution == 0) resolution = 1;
  Table<Rational> b = polytope.closure();
  const std::size_t N = polytope.size();
  std::vector<Rational> alpha(N, Rational(0));
  std::uniform_int_distribution<unsigned> pick(0, resolution);
  for (std::size_t n = 1; n < N; ++n) {
    // α_n ≤ α_k + b(n,k) and α_n ≥ α_k − b(k,n) for every already fixed k.
    Rational lo = alpha[0] - b(0, n), hi = alpha[0] + b(n, 0);
    for (std::size_t k = 1; k < n; ++k) {
      lo = std::max(lo, Rational(alpha[k] - b(k, n)));
      hi = std::min(hi, Rational(alpha[k] + b(n, k)));
    }
    Rational t(pick(rng), resolution);
    t.canonicalize();
    alpha[n] = lo + (hi - lo) * t;
  }
  return alpha;
}

}  // namespace otdual
