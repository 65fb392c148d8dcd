#include "otdual/validate.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "otdual/random.hpp"

namespace otdual {

bool ValidationReport::passed() const {
  for (const auto& p : properties)
    if (p.failed > 0) return false;
  return true;
}

namespace {

class Recorder {
 public:
  void check(const std::string& name, const std::string& where, const std::function<bool()>& body) {
    auto [it, inserted] = index_.try_emplace(name, results_.size());
    if (inserted) {
      PropertyResult fresh;
      fresh.name = name;
      results_.push_back(fresh);
    }
    PropertyResult& r = results_[it->second];
    ++r.checked;
    bool ok = false;
    std::string why;
    try {
      ok = body();
    } catch (const std::exception& e) {
      why = std::string(": ") + e.what();
    }
    if (!ok) {
      if (r.failed++ == 0) r.first_failure = where + why;
    }
  }
  std::vector<PropertyResult> take() { return std::move(results_); }

 private:
  std::map<std::string, std::size_t> index_;
  std::vector<PropertyResult> results_;
};

// OT of the problem restricted to one component, with renormalized marginals.
Rational restricted_value(const Component& comp, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          const CostMatrix& c) {
  std::vector<Rational> s, d;
  Table<Rational> sub(comp.xs.size(), comp.ys.size());
  for (std::size_t a = 0; a < comp.xs.size(); ++a) {
    s.push_back(mu.weight(comp.xs[a]));
    for (std::size_t b = 0; b < comp.ys.size(); ++b) sub(a, b) = c(comp.xs[a], comp.ys[b]);
  }
  for (auto y : comp.ys) d.push_back(nu.weight(y));
  Rational mass = 0;
  for (const auto& v : s) mass += v;
  for (auto& v : s) v /= mass;
  for (auto& v : d) v /= mass;
  return transport_value(s, d, sub);
}

void run_instance(Recorder& rec, const Instance& inst, const std::string& where, std::mt19937_64& rng) {
  const auto& mu = inst.mu;
  const auto& nu = inst.nu;
  const auto& c = inst.cost;
  TransportSolution sol = solve(mu, nu, c);
  const TransportPlan& gamma = inst.plan ? *inst.plan : sol.plan;

  rec.check("primal.marginals", where, [&] {
    return gamma.entries().row_sums() == mu.weights() && gamma.entries().col_sums() == nu.weights();
  });
  rec.check("duality.gap_zero", where, [&] { return transport_cost(gamma, c) == sol.dual.value(mu, nu); });
  rec.check("duality.complementary", where, [&] { return is_complementary(gamma, sol.dual, c); });
  rec.check("dual.feasible", where, [&] { return sol.dual.is_feasible(c); });
  rec.check("c_transform.feasible", where, [&] {
    return DualPair{c_transform(sol.dual.psi, c), sol.dual.psi}.is_feasible(c);
  });

  SupportGraph g = support_graph(gamma, mu, nu);
  SupportGraph E = union_graph(gamma, sol.dual, mu, nu, c);
  rec.check("graph.support_in_union", where, [&] {
    for (auto [x, y] : g.edges())
      if (!E.has_edge(x, y)) return false;
    return true;
  });
  ComponentPartition parts = connected_components(g);
  rec.check("components.balanced", where, [&] {
    check_balanced(parts, mu, nu);
    return true;
  });
  rec.check("decomposition.identity", where, [&] {
    Rational total = 0;
    for (const auto& comp : parts.components) {
      Rational mass = 0;
      for (auto x : comp.xs) mass += mu.weight(x);
      total += mass * restricted_value(comp, mu, nu, c);
    }
    return total == sol.value;
  });

  DualPolytope poly = characterize_duals(gamma, mu, nu, c);
  rec.check("alpha.sample_roundtrip", where, [&] {
    for (int s = 0; s < 10; ++s)
      if (!is_dual_optimizer(assemble_dual(poly, sample_alpha(poly, rng)), mu, nu, c, E)) return false;
    return true;
  });
  rec.check("alpha.recovered_feasible", where, [&] {
    check_alpha(poly, recover_alpha(poly, sol.dual).alpha);
    return true;
  });
  rec.check("uniqueness.iff_connected", where, [&] {
    return is_dual_unique(poly) == (connected_components(E).size() == 1);
  });

  DualPolytope merged = merge_forced(poly, mu, nu);
  rec.check("strict_interior.tight_set", where, [&] {
    for (int s = 0; s < 10; ++s) {
      auto alpha = sample_alpha(merged, rng);
      DualPair d = assemble_dual(merged, alpha);
      bool equal = true;
      for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = 0; j < c.cols(); ++j)
          if ((d.phi[i] + d.psi[j] == c(i, j)) != E.has_edge(i, j)) equal = false;
      if (strict_interior_test(merged, alpha) != equal) return false;
    }
    return true;
  });

  CentroidResult cr = centroid(gamma, mu, nu, c);
  rec.check("centroid.optimizer", where, [&] { return is_dual_optimizer(cr.dual, mu, nu, c, E); });
  rec.check("centroid.alpha_feasible", where, [&] {
    check_alpha(cr.polytope, cr.alpha);
    return true;
  });
  rec.check("centroid.tree_spanning", where, [&] { return cr.tree.edges.size() + 1 == cr.polytope.size(); });

  rec.check("sinkhorn.gibbs_form", where, [&] {
    const double eps = 0.1;
    auto s = sinkhorn(mu, nu, c, eps);
    if (!s.converged) return false;
    for (std::size_t i = 0; i < c.rows(); ++i)
      for (std::size_t j = 0; j < c.cols(); ++j)
        if (std::abs(eps * std::log(s.plan(i, j)) + c(i, j).get_d() - s.phi[i] - s.psi[j]) > 1e-8) return false;
    return true;
  });
}

}  // namespace

ValidationReport validate(const Instance* instance, std::uint64_t seed, std::size_t random_count) {
  Recorder rec;
  std::mt19937_64 rng(seed);
  ValidationReport report;
  report.seed = seed;
  if (instance) {
    run_instance(rec, *instance, "input", rng);
    ++report.instances;
  }
  std::uniform_int_distribution<std::size_t> size(1, 5);
  for (std::size_t r = 0; r < random_count; ++r) {
    std::size_t nx = size(rng), ny = size(rng);
    Instance inst = r % 2 == 0 ? random_instance(rng, nx, ny) : random_degenerate_instance(rng, nx, ny);
    run_instance(rec, inst, "random #" + std::to_string(r), rng);
    ++report.instances;
  }
  report.properties = rec.take();
  return report;
}

Json to_json(const ValidationReport& report) {
  Json j;
  j["seed"] = report.seed;
  j["instances"] = report.instances;
  j["passed"] = report.passed();
  Json props = Json::array();
  for (const auto& p : report.properties) {
    Json q{{"name", p.name}, {"checked", p.checked}, {"failed", p.failed}, {"passed", p.failed == 0}};
    if (p.failed) q["first_failure"] = p.first_failure;
    props.push_back(q);
  }
  j["properties"] = props;
  return j;
}

}  // namespace otdual
