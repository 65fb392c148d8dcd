#include "otdual/otdual.h"

#include <cstring>
#include <new>

#include "otdual/validate.hpp"

struct otd_instance {
  otdual::Instance value;
};

struct otd_game {
  otdual::Game value;
};

namespace {

thread_local std::string last_error;

char* copy(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

otd_status record(const otdual::Error& e) {
  last_error = otdual::error_json(e).dump();
  return static_cast<otd_status>(static_cast<int>(e.code()));
}

template <typename F>
otd_status guarded(F&& body) {
  using namespace otdual;
  last_error.clear();
  try {
    body();
    return OTD_OK;
  } catch (const Error& e) {
    return record(e);
  } catch (const nlohmann::json::exception& e) {
    return record(Error(ErrorCode::kSchema, "json", e.what()));
  } catch (const std::bad_alloc&) {
    return record(Error(ErrorCode::kInternal, "memory", "out of memory"));
  } catch (const std::exception& e) {
    return record(Error(ErrorCode::kInternal, "internal", e.what()));
  }
}

void require(bool ok, const char* check, const char* message) {
  if (!ok) otdual::fail(otdual::ErrorCode::kInvalidArgument, check, message);
}

std::size_t anchor_index(const otd_instance* instance, std::size_t anchor) {
  require(anchor >= 1 && anchor <= instance->value.mu.size(), "anchor", "anchor must be a 1-based x atom");
  return anchor - 1;
}

const otdual::TransportPlan& plan_of(const otdual::Instance& inst, otdual::TransportSolution& sol) {
  return inst.plan ? *inst.plan : sol.plan;
}

}  // namespace

extern "C" {

otd_status otd_instance_parse(const char* json, otd_instance** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    require(json && out, "argument", "null argument");
    auto inst = otdual::parse_instance(std::string(json));
    *out = new otd_instance{std::move(inst)};
  });
}

void otd_instance_free(otd_instance* instance) { delete instance; }

otd_status otd_instance_dims(const otd_instance* instance, size_t* n_x, size_t* n_y) {
  return guarded([&] {
    require(instance && n_x && n_y, "argument", "null argument");
    *n_x = instance->value.mu.size();
    *n_y = instance->value.nu.size();
  });
}

otd_status otd_ot_value(const otd_instance* instance, char** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    require(instance && out, "argument", "null argument");
    const auto& in = instance->value;
    *out = copy(otdual::to_string(otdual::solve(in.mu, in.nu, in.cost).value));
  });
}

otd_status otd_solve_json(const otd_instance* instance, size_t anchor, char** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    require(instance && out, "argument", "null argument");
    const auto& in = instance->value;
    std::size_t x0 = anchor_index(instance, anchor);
    auto sol = otdual::solve(in.mu, in.nu, in.cost, x0);
    auto j = otdual::to_json(sol, x0);
    j["support_graph"] = otdual::to_json(otdual::support_graph(sol.plan, in.mu, in.nu));
    *out = copy(otdual::dump(j));
  });
}

otd_status otd_duals_json(const otd_instance* instance, size_t anchor, char** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    using namespace otdual;
    require(instance && out, "argument", "null argument");
    const auto& in = instance->value;
    std::size_t x0 = anchor_index(instance, anchor);
    auto sol = solve(in.mu, in.nu, in.cost, x0);
    const auto& gamma = plan_of(in, sol);
    DualPolytope poly = characterize_duals(gamma, in.mu, in.nu, in.cost, x0);
    DualPolytope merged = merge_forced(poly, in.mu, in.nu);
    Json j;
    j["plan"] = to_json(gamma.entries());
    j["support_graph"] = to_json(support_graph(gamma, in.mu, in.nu));
    j["union_graph"] = to_json(union_graph(gamma, sol.dual, in.mu, in.nu, in.cost));
    j["polytope"] = to_json(poly);
    j["merged"] = to_json(merged);
    j["unique"] = is_dual_unique(poly);
    j["value"] = to_json(sol.value);
    *out = copy(dump(j));
  });
}

otd_status otd_centroid_json(const otd_instance* instance, size_t anchor, char** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    using namespace otdual;
    require(instance && out, "argument", "null argument");
    const auto& in = instance->value;
    std::size_t x0 = anchor_index(instance, anchor);
    auto sol = solve(in.mu, in.nu, in.cost, x0);
    *out = copy(dump(to_json(centroid(plan_of(in, sol), in.mu, in.nu, in.cost, x0))));
  });
}

otd_status otd_sinkhorn_json(const otd_instance* instance, double epsilon, double tol, size_t anchor, char** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    using namespace otdual;
    require(instance && out, "argument", "null argument");
    require(epsilon > 0, "epsilon", "epsilon must be positive");
    require(tol > 0, "tol", "tol must be positive");
    const auto& in = instance->value;
    SinkhornOptions o;
    o.tol = tol;
    auto s = sinkhorn(in.mu, in.nu, in.cost, epsilon, o, anchor_index(instance, anchor));
    if (!s.converged)
      fail(ErrorCode::kNonConvergence, "sinkhorn.converged",
           "Sinkhorn stopped after " + std::to_string(s.iterations) + " iterations with residual " +
               std::to_string(s.residual));
    *out = copy(dump(to_json(s)));
  });
}

otd_status otd_validate_json(const otd_instance* instance, uint64_t seed, size_t random_count, char** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    require(out, "argument", "null argument");
    auto report = otdual::validate(instance ? &instance->value : nullptr, seed, random_count);
    *out = copy(otdual::dump(otdual::to_json(report)));
  });
}

otd_status otd_game_parse(const char* json, otd_game** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    require(json && out, "argument", "null argument");
    auto game = otdual::parse_game(std::string(json));
    *out = new otd_game{std::move(game)};
  });
}

void otd_game_free(otd_game* game) { delete game; }

otd_status otd_cne_json(const otd_game* game, double epsilon, double tol, char** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    using namespace otdual;
    require(game && out, "argument", "null argument");
    require(epsilon > 0 && tol > 0, "options", "epsilon and tol must be positive");
    BestResponseOptions o;
    o.epsilon = epsilon;
    o.tol = tol;
    Equilibrium eq = solve_cne(game->value.spec, game->value.mu, game->value.k, o);
    if (!eq.converged)
      fail(ErrorCode::kNonConvergence, "best_response.converged",
           "best response did not reach the tolerance (residual " + std::to_string(eq.residual) + ")");
    *out = copy(dump(to_json(eq)));
  });
}

otd_status otd_scne_json(const otd_game* game, double epsilon, double tol, char** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    using namespace otdual;
    require(game && out, "argument", "null argument");
    require(epsilon > 0 && tol > 0, "options", "epsilon and tol must be positive");
    const auto& g = game->value;
    Equilibrium eq;
    if (g.spec.objective.depends_on_k()) {
      eq = solve_scne_experimental(g.spec, g.mu);
    } else {
      BestResponseOptions o;
      o.epsilon = epsilon;
      o.tol = tol;
      eq = solve_scne_k_independent(g.spec, g.mu, o);
      if (!eq.converged)
        fail(ErrorCode::kNonConvergence, "objective.converged", "minimization of G did not reach the tolerance");
    }
    *out = copy(dump(to_json(eq)));
  });
}

const char* otd_last_error(void) { return last_error.c_str(); }

void otd_string_free(char* s) { std::free(s); }

const char* otd_version(void) { return "1.0.0"; }

}  // extern "C"
