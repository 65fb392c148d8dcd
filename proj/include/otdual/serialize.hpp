#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "otdual/cournot_nash.hpp"

namespace otdual {

using Json = nlohmann::json;

/// Transport problem as read from an instance file. `plan` is an optional
/// primal optimizer supplied by the caller instead of the solver's own.
struct Instance {
  DiscreteMeasure mu;
  DiscreteMeasure nu;
  CostMatrix cost;
  std::optional<TransportPlan> plan;

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Game file: GameSpec plus μ and the fixed cost vector used by `cne` (default 0).
struct Game {
  GameSpec spec;
  DiscreteMeasure mu;
  std::vector<double> k;
};

/// Rounds to 12 significant digits; the stored double prints back as that decimal.
double round12(double value);

Json to_json(const Rational& value);
Rational rational_from_json(const Json& j, const char* field);
Json to_json(const std::vector<Rational>& values);
Json to_json(const Table<Rational>& table);
Json to_json(const std::vector<double>& values);
Json to_json(const Table<double>& table);

Instance parse_instance(const Json& j);
Instance parse_instance(const std::string& text);
Json to_json(const Instance& instance);

Json to_json(const SupportGraph& g);
SupportGraph graph_from_json(const Json& j);

Json to_json(const DualPair& dual);
DualPair dual_from_json(const Json& j);

Json to_json(const ComponentPartition& partition);
ComponentPartition partition_from_json(const Json& j);

Json to_json(const DualPolytope& polytope);
DualPolytope polytope_from_json(const Json& j);

Json to_json(const TransportSolution& solution, std::size_t x0);

Json to_json(const CentroidTree& tree);
CentroidTree tree_from_json(const Json& j);

Json to_json(const CentroidResult& result);

Json to_json(const EntropicSolution& solution);
EntropicSolution entropic_from_json(const Json& j);

Game parse_game(const Json& j);
Game parse_game(const std::string& text);

Json to_json(const Equilibrium& eq);
Equilibrium equilibrium_from_json(const Json& j);

/// `{"error": {"code", "kind", "check", "message"}}` where code is the CLI exit status.
Json error_json(const Error& e);
int exit_code(ErrorCode code);

/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string dump(const Json& j);

}  // namespace otdual
