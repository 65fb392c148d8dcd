#include "otdual/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

namespace otdual {

namespace {

[[noreturn]] void schema(const std::string& check, const std::string& message) {
  fail(ErrorCode::kSchema, check, message);
}

const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) schema(name, std::string("expected an object holding '") + name + "'");
  auto it = j.find(name);
  if (it == j.end()) schema(name, std::string("missing field '") + name + "'");
  return *it;
}

const Json& array_field(const Json& j, const char* name) {
  const Json& a = field(j, name);
  if (!a.is_array()) schema(name, std::string("'") + name + "' must be an array");
  return a;
}

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round12(v);
}

double double_from_json(const Json& j, const char* name) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return rational_from_json(j, name).get_d();
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  schema(name, std::string("'") + name + "' entries must be numbers");
}

std::vector<double> doubles_from_json(const Json& a, const char* name) {
  if (!a.is_array()) schema(name, std::string("'") + name + "' must be an array");
  std::vector<double> out;
  for (const auto& v : a) out.push_back(double_from_json(v, name));
  return out;
}

Table<double> double_table_from_json(const Json& a, const char* name) {
  if (!a.is_array() || a.empty() || !a[0].is_array())
    schema(name, std::string("'") + name + "' must be a nonempty array of rows");
  Table<double> t(a.size(), a[0].size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_array() || a[i].size() != t.cols()) schema(name, std::string("'") + name + "' rows differ in length");
    for (std::size_t j = 0; j < t.cols(); ++j) t(i, j) = double_from_json(a[i][j], name);
  }
  return t;
}

std::vector<Rational> rationals_from_json(const Json& a, const char* name) {
  if (!a.is_array()) schema(name, std::string("'") + name + "' must be an array");
  std::vector<Rational> out;
  for (const auto& v : a) out.push_back(rational_from_json(v, name));
  return out;
}

Table<Rational> rational_table_from_json(const Json& a, const char* name) {
  if (!a.is_array() || a.empty() || !a[0].is_array() || a[0].empty())
    schema(name, std::string("'") + name + "' must be a nonempty array of nonempty rows");
  Table<Rational> t(a.size(), a[0].size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_array() || a[i].size() != t.cols()) schema(name, std::string("'") + name + "' rows differ in length");
    for (std::size_t j = 0; j < t.cols(); ++j) t(i, j) = rational_from_json(a[i][j], name);
  }
  return t;
}

std::vector<std::string> labels_from_json(const Json& j, const char* name, std::size_t n) {
  auto it = j.find(name);
  if (it == j.end()) return default_labels(n);
  if (!it->is_array() || it->size() != n)
    schema(name, std::string("'") + name + "' must list one label per atom");
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) schema(name, "labels must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::size_t index_from_json(const Json& j, const char* name, std::size_t bound) {
  if (!j.is_number_integer() || j.get<long long>() < 1 || static_cast<std::size_t>(j.get<long long>()) > bound)
    schema(name, std::string("'") + name + "' must be a 1-based index up to " + std::to_string(bound));
  return static_cast<std::size_t>(j.get<long long>()) - 1;
}

Json indices(const std::vector<std::size_t>& v) {
  Json a = Json::array();
  for (auto i : v) a.push_back(i + 1);
  return a;
}

std::vector<std::size_t> indices_from_json(const Json& a, const char* name) {
  if (!a.is_array()) schema(name, std::string("'") + name + "' must be an array");
  std::vector<std::size_t> out;
  for (const auto& v : a) out.push_back(index_from_json(v, name, std::numeric_limits<std::size_t>::max() / 2));
  return out;
}

Json json_from_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    schema("json", std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

double round12(double value) {
  if (!std::isfinite(value)) return value;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  double r = std::strtod(buf, nullptr);
  return r == 0 ? 0.0 : r;
}

Json to_json(const Rational& value) { return to_string(value); }

Rational rational_from_json(const Json& j, const char* name) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number()) return parse_rational(j.dump());
  schema(name, std::string("'") + name + "' entries must be numbers or numeric strings");
}

Json to_json(const std::vector<Rational>& values) {
  Json a = Json::array();
  for (const auto& v : values) a.push_back(to_json(v));
  return a;
}

Json to_json(const Table<Rational>& table) {
  Json a = Json::array();
  for (std::size_t i = 0; i < table.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < table.cols(); ++j) row.push_back(to_json(table(i, j)));
    a.push_back(row);
  }
  return a;
}

Json to_json(const std::vector<double>& values) {
  Json a = Json::array();
  for (double v : values) a.push_back(number(v));
  return a;
}

Json to_json(const Table<double>& table) {
  Json a = Json::array();
  for (std::size_t i = 0; i < table.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < table.cols(); ++j) row.push_back(number(table(i, j)));
    a.push_back(row);
  }
  return a;
}

Instance parse_instance(const Json& j) {
  if (!j.is_object()) schema("instance", "instance must be a JSON object");
  auto mu_w = rationals_from_json(array_field(j, "mu"), "mu");
  auto nu_w = rationals_from_json(array_field(j, "nu"), "nu");
  if (mu_w.empty() || nu_w.empty()) schema("measure.empty", "mu and nu need at least one atom");
  Table<Rational> cost = rational_table_from_json(field(j, "cost"), "cost");
  if (cost.rows() != mu_w.size() || cost.cols() != nu_w.size())
    schema("cost.dimensions", "cost must have |mu| rows and |nu| columns");
  auto lx = labels_from_json(j, "labels_x", mu_w.size());
  auto ly = labels_from_json(j, "labels_y", nu_w.size());
  Instance inst;
  try {
    inst.mu = DiscreteMeasure(std::move(mu_w), std::move(lx));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInconsistent) fail(e.code(), "mu." + e.check().substr(e.check().find('.') + 1), e.what());
    throw;
  }
  try {
    inst.nu = DiscreteMeasure(std::move(nu_w), std::move(ly));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInconsistent) fail(e.code(), "nu." + e.check().substr(e.check().find('.') + 1), e.what());
    throw;
  }
  inst.cost = CostMatrix(std::move(cost));
  if (auto it = j.find("plan"); it != j.end() && !it->is_null()) {
    Table<Rational> plan = rational_table_from_json(*it, "plan");
    if (plan.rows() != inst.mu.size() || plan.cols() != inst.nu.size())
      schema("plan.dimensions", "plan must have |mu| rows and |nu| columns");
    inst.plan = TransportPlan(std::move(plan), inst.mu, inst.nu);
  }
  return inst;
}

Instance parse_instance(const std::string& text) { return parse_instance(json_from_text(text)); }

Json to_json(const Instance& instance) {
  Json j;
  j["mu"] = to_json(instance.mu.weights());
  j["nu"] = to_json(instance.nu.weights());
  j["cost"] = to_json(instance.cost.entries());
  j["labels_x"] = instance.mu.labels();
  j["labels_y"] = instance.nu.labels();
  if (instance.plan) j["plan"] = to_json(instance.plan->entries());
  return j;
}

Json to_json(const SupportGraph& g) {
  Json j;
  j["left"] = g.left();
  j["right"] = g.right();
  Json edges = Json::array();
  for (auto [x, y] : g.edges()) edges.push_back({x + 1, y + 1});
  j["edges"] = edges;
  return j;
}

SupportGraph graph_from_json(const Json& j) {
  auto left = field(j, "left").get<std::vector<std::string>>();
  auto right = field(j, "right").get<std::vector<std::string>>();
  std::vector<Edge> edges;
  for (const auto& e : array_field(j, "edges")) {
    if (!e.is_array() || e.size() != 2) schema("edges", "edges are [x, y] pairs");
    edges.emplace_back(index_from_json(e[0], "edges", left.size()), index_from_json(e[1], "edges", right.size()));
  }
  return SupportGraph(std::move(left), std::move(right), std::move(edges));
}

Json to_json(const DualPair& dual) {
  return Json{{"phi", to_json(dual.phi)}, {"psi", to_json(dual.psi)}};
}

DualPair dual_from_json(const Json& j) {
  return DualPair{rationals_from_json(array_field(j, "phi"), "phi"), rationals_from_json(array_field(j, "psi"), "psi")};
}

Json to_json(const ComponentPartition& partition) {
  Json a = Json::array();
  for (const auto& c : partition.components) a.push_back(Json{{"x", indices(c.xs)}, {"y", indices(c.ys)}});
  return a;
}

ComponentPartition partition_from_json(const Json& j) {
  if (!j.is_array()) schema("components", "components must be an array");
  ComponentPartition p;
  for (const auto& c : j)
    p.components.push_back(Component{indices_from_json(field(c, "x"), "x"), indices_from_json(field(c, "y"), "y")});
  return p;
}

Json to_json(const DualPolytope& polytope) {
  Json j;
  j["components"] = to_json(polytope.partition());
  j["anchors"] = indices(polytope.anchors());
  Json base = Json::array();
  for (const auto& d : polytope.base_duals()) base.push_back(to_json(d));
  j["base_duals"] = base;
  Json cons = Json::array();
  for (const auto& c : polytope.constraints())
    cons.push_back(Json{{"n", c.n + 1}, {"m", c.m + 1}, {"lower", to_json(c.lower)}, {"upper", to_json(c.upper)}});
  j["constraints"] = cons;
  j["cost"] = to_json(polytope.cost().entries());
  j["x0"] = polytope.x0() + 1;
  return j;
}

DualPolytope polytope_from_json(const Json& j) {
  ComponentPartition partition = partition_from_json(field(j, "components"));
  auto anchors = indices_from_json(field(j, "anchors"), "anchors");
  std::vector<DualPair> base;
  for (const auto& d : array_field(j, "base_duals")) base.push_back(dual_from_json(d));
  std::vector<AlphaConstraint> cons;
  for (const auto& c : array_field(j, "constraints"))
    cons.push_back(AlphaConstraint{index_from_json(field(c, "n"), "n", partition.size()),
                                   index_from_json(field(c, "m"), "m", partition.size()),
                                   rational_from_json(field(c, "lower"), "lower"),
                                   rational_from_json(field(c, "upper"), "upper")});
  CostMatrix cost(rational_table_from_json(field(j, "cost"), "cost"));
  std::size_t x0 = index_from_json(field(j, "x0"), "x0", cost.rows());
  return DualPolytope(std::move(partition), std::move(anchors), std::move(base), std::move(cons), std::move(cost), x0);
}

Json to_json(const TransportSolution& solution, std::size_t x0) {
  Json j;
  j["plan"] = to_json(solution.plan.entries());
  j["dual"] = to_json(solution.dual);
  j["value"] = to_json(solution.value);
  j["x0"] = x0 + 1;
  return j;
}

Json to_json(const CentroidTree& tree) {
  Json j;
  j["size"] = tree.size;
  Json edges = Json::array();
  for (auto [a, b] : tree.edges) edges.push_back({a + 1, b + 1});
  j["edges"] = edges;
  j["delta"] = to_json(tree.delta);
  j["L"] = to_json(tree.L);
  return j;
}

CentroidTree tree_from_json(const Json& j) {
  CentroidTree t;
  t.size = field(j, "size").get<std::size_t>();
  for (const auto& e : array_field(j, "edges")) {
    if (!e.is_array() || e.size() != 2) schema("edges", "tree edges are [n, m] pairs");
    t.edges.emplace_back(index_from_json(e[0], "edges", t.size), index_from_json(e[1], "edges", t.size));
  }
  if (t.size > 0) {
    t.delta = rational_table_from_json(field(j, "delta"), "delta");
    t.L = rational_table_from_json(field(j, "L"), "L");
  }
  return t;
}

Json to_json(const CentroidResult& result) {
  Json j;
  j["phi"] = to_json(result.dual.phi);
  j["psi"] = to_json(result.dual.psi);
  j["alpha"] = to_json(result.alpha);
  j["tree"] = to_json(result.tree);
  j["polytope"] = to_json(result.polytope);
  return j;
}

Json to_json(const EntropicSolution& s) {
  Json j;
  j["epsilon"] = number(s.epsilon);
  j["phi"] = to_json(s.phi);
  j["psi"] = to_json(s.psi);
  j["plan"] = to_json(s.plan);
  j["iterations"] = s.iterations;
  j["residual"] = number(s.residual);
  j["converged"] = s.converged;
  return j;
}

EntropicSolution entropic_from_json(const Json& j) {
  EntropicSolution s;
  s.epsilon = double_from_json(field(j, "epsilon"), "epsilon");
  s.phi = doubles_from_json(field(j, "phi"), "phi");
  s.psi = doubles_from_json(field(j, "psi"), "psi");
  s.plan = double_table_from_json(field(j, "plan"), "plan");
  s.iterations = field(j, "iterations").get<std::size_t>();
  s.residual = double_from_json(field(j, "residual"), "residual");
  s.converged = field(j, "converged").get<bool>();
  return s;
}

Game parse_game(const Json& j) {
  if (!j.is_object()) schema("game", "game must be a JSON object");
  static const std::set<std::string> known{"mu", "cost", "labels_x", "congestion", "interaction", "K", "objective", "k"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) schema("game.field", "unknown game field \"" + it.key() + "\"");
  Game game;
  auto mu_w = rationals_from_json(array_field(j, "mu"), "mu");
  Table<Rational> cost = rational_table_from_json(field(j, "cost"), "cost");
  if (cost.rows() != mu_w.size()) schema("cost.dimensions", "cost must have |mu| rows");
  game.mu = DiscreteMeasure(std::move(mu_w), labels_from_json(j, "labels_x", cost.rows()));
  GameSpec& spec = game.spec;
  spec.cost = CostMatrix(std::move(cost));
  const std::size_t n = spec.actions();

  if (auto it = j.find("congestion"); it != j.end()) {
    std::string kind = field(*it, "kind").get<std::string>();
    if (kind == "none") {
      spec.congestion.kind = Congestion::Kind::kNone;
    } else if (kind == "power") {
      spec.congestion.kind = Congestion::Kind::kPower;
      spec.congestion.exponent = double_from_json(field(*it, "exponent"), "exponent");
      if (it->contains("coefficient")) spec.congestion.coefficient = double_from_json((*it)["coefficient"], "coefficient");
    } else if (kind == "table") {
      spec.congestion.kind = Congestion::Kind::kTable;
      for (const auto& row : array_field(*it, "values")) spec.congestion.values.push_back(doubles_from_json(row, "values"));
    } else {
      schema("congestion.kind", "congestion kind must be none, power or table");
    }
  }

  spec.theta = Table<double>(n, n, 0.0);
  if (auto it = j.find("interaction"); it != j.end()) {
    std::string kind = field(*it, "kind").get<std::string>();
    if (kind == "toeplitz") {
      spec.theta = toeplitz_interaction(doubles_from_json(field(*it, "g"), "g"), n);
    } else if (kind == "matrix") {
      spec.theta = double_table_from_json(field(*it, "theta"), "theta");
    } else if (kind != "none") {
      schema("interaction.kind", "interaction kind must be none, toeplitz or matrix");
    }
  }

  if (auto it = j.find("K"); it != j.end()) {
    std::string kind = field(*it, "kind").get<std::string>();
    auto& K = spec.admissible;
    if (kind == "all") {
      K.kind = AdmissibleSet::Kind::kAll;
    } else if (kind == "nonnegative") {
      K.kind = AdmissibleSet::Kind::kNonnegative;
    } else if (kind == "box") {
      K.kind = AdmissibleSet::Kind::kBox;
      K.lower = doubles_from_json(field(*it, "lower"), "lower");
      K.upper = doubles_from_json(field(*it, "upper"), "upper");
    } else if (kind == "slice") {
      K.kind = AdmissibleSet::Kind::kSlice;
      for (const auto& v : array_field(*it, "fixed")) {
        if (v.is_null()) K.fixed.emplace_back(std::nullopt);
        else K.fixed.emplace_back(double_from_json(v, "fixed"));
      }
    } else {
      schema("K.kind", "K kind must be all, nonnegative, box or slice");
    }
  }

  if (auto it = j.find("objective"); it != j.end()) {
    std::string kind = field(*it, "kind").get<std::string>();
    if (kind == "sum_of_squares") {
      spec.objective.kind = Objective::Kind::kSumOfSquares;
    } else if (kind == "expr") {
      spec.objective.kind = Objective::Kind::kExpression;
      spec.objective.expr = Expression::parse(field(*it, "expr").get<std::string>(), n);
    } else {
      schema("objective.kind", "objective kind must be sum_of_squares or expr");
    }
  }

  game.k.assign(n, 0.0);
  if (auto it = j.find("k"); it != j.end()) {
    game.k = doubles_from_json(*it, "k");
    if (game.k.size() != n) schema("k", "k must have one entry per action");
  }
  spec.validate();
  return game;
}

Game parse_game(const std::string& text) {
  try {
    return parse_game(json_from_text(text));
  } catch (const Json::exception& e) {
    schema("game", std::string("malformed game: ") + e.what());
  }
}

Json to_json(const Equilibrium& eq) {
  Json j;
  j["kind"] = eq.kind == Equilibrium::Kind::kCNE ? "CNE" : "SCNE";
  j["plan"] = to_json(eq.plan);
  j["nu"] = to_json(eq.nu);
  j["k"] = to_json(eq.k);
  j["value"] = number(eq.value);
  j["epsilon"] = number(eq.epsilon);
  j["iterations"] = eq.iterations;
  j["residual"] = number(eq.residual);
  j["converged"] = eq.converged;
  j["experimental"] = eq.experimental;
  if (eq.reference_value) j["reference_value"] = number(*eq.reference_value);
  return j;
}

Equilibrium equilibrium_from_json(const Json& j) {
  Equilibrium eq;
  std::string kind = field(j, "kind").get<std::string>();
  if (kind != "CNE" && kind != "SCNE") schema("kind", "equilibrium kind must be CNE or SCNE");
  eq.kind = kind == "CNE" ? Equilibrium::Kind::kCNE : Equilibrium::Kind::kSCNE;
  eq.plan = double_table_from_json(field(j, "plan"), "plan");
  eq.nu = doubles_from_json(field(j, "nu"), "nu");
  eq.k = doubles_from_json(field(j, "k"), "k");
  eq.value = double_from_json(field(j, "value"), "value");
  eq.epsilon = double_from_json(field(j, "epsilon"), "epsilon");
  eq.iterations = field(j, "iterations").get<std::size_t>();
  eq.residual = double_from_json(field(j, "residual"), "residual");
  eq.converged = field(j, "converged").get<bool>();
  eq.experimental = field(j, "experimental").get<bool>();
  if (auto it = j.find("reference_value"); it != j.end()) eq.reference_value = double_from_json(*it, "reference_value");
  return eq;
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchema:
    case ErrorCode::kInvalidArgument: return 1;
    case ErrorCode::kInconsistent: return 2;
    case ErrorCode::kNonConvergence:
    case ErrorCode::kNumericalRange: return 3;
    case ErrorCode::kInternal: return 4;
  }
  return 4;
}

Json error_json(const Error& e) {
  return Json{{"error",
               {{"code", exit_code(e.code())},
                {"kind", std::string(to_string(e.code()))},
                {"check", e.check()},
                {"message", e.what()}}}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace otdual
