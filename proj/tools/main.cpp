#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "otdual/otdual.h"

namespace {

struct RunConfig {
  std::string command;
  std::string input_path;
  std::string output_path;
  std::optional<double> epsilon;
  std::optional<double> tol;
  std::size_t anchor = 1;
  std::uint64_t seed = 0;
  std::size_t count = 100;
};

int exit_for(otd_status s) {
  switch (s) {
    case OTD_OK: return 0;
    case OTD_ERR_SCHEMA:
    case OTD_ERR_INVALID_ARGUMENT: return 1;
    case OTD_ERR_INCONSISTENT: return 2;
    case OTD_ERR_NON_CONVERGENCE:
    case OTD_ERR_NUMERICAL_RANGE: return 3;
    default: return 4;
  }
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    if (static_cast<unsigned char>(ch) < 0x20) continue;
    out += ch;
  }
  return out;
}

int report_error(int code, const std::string& kind, const std::string& check, const std::string& message) {
  std::cerr << "{\"error\":{\"check\":\"" << escape(check) << "\",\"code\":" << code << ",\"kind\":\"" << kind
            << "\",\"message\":\"" << escape(message) << "\"}}\n";
  return code;
}

int report_status(otd_status s) {
  std::cerr << otd_last_error() << "\n";
  return exit_for(s);
}

struct InstanceDeleter {
  void operator()(otd_instance* p) const { otd_instance_free(p); }
};
struct GameDeleter {
  void operator()(otd_game* p) const { otd_game_free(p); }
};

int emit(const RunConfig& cfg, char* text) {
  std::string body(text);
  otd_string_free(text);
  if (cfg.output_path.empty()) {
    std::cout << body;
    return 0;
  }
  std::ofstream out(cfg.output_path, std::ios::binary);
  if (!out || !(out << body)) return report_error(1, "schema", "output", "cannot write " + cfg.output_path);
  return 0;
}

int run(const RunConfig& cfg) {
  std::string text;
  if (!cfg.input_path.empty()) {
    std::ifstream in(cfg.input_path, std::ios::binary);
    if (!in) return report_error(1, "schema", "input", "cannot read " + cfg.input_path);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  char* out = nullptr;
  otd_status s;

  if (cfg.command == "cne" || cfg.command == "scne") {
    otd_game* raw = nullptr;
    if ((s = otd_game_parse(text.c_str(), &raw)) != OTD_OK) return report_status(s);
    std::unique_ptr<otd_game, GameDeleter> game(raw);
    double eps = cfg.epsilon.value_or(1e-2), tol = cfg.tol.value_or(1e-7);
    s = cfg.command == "cne" ? otd_cne_json(game.get(), eps, tol, &out) : otd_scne_json(game.get(), eps, tol, &out);
    return s == OTD_OK ? emit(cfg, out) : report_status(s);
  }

  std::unique_ptr<otd_instance, InstanceDeleter> inst;
  if (!cfg.input_path.empty()) {
    otd_instance* raw = nullptr;
    if ((s = otd_instance_parse(text.c_str(), &raw)) != OTD_OK) return report_status(s);
    inst.reset(raw);
  } else if (cfg.command != "validate") {
    return report_error(1, "schema", "input", "an instance file is required");
  }

  if (cfg.command == "solve") s = otd_solve_json(inst.get(), cfg.anchor, &out);
  else if (cfg.command == "duals") s = otd_duals_json(inst.get(), cfg.anchor, &out);
  else if (cfg.command == "centroid") s = otd_centroid_json(inst.get(), cfg.anchor, &out);
  else if (cfg.command == "sinkhorn")
    s = otd_sinkhorn_json(inst.get(), cfg.epsilon.value_or(1e-2), cfg.tol.value_or(1e-9), cfg.anchor, &out);
  else s = otd_validate_json(inst.get(), cfg.seed, cfg.count, &out);
  if (s != OTD_OK) return report_status(s);

  if (cfg.command == "validate") {
    bool passed = std::string(out).find("\"passed\": false") == std::string::npos;
    int rc = emit(cfg, out);
    return rc != 0 ? rc : (passed ? 0 : 4);
  }
  return emit(cfg, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact discrete optimal transport: duals, centroid, Sinkhorn and Cournot-Nash equilibria"};
  app.set_version_flag("--version", std::string(otd_version()));
  app.require_subcommand(1);
  RunConfig cfg;

  struct Spec {
    const char* name;
    const char* help;
    bool epsilon, tol, anchor, seed, input_optional;
  };
  const Spec specs[] = {
      {"solve", "optimal plan, one dual pair and the exact value", false, false, true, false, false},
      {"duals", "all dual optimizers: components, base duals, alpha constraints, union graph", false, false, true,
       false, false},
      {"centroid", "entropic-limit dual and its spanning tree", false, false, true, false, false},
      {"sinkhorn", "log-domain Sinkhorn at --epsilon", true, true, true, false, false},
      {"cne", "Cournot-Nash equilibrium of a game file for its fixed k", true, true, false, false, false},
      {"scne", "Stackelberg-Cournot-Nash equilibrium of a game file", true, true, false, false, false},
      {"validate", "invariant suite on an instance plus a seeded random batch", false, false, false, true, true},
  };
  for (const auto& sp : specs) {
    CLI::App* sub = app.add_subcommand(sp.name, sp.help);
    auto* in = sub->add_option("input", cfg.input_path, "JSON input file")->check(CLI::ExistingFile);
    if (!sp.input_optional) in->required();
    sub->add_option("-o,--output", cfg.output_path, "write JSON here instead of standard output");
    if (sp.epsilon) sub->add_option("--epsilon", cfg.epsilon, "entropic regularization (default 0.01)")->check(CLI::PositiveNumber);
    if (sp.tol) sub->add_option("--tol", cfg.tol, "stopping tolerance")->check(CLI::PositiveNumber);
    if (sp.anchor) sub->add_option("--anchor", cfg.anchor, "1-based x atom with phi = 0 (default 1)")->check(CLI::PositiveNumber);
    if (sp.seed) {
      sub->add_option("--seed", cfg.seed, "seed of the random batch (default 0)");
      sub->add_option("--count", cfg.count, "number of random instances (default 100)");
    }
    sub->callback([&cfg, sub] { cfg.command = sub->get_name(); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error(1, "invalid_argument", "arguments", e.what());
  }
  return run(cfg);
}
