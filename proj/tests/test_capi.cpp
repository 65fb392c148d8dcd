#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "otdual/otdual.h"

using nlohmann::json;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(OTDUAL_FIXTURES) + "/" + name, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json take(char* text) {
  REQUIRE(text != nullptr);
  json j = json::parse(text);
  otd_string_free(text);
  return j;
}

struct Inst {
  otd_instance* p = nullptr;
  explicit Inst(const std::string& name) { REQUIRE(otd_instance_parse(slurp(name).c_str(), &p) == OTD_OK); }
  ~Inst() { otd_instance_free(p); }
};

}  // namespace

TEST_CASE("instance handles report dimensions and the exact value") {
  Inst in("second_worked_example.json");
  size_t nx = 0, ny = 0;
  CHECK(otd_instance_dims(in.p, &nx, &ny) == OTD_OK);
  CHECK(nx == 4);
  CHECK(ny == 5);
  char* v = nullptr;
  REQUIRE(otd_ot_value(in.p, &v) == OTD_OK);
  CHECK(std::string(v) == "3/4");
  otd_string_free(v);
}

TEST_CASE("first worked example through the C API") {
  Inst in("first_worked_example.json");
  char* out = nullptr;
  REQUIRE(otd_duals_json(in.p, 1, &out) == OTD_OK);
  json d = take(out);
  CHECK(d.dump().find("\"unique\":true") != std::string::npos);
  REQUIRE(otd_solve_json(in.p, 1, &out) == OTD_OK);
  json s = take(out);
  CHECK(s["value"] == "0");
}

TEST_CASE("centroid example through the C API") {
  Inst in("centroid_example.json");
  char* out = nullptr;
  REQUIRE(otd_centroid_json(in.p, 1, &out) == OTD_OK);
  json c = take(out);
  CHECK(c["phi"] == json({"0", "-1", "-1", "-1/2"}));
  CHECK(c["psi"] == json({"1", "2", "1", "3/2", "3/2"}));
  REQUIRE(otd_sinkhorn_json(in.p, 0.01, 1e-9, 1, &out) == OTD_OK);
  json s = take(out);
  CHECK(s["converged"] == true);
}

TEST_CASE("errors leave the output null and describe themselves") {
  otd_instance* p = nullptr;
  CHECK(otd_instance_parse(slurp("malformed.json").c_str(), &p) == OTD_ERR_SCHEMA);
  CHECK(p == nullptr);
  json e = json::parse(otd_last_error());
  CHECK(e["error"]["code"] == 1);
  CHECK(otd_instance_parse(slurp("invalid_mu_sum.json").c_str(), &p) == OTD_ERR_INCONSISTENT);
  CHECK(json::parse(otd_last_error())["error"]["code"] == 2);
  CHECK(otd_instance_parse(nullptr, &p) != OTD_OK);

  Inst in("centroid_example.json");
  char* out = reinterpret_cast<char*>(1);
  CHECK(otd_centroid_json(in.p, 99, &out) == OTD_ERR_INVALID_ARGUMENT);
  CHECK(out == nullptr);
  CHECK(otd_sinkhorn_json(in.p, -1.0, 1e-9, 1, &out) == OTD_ERR_INVALID_ARGUMENT);
  CHECK(otd_solve_json(nullptr, 1, &out) != OTD_OK);
  otd_instance_free(nullptr);
  otd_string_free(nullptr);
}

TEST_CASE("validate and game entry points") {
  char* out = nullptr;
  REQUIRE(otd_validate_json(nullptr, 3, 5, &out) == OTD_OK);
  json v = take(out);
  CHECK(v.dump().find("\"passed\":false") == std::string::npos);

  otd_game* g = nullptr;
  REQUIRE(otd_game_parse(slurp("game_eight_actions.json").c_str(), &g) == OTD_OK);
  REQUIRE(otd_cne_json(g, 0.1, 1e-7, &out) == OTD_OK);
  json cne = take(out);
  CHECK(cne["nu"].size() == 8);
  CHECK(otd_cne_json(g, 0.0, 1e-7, &out) == OTD_ERR_INVALID_ARGUMENT);
  otd_game_free(g);
  CHECK(std::string(otd_version()).size() > 0);
}
