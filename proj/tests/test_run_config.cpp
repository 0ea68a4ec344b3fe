#include <doctest.h>

#include "z2edge/run_config.hpp"

using namespace z2edge;
using nlohmann::json;

TEST_CASE("empty config resolves to defaults") {
  const RunConfig c = parse_config(json::object());
  CHECK(c.model.lx == 16);
  CHECK(c.tolerance.tol_sweep.size() == 6);
  CHECK(c.wants("json"));
  CHECK(c.model_spec().geometry.boundary_y() == Boundary::periodic);
  CHECK(c.index_settings().localization_threshold == 0.9);
}

TEST_CASE("config round-trips through JSON") {
  json j = {{"model", {{"mass", 0.5}, {"seed", 7}, {"lx", 12}}},
            {"scan", {{"mass", {0.5, 1.0}},
                      {"variants", {{{"lambda_r", 0.3}, {"disorder", 0.5}, {"seeds", {1, 2}}}}}}},
            {"output", {{"formats", {"csv"}}}}};
  const RunConfig c = parse_config(j);
  CHECK(c.model.mass == 0.5);
  CHECK(c.model.seed == 7);
  CHECK(c.scan.variants.at(0).seeds.size() == 2);
  CHECK_FALSE(c.wants("json"));
  CHECK(to_json(parse_config(to_json(c))) == to_json(c));
}

TEST_CASE("strict parsing rejects unknown keys, wrong types and bad values") {
  CHECK_THROWS_AS(parse_config({{"modle", json::object()}}), InvalidArgument);
  CHECK_THROWS_AS(parse_config({{"model", {{"mas", 1.0}}}}), InvalidArgument);
  CHECK_THROWS_AS(parse_config({{"model", {{"mass", "one"}}}}), InvalidArgument);
  CHECK_THROWS_AS(parse_config({{"model", {{"seed", -1}}}}), InvalidArgument);
  CHECK_THROWS_AS(parse_config({{"model", {{"lx", 1.5}}}}), InvalidArgument);
  CHECK_THROWS_AS(parse_config({{"tolerance", {{"tol_sweep", json::array()}}}}),
                  InvalidArgument);
  CHECK_THROWS_AS(parse_config({{"wold", {{"source", "magic"}}}}), InvalidArgument);
  CHECK_THROWS_AS(parse_config({{"output", {{"formats", {"xml"}}}}}), InvalidArgument);
  CHECK_THROWS_AS(parse_config(json::array()), InvalidArgument);
}

TEST_CASE("number formatting is exact and stable") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(2.0) == "2");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}
