#include <fstream>

#include "doctest.h"
#include "edgeagent/error.hpp"
#include "edgeagent/host/model.hpp"
#include "edgeagent/host/runtime.hpp"
#include "support/fixtures.hpp"
#include "support/tempdir.hpp"

using namespace edgeagent;
using nlohmann::json;

namespace {

std::string scenario_path(const std::string& name) { return std::string(EDGEAGENT_SCENARIO_DIR) + "/" + name; }

json shop_scenario(json script) {
  return {{"name", "inline"}, {"apps", json::array({json::parse(testing::kShopJson)})}, {"script", std::move(script)}};
}

host::ScenarioReport run_inline(const json& j) {
  auto sc = host::parse_scenario(j);
  host::Runtime rt(sc);
  return host::run_script(sc, rt);
}

Errc parse_error_of(const json& j) {
  try {
    host::parse_scenario(j);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidArgument;
}

}  // namespace

TEST_CASE("the demo scenarios pass") {
  for (const char* name : {"demo_a1.json", "demo_a2.json", "demo_b.json", "demo_c.json"}) {
    auto report = host::run_scenario(scenario_path(name));
    for (const auto& e : report.expectations)
      CHECK_MESSAGE(e.passed, name << " step " << e.step << " " << e.probe << ": " << e.message);
    CHECK(report.ok());
    CHECK(report.passed() > 5);
    CHECK(report.steps_executed > 0);
  }
}

TEST_CASE("malformed scenarios are ParseErrors") {
  CHECK(parse_error_of(shop_scenario(json::object())) == Errc::ParseError);
  auto bad_rule = shop_scenario(json::array());
  bad_rule["rules"] = json::array({{{"then", "teleport"}}});
  CHECK(parse_error_of(bad_rule) == Errc::ParseError);
  CHECK(parse_error_of({{"name", "x"}, {"apps", 3}}) == Errc::ParseError);

  testing::TempDir dir;
  auto path = dir.path() / "broken.json";
  std::ofstream(path) << "{ not json";
  try {
    host::load_scenario(path);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ParseError);
  }
}

TEST_CASE("an empty script runs nothing and passes") {
  auto r = run_inline(shop_scenario(json::array()));
  CHECK(r.steps_executed == 0);
  CHECK(r.expectations.empty());
  CHECK(r.ok());
}

TEST_CASE("a failing expectation names its step and label") {
  json script = json::array({
      {{"step", "launch"}, {"intent", {{"action", "android.intent.action.MAIN"}, {"component", "shop/Home"}}}},
      {{"step", "expect"}, {"probe", "foreground_activity"}, {"equals", "Home"}},
      {{"step", "expect"}, {"probe", "foreground_activity"}, {"equals", "Nowhere"}, {"label", "wrong page"}},
  });
  auto r = run_inline(shop_scenario(script));
  REQUIRE(r.expectations.size() == 2);
  CHECK(r.expectations[0].passed);
  CHECK_FALSE(r.expectations[1].passed);
  CHECK(r.expectations[1].step == 2);
  CHECK(r.expectations[1].message.find("wrong page") == 0);
  CHECK(r.expectations[1].actual == "Home");
  CHECK(r.failed() == 1);
  auto j = host::to_json(r);
  CHECK(j.dump().find("Nowhere") != std::string::npos);
}

TEST_CASE("step errors are reported, and expected errors pass") {
  json script = json::array({
      {{"step", "gesture"}, {"gesture", {{"tap", {10, 10}}}}},
      {{"step", "gesture"}, {"gesture", {{"tap", {10, 10}}}}, {"expect_error", "NoForeground"}},
      {{"step", "expect"}, {"probe", "last_error"}, {"equals", "NoForeground"}},
      {{"step", "levitate"}},
  });
  auto r = run_inline(shop_scenario(script));
  REQUIRE(r.expectations.size() == 4);
  CHECK_FALSE(r.expectations[0].passed);
  CHECK(r.expectations[1].passed);
  CHECK(r.expectations[2].passed);
  CHECK_FALSE(r.expectations[3].passed);
  CHECK(r.steps_executed == 4);
}

TEST_CASE("runtime state persists under its root") {
  testing::TempDir dir;
  host::RuntimeOptions opts;
  opts.root = dir.path();
  auto report = host::run_scenario(scenario_path("demo_c.json"), opts);
  REQUIRE(report.ok());
  CHECK(std::filesystem::exists(dir.path() / "skills"));
  CHECK(std::filesystem::exists(dir.path() / "bookmarks"));
  CHECK(std::filesystem::exists(dir.path() / "traces"));

  auto sc = host::load_scenario(scenario_path("demo_c.json"));
  host::Runtime again(sc, opts);
  CHECK(again.bookmarks().size() >= 1);
  CHECK(again.skills().size() >= 1);
  auto name = again.bookmarks().list().front().name;
  auto out = again.replay(name);
  CHECK(out.attempts.back().success);

  try {
    again.replay("no such bookmark");
    FAIL("expected NotFound");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotFound);
  }
}

TEST_CASE("a temporary root is removed with its runtime") {
  std::filesystem::path root;
  {
    auto sc = host::parse_scenario(shop_scenario(json::array()));
    host::Runtime rt(sc);
    root = rt.root();
    CHECK(std::filesystem::exists(root));
  }
  CHECK_FALSE(std::filesystem::exists(root));
}

TEST_CASE("nothing above touches the network") {
  CHECK_FALSE(host::ModelEndpointConfig::from_env().enabled);
  CHECK(host::network_operations() == 0);
}
