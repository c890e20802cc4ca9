#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "fixtures.hpp"
#include "strhc/cli.hpp"
#include "strhc/json_io.hpp"
#include "strhc/trace.hpp"

using Eigen::VectorXd;
using nlohmann::json;
using namespace strhc;

namespace {

struct Invocation {
  int status = 0;
  std::string out;
  std::string err;
  json parsed() const { return json::parse(out); }
};

Invocation invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  Invocation r;
  r.status = cli::run_cli(std::move(args), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct Workspace {
  std::filesystem::path dir{"cli_test_tmp"};
  std::string model, scenario;

  Workspace() {
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    auto bench = fixtures::benchmark();
    model = (dir / "model.json").string();
    sim::write_file(model, io::model_to_json(bench.plant));

    sim::Scenario sc;
    sc.x0 = 0.05 * (VectorXd(2) << -1.09, 5.11).finished();
    sc.horizon = 40;
    sc.disturbance_seed = 11;
    sc.watermark_seed = 2024;
    sc.rekey_steps = bench.tau;
    sc.violation_window = bench.violation_window;
    sc.synth.tau = bench.tau;
    sc.synth.ring_count = 12;
    sc.synth.violation_window = bench.violation_window;
    sc.synth.cost_family_size = bench.cost_family_size;
    sc.synth.watermark_seed = 2024;
    adv::AttackAction dos;
    dos.t_start = 6;
    dos.t_end = 7;
    dos.channel = adv::Channel::Actuator;
    dos.kind = adv::Kind::Dos;
    sc.attacks.actions = {dos};
    scenario = (dir / "scenario.json").string();
    sim::write_file(scenario, io::scenario_to_json(sc));
  }
  ~Workspace() { std::filesystem::remove_all(dir); }

  std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("synth writes a cache that run and verify reuse") {
  Workspace ws;
  auto cache = ws.path("cache.json");

  auto synth = invoke({"synth", "--model", ws.model, "--scenario", ws.scenario, "--out", cache});
  REQUIRE(synth.status == 0);
  auto sj = synth.parsed();
  CHECK(sj["ok"] == true);
  CHECK(sj["rings"] == 12);
  CHECK(sj["max_safe_index"].get<int>() >= 1);
  REQUIRE(std::filesystem::exists(cache));

  auto run = invoke({"run", "--model", ws.model, "--scenario", ws.scenario, "--cache", cache,
                     "--out", ws.path("run1")});
  REQUIRE(run.status == 0);
  auto rj = run.parsed();
  CHECK(rj["ok"] == true);
  CHECK(rj["aborted"] == false);
  CHECK(rj["steps"] == 40);
  CHECK(rj["family_from_cache"] == true);
  CHECK(rj["alarms"].get<int>() >= 1);
  CHECK(rj["first_alarm"] == 7);
  CHECK(rj["final_level"] == 0);
  CHECK(std::filesystem::exists(ws.path("run1/trace.csv")));
  CHECK(std::filesystem::exists(ws.path("run1/trajectory.svg")));
  CHECK(std::filesystem::exists(ws.path("run1/flags.svg")));

  auto again = invoke({"run", "--model", ws.model, "--scenario", ws.scenario, "--cache", cache,
                       "--out", ws.path("run2"), "--no-plots"});
  REQUIRE(again.status == 0);
  CHECK_FALSE(std::filesystem::exists(ws.path("run2/trajectory.svg")));
  CHECK(sim::read_file(ws.path("run1/trace.csv")) == sim::read_file(ws.path("run2/trace.csv")));

  auto reseeded = invoke({"run", "--model", ws.model, "--scenario", ws.scenario, "--cache", cache,
                          "--out", ws.path("run3"), "--no-plots", "--seed", "99"});
  REQUIRE(reseeded.status == 0);
  CHECK(sim::read_file(ws.path("run1/trace.csv")) != sim::read_file(ws.path("run3/trace.csv")));

  auto verify = invoke({"verify", "--model", ws.model, "--scenario", ws.scenario, "--cache", cache});
  REQUIRE(verify.status == 0);
  auto vj = verify.parsed();
  CHECK(vj["ok"] == true);
  CHECK(vj["family_from_cache"] == true);
}

TEST_CASE("inspect reports cache freshness") {
  Workspace ws;
  auto cache = ws.path("cache.json");
  REQUIRE(invoke({"synth", "--model", ws.model, "--scenario", ws.scenario, "--out", cache}).status ==
          0);

  auto fresh = invoke({"inspect", "--model", ws.model, "--scenario", ws.scenario, "--cache", cache});
  REQUIRE(fresh.status == 0);
  auto fj = fresh.parsed();
  CHECK(fj["cache"] == "fresh");
  CHECK(fj["rings"] == 12);
  CHECK(fj["attack_count"] == 1);

  auto sc = io::scenario_from_json(sim::read_file(ws.scenario));
  sc.synth.watermark_seed = 2025;
  sc.watermark_seed = 2025;
  auto other = ws.path("scenario2.json");
  sim::write_file(other, io::scenario_to_json(sc));
  auto stale = invoke({"inspect", "--model", ws.model, "--scenario", other, "--cache", cache});
  REQUIRE(stale.status == 0);
  CHECK(stale.parsed()["cache"] == "stale");

  auto bare = invoke({"inspect", "--model", ws.model});
  REQUIRE(bare.status == 0);
  CHECK(bare.parsed()["state_dim"] == 2);
}

TEST_CASE("verify rejects an infeasible start") {
  Workspace ws;
  auto sc = io::scenario_from_json(sim::read_file(ws.scenario));
  sc.x0 = (VectorXd(2) << -1.09, 5.11).finished();
  auto bad = ws.path("bad_scenario.json");
  sim::write_file(bad, io::scenario_to_json(sc));

  auto verify = invoke({"verify", "--model", ws.model, "--scenario", bad});
  CHECK(verify.status == 1);
  auto vj = verify.parsed();
  CHECK(vj["ok"] == false);
  CHECK(vj["error"].get<std::string>().size() > 0);
}

TEST_CASE("usage errors exit with status two") {
  Workspace ws;
  CHECK(invoke({}).status == 2);
  CHECK(invoke({"launch"}).status == 2);
  CHECK(invoke({"run", "--model", ws.model}).status == 2);
  CHECK(invoke({"run", "--model", ws.path("missing.json"), "--scenario", ws.scenario}).status == 2);
  CHECK(invoke({"run", "--model", ws.model, "--scenario", ws.scenario, "--frobnicate"}).status ==
        2);
  CHECK(invoke({"--help"}).status == 0);
}

TEST_CASE("a malformed document is a runtime failure, not a usage error") {
  Workspace ws;
  auto garbled = ws.path("garbled.json");
  sim::write_file(garbled, "{\"kind\": \"plant\"");
  auto r = invoke({"inspect", "--model", garbled});
  CHECK(r.status == 1);
  CHECK(r.parsed()["ok"] == false);
}
