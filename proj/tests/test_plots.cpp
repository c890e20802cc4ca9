#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include <Eigen/Dense>

#include "fixtures.hpp"
#include "strhc/plots.hpp"
#include "strhc/reach.hpp"
#include "strhc/scenario.hpp"
#include "strhc/simulate.hpp"

using Eigen::VectorXd;
using namespace strhc;

namespace {

struct Fixture {
  reach::ControllableFamily fam;
  sim::SimTrace trace;
};

const Fixture& fixture() {
  static const Fixture fx = [] {
    auto bench = fixtures::benchmark();
    reach::SynthesisOptions opt;
    opt.tau = bench.tau;
    opt.ring_count = 12;
    opt.violation_window = bench.violation_window;
    opt.cost_family_size = bench.cost_family_size;
    opt.watermark_seed = 2024;
    Fixture out{reach::synthesize_family(bench.plant, opt), {}};

    sim::Scenario sc;
    sc.x0 = 0.05 * (VectorXd(2) << -1.09, 5.11).finished();
    sc.horizon = 40;
    sc.disturbance_seed = 11;
    sc.watermark_seed = 2024;
    sc.rekey_steps = bench.tau;
    sc.violation_window = bench.violation_window;
    sc.synth = opt;
    adv::AttackAction dos;
    dos.t_start = 6;
    dos.t_end = 7;
    dos.channel = adv::Channel::Actuator;
    dos.kind = adv::Kind::Dos;
    sc.attacks.actions = {dos};
    out.trace = sim::run_scenario(sc, bench.plant, out.fam);
    return out;
  }();
  return fx;
}

void check_svg(const std::string& svg) {
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("nan") == std::string::npos);
  CHECK(svg.find("inf") == std::string::npos);
}

size_t count_of(const std::string& hay, const std::string& needle) {
  size_t n = 0;
  for (size_t at = hay.find(needle); at != std::string::npos; at = hay.find(needle, at + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("trajectory plot draws every ring outline and the path") {
  const auto& fx = fixture();
  auto svg = plot::trajectory_svg(fx.trace, fx.fam);
  check_svg(svg);
  CHECK(count_of(svg, "<polygon") == fx.fam.state_sets.size());
  CHECK(count_of(svg, "<polyline") == 1);
}

TEST_CASE("timeline plots are well formed and mark the alarm steps") {
  const auto& fx = fixture();
  auto inputs = plot::inputs_svg(fx.trace);
  auto levels = plot::levels_svg(fx.trace);
  auto flags = plot::flags_svg(fx.trace);
  check_svg(inputs);
  check_svg(levels);
  check_svg(flags);

  size_t alarms = 0;
  for (const auto& r : fx.trace.steps) alarms += r.detector ? 1 : 0;
  REQUIRE(alarms > 0);
  CHECK(count_of(levels, "opacity=\"0.12\"") == alarms);
  CHECK(count_of(flags, "#e4572e") >= alarms);
}

TEST_CASE("an empty trace still renders placeholders") {
  const auto& fx = fixture();
  sim::SimTrace empty;
  check_svg(plot::trajectory_svg(empty, fx.fam));
  check_svg(plot::inputs_svg(empty));
  check_svg(plot::levels_svg(empty));
  check_svg(plot::flags_svg(empty));
  CHECK(plot::inputs_svg(empty).find("empty trace") != std::string::npos);
}

TEST_CASE("emit writes the four documents") {
  const auto& fx = fixture();
  const std::string dir = "plots_test_out";
  std::filesystem::remove_all(dir);
  plot::emit_plots(fx.trace, fx.fam, dir);
  for (const char* name : {"trajectory.svg", "inputs.svg", "levels.svg", "flags.svg"})
    CHECK(std::filesystem::file_size(dir + "/" + std::string(name)) > 500);
  std::filesystem::remove_all(dir);
}
