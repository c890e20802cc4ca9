#include "strhc/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "strhc/json_io.hpp"
#include "strhc/plots.hpp"
#include "strhc/reach.hpp"
#include "strhc/scenario.hpp"
#include "strhc/simulate.hpp"
#include "strhc/trace.hpp"

namespace strhc::cli {
namespace {

using nlohmann::json;

struct Args {
  std::string model_path;
  std::string scenario_path;
  std::string cache_path;
  std::string out_dir = "out";
  bool no_plots = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

model::SystemModel load_model(const Args& a) {
  return io::model_from_json(sim::read_file(a.model_path));
}

sim::Scenario load_scenario(const Args& a) {
  auto sc = io::scenario_from_json(sim::read_file(a.scenario_path));
  if (a.seed_set) sc.disturbance_seed = a.seed;
  return sc;
}

// Cache file when fresh, otherwise a new synthesis (written back to the
// cache path when one was given).
reach::ControllableFamily obtain_family(const Args& a, const model::SystemModel& m,
                                        const reach::SynthesisOptions& opt, bool* fresh_cache) {
  if (fresh_cache) *fresh_cache = false;
  if (!a.cache_path.empty() && std::filesystem::exists(a.cache_path)) {
    auto cached = io::family_from_cache(sim::read_file(a.cache_path), m, opt);
    if (cached) {
      if (fresh_cache) *fresh_cache = true;
      return std::move(*cached);
    }
  }
  auto fam = reach::synthesize_family(m, opt);
  if (!a.cache_path.empty()) sim::write_file(a.cache_path, io::family_to_cache(fam, m, opt));
  return fam;
}

int cmd_synth(const Args& a, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  auto m = load_model(a);
  auto sc = load_scenario(a);
  auto fam = reach::synthesize_family(m, sc.synth);
  sim::write_file(a.cache_path, io::family_to_cache(fam, m, sc.synth));
  out << json{{"ok", true},
              {"rings", fam.ring_count()},
              {"max_safe_index", fam.max_safe_index},
              {"start_region", sim::start_region_index(fam, sc.violation_window)},
              {"digest", io::family_digest(m, sc.synth)},
              {"cache", a.cache_path},
              {"seconds", seconds_since(t0)}}
             .dump()
      << "\n";
  return 0;
}

int cmd_run(const Args& a, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  auto m = load_model(a);
  auto sc = load_scenario(a);
  bool fresh_cache = false;
  auto fam = obtain_family(a, m, sc.synth, &fresh_cache);
  auto trace = sim::run_scenario(sc, m, fam);

  std::filesystem::create_directories(a.out_dir);
  const std::string trace_path = a.out_dir + "/trace.csv";
  sim::write_file(trace_path, sim::to_csv(trace, m.state_dim(), m.input_dim(),
                                          m.process_noise_dim()));
  json plots = json::array();
  if (!a.no_plots) {
    plot::emit_plots(trace, fam, a.out_dir);
    for (const char* name : {"trajectory.svg", "inputs.svg", "levels.svg", "flags.svg"})
      plots.push_back(a.out_dir + "/" + std::string(name));
  }

  int alarms = 0, first_alarm = -1;
  for (const auto& r : trace.steps) {
    if (!r.detector) continue;
    ++alarms;
    if (first_alarm < 0) first_alarm = r.t;
  }
  json summary{{"ok", !trace.aborted},
               {"steps", trace.steps.size()},
               {"aborted", trace.aborted},
               {"alarms", alarms},
               {"first_alarm", first_alarm},
               {"family_from_cache", fresh_cache},
               {"trace", trace_path},
               {"plots", plots},
               {"seconds", seconds_since(t0)}};
  if (trace.aborted) {
    summary["abort_step"] = trace.abort_step;
    summary["abort_reason"] = trace.abort_reason;
  }
  if (!trace.steps.empty()) {
    const auto& last = trace.steps.back();
    summary["final_level"] = last.level;
    json xs = json::array();
    for (Eigen::Index i = 0; i < last.x.size(); ++i) xs.push_back(last.x(i));
    summary["final_state"] = std::move(xs);
  }
  out << summary.dump() << "\n";
  return trace.aborted ? 1 : 0;
}

int cmd_inspect(const Args& a, std::ostream& out) {
  auto m = load_model(a);
  json doc{{"ok", true},
           {"state_dim", m.state_dim()},
           {"input_dim", m.input_dim()},
           {"process_noise_dim", m.process_noise_dim()},
           {"state_rows", m.state_set.row_count()},
           {"input_rows", m.input_set.row_count()}};
  if (!a.scenario_path.empty()) {
    auto sc = load_scenario(a);
    doc["horizon"] = sc.horizon;
    doc["attack_count"] = sc.attacks.actions.size();
    doc["digest"] = io::family_digest(m, sc.synth);
    if (!a.cache_path.empty()) {
      if (!std::filesystem::exists(a.cache_path)) {
        doc["cache"] = "missing";
      } else if (auto fam = io::family_from_cache(sim::read_file(a.cache_path), m, sc.synth)) {
        doc["cache"] = "fresh";
        doc["rings"] = fam->ring_count();
        doc["max_safe_index"] = fam->max_safe_index;
        doc["start_region"] = sim::start_region_index(*fam, sc.violation_window);
      } else {
        doc["cache"] = "stale";
      }
    }
  }
  out << doc.dump() << "\n";
  return 0;
}

int cmd_verify(const Args& a, std::ostream& out) {
  auto m = load_model(a);
  auto sc = load_scenario(a);
  bool fresh_cache = false;
  auto fam = obtain_family(a, m, sc.synth, &fresh_cache);
  reach::validate_family(m, fam);
  sim::validate_scenario(sc, m, fam);
  out << json{{"ok", true},
              {"checks", {"plant", "family", "scenario"}},
              {"family_from_cache", fresh_cache},
              {"rings", fam.ring_count()},
              {"start_region", sim::start_region_index(fam, sc.violation_window)}}
             .dump()
      << "\n";
  return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  Args a;
  CLI::App app{"resilient set-theoretic receding-horizon control simulator"};
  app.require_subcommand(1);

  auto add_model = [&](CLI::App* cmd) {
    cmd->add_option("--model", a.model_path, "plant description (json)")
        ->required()
        ->check(CLI::ExistingFile);
  };
  auto add_scenario = [&](CLI::App* cmd, bool required) {
    auto* o = cmd->add_option("--scenario", a.scenario_path, "experiment description (json)");
    if (required)
      o->required()->check(CLI::ExistingFile);
    else
      o->check(CLI::ExistingFile);
  };

  auto* synth = app.add_subcommand("synth", "synthesize the ring family and write the cache");
  add_model(synth);
  add_scenario(synth, true);
  synth->add_option("--out", a.cache_path, "cache file to write")->required();

  auto* run = app.add_subcommand("run", "run a scripted closed-loop experiment");
  add_model(run);
  add_scenario(run, true);
  run->add_option("--cache", a.cache_path, "family cache file (reused when fresh)");
  run->add_option("--out", a.out_dir, "output directory (default: out)");
  auto* seed_opt = run->add_option("--seed", a.seed, "override the disturbance seed");
  run->add_flag("--no-plots", a.no_plots, "skip the SVG plots");

  auto* inspect = app.add_subcommand("inspect", "summarize a plant, scenario, and cache");
  add_model(inspect);
  add_scenario(inspect, false);
  inspect->add_option("--cache", a.cache_path, "family cache file")
      ->needs(inspect->get_option("--scenario"));

  auto* verify = app.add_subcommand("verify", "validate plant, family, and scenario together");
  add_model(verify);
  add_scenario(verify, true);
  verify->add_option("--cache", a.cache_path, "family cache file (reused when fresh)");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }
  a.seed_set = seed_opt->count() > 0;

  try {
    if (app.got_subcommand(synth)) return cmd_synth(a, out);
    if (app.got_subcommand(run)) return cmd_run(a, out);
    if (app.got_subcommand(inspect)) return cmd_inspect(a, out);
    return cmd_verify(a, out);
  } catch (const std::exception& e) {
    out << json{{"ok", false}, {"error", e.what()}}.dump() << "\n";
    return 1;
  }
}

}  // namespace strhc::cli
