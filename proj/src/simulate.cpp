#include "strhc/simulate.hpp"

#include <optional>

#include "strhc/adversary.hpp"
#include "strhc/controller.hpp"
#include "strhc/guard.hpp"
#include "strhc/rng.hpp"

namespace strhc::sim {

namespace {

int true_level(const reach::ControllableFamily& fam, const Eigen::VectorXd& x) {
  for (int i = 0; i <= fam.ring_count(); ++i)
    if (geom::contains(fam.state_sets[static_cast<size_t>(i)], x)) return i;
  return -1;
}

bool script_has_stealthy(const adv::AttackScript& script) {
  for (const auto& a : script.actions)
    if (a.kind == adv::Kind::Stealthy) return true;
  return false;
}

}  // namespace

SimTrace run_scenario(const Scenario& sc, const model::SystemModel& m,
                      const reach::ControllableFamily& fam) {
  validate_scenario(sc, m, fam);

  SimTrace trace;
  rng::Stream disturbances(sc.disturbance_seed);
  const geom::Box dx_box = geom::bounding_box(m.process_noise);
  const geom::Box dy_box = geom::bounding_box(m.measurement_noise);

  auto menu = ctrl::draw_cost_family(fam, sc.watermark_seed);
  ctrl::Automaton automaton(m, fam, menu, sc.watermark_seed);
  guard::GuardState guard_state;
  guard_state.u_prev = Eigen::VectorXd::Zero(m.input_dim());

  std::optional<adv::AttackerKnowledge> knowledge;
  if (script_has_stealthy(sc.attacks)) knowledge = adv::make_knowledge(m, fam);

  std::optional<geom::Polytope> reference;
  std::optional<Eigen::VectorXd> pending_forgery;
  Eigen::VectorXd x = sc.x0;
  bool need_reinit = true;

  for (int t = 0; t < sc.horizon; ++t) {
    StepRecord r;
    r.t = t;
    r.seconds = t * sc.sample_time;
    r.dx = rng::sample_box(disturbances, dx_box);
    r.dy = rng::sample_box(disturbances, dy_box);
    r.x = x;
    r.y = model::measure(m, x, r.dy);

    const bool channels_up = automaton.status() == ctrl::Status::NoAttack;
    const adv::AttackAction* sensor_action =
        channels_up ? adv::active_action(sc.attacks, t, adv::Channel::Sensor) : nullptr;
    const adv::AttackAction* actuator_action =
        channels_up ? adv::active_action(sc.attacks, t, adv::Channel::Actuator) : nullptr;

    std::optional<Eigen::VectorXd> reported;
    if (channels_up) {
      if (sensor_action && sensor_action->kind == adv::Kind::Stealthy)
        reported = pending_forgery.value_or(r.y);
      else if (sensor_action)
        reported = adv::corrupt_sensor(r.y, *sensor_action);
      else
        reported = r.y;
    }
    r.y_reported = reported;

    auto verdict = guard::detect(reference, reported);
    r.detector = verdict == guard::Verdict::Attack;
    const bool flagged =
        r.detector || (channels_up && !reported.has_value());

    ctrl::StepDecision dec;
    try {
      dec = automaton.step(flagged,
                           reported.value_or(Eigen::VectorXd::Zero(m.state_dim())));
    } catch (const ctrl::OutOfDomain& e) {
      trace.aborted = true;
      trace.abort_step = t;
      trace.abort_reason = e.what();
      r.level = true_level(fam, x);
      r.u_applied = Eigen::VectorXd::Zero(m.input_dim());
      trace.steps.push_back(std::move(r));
      return trace;
    }

    std::optional<adv::StealthyDecision> sd;
    if (!dec.silent && actuator_action && actuator_action->kind == adv::Kind::Stealthy &&
        knowledge.has_value() && reported.has_value()) {
      auto decision =
          adv::stealthy_step(*knowledge, *reported, r.y, actuator_action->goal_weight);
      if (!decision.passive) sd = std::move(decision);
    }

    std::optional<Eigen::VectorXd> incoming;
    if (!dec.silent) {
      if (sd.has_value())
        incoming = dec.command + sd->injection;
      else if (actuator_action)
        incoming = adv::corrupt_actuator(dec.command, *actuator_action);
      else
        incoming = dec.command;
    }
    r.u_command = dec.silent ? std::nullopt : std::optional<Eigen::VectorXd>(dec.command);
    r.u_delivered = incoming;

    if (dec.silent) {
      reference.reset();
      pending_forgery.reset();
      need_reinit = true;
    } else {
      if (need_reinit) {
        guard::reinitialize(guard_state, dec.level);
        need_reinit = false;
      }
      reference = model::output_prediction_set(m, *reported, dec.command, true);
      pending_forgery = sd.has_value() ? std::optional<Eigen::VectorXd>(sd->forgery)
                                       : std::nullopt;
    }

    auto applied = guard::actuator_step(guard_state, fam, incoming, r.y);
    r.u_applied = applied.input;
    r.pre_ok = applied.pre_ok;
    r.post_ok = applied.post_ok;
    r.mode = static_cast<int>(applied.mode);
    r.i_hat = applied.i_hat;
    r.level = true_level(fam, x);
    r.cost_index = dec.cost_index;
    r.status = dec.status == ctrl::Status::Attack ? 1 : 0;
    r.timer = dec.timer;
    trace.steps.push_back(std::move(r));

    x = model::step(m, x, applied.input, trace.steps.back().dx);
  }
  return trace;
}

}  // namespace strhc::sim
