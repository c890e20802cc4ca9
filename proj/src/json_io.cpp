#include "strhc/json_io.hpp"

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace strhc::io {
namespace {

using nlohmann::json;

json parse_document(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw std::invalid_argument("json: malformed document");
  return doc;
}

const json& field(const json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end())
    throw std::invalid_argument(std::string("json: missing field '") + name + "'");
  return *it;
}

const json& array_field(const json& doc, const char* name) {
  const auto& f = field(doc, name);
  if (!f.is_array())
    throw std::invalid_argument(std::string("json: '") + name + "' must be an array");
  return f;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& doc, const char* name) {
  if (!doc.is_array()) throw std::invalid_argument(std::string("json: '") + name + "' must be an array of rows");
  const auto nrows = static_cast<Eigen::Index>(doc.size());
  if (nrows == 0) return Eigen::MatrixXd(0, 0);
  if (!doc[0].is_array())
    throw std::invalid_argument(std::string("json: '") + name + "' rows must be arrays");
  const auto ncols = static_cast<Eigen::Index>(doc[0].size());
  Eigen::MatrixXd m(nrows, ncols);
  for (Eigen::Index i = 0; i < nrows; ++i) {
    const auto& row = doc[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != ncols)
      throw std::invalid_argument(std::string("json: '") + name + "' rows have uneven width");
    for (Eigen::Index j = 0; j < ncols; ++j) {
      const auto& cell = row[static_cast<size_t>(j)];
      if (!cell.is_number())
        throw std::invalid_argument(std::string("json: '") + name + "' entries must be numbers");
      m(i, j) = cell.get<double>();
    }
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from_json(const json& doc, const char* name) {
  if (!doc.is_array()) throw std::invalid_argument(std::string("json: '") + name + "' must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(doc.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const auto& cell = doc[static_cast<size_t>(i)];
    if (!cell.is_number())
      throw std::invalid_argument(std::string("json: '") + name + "' entries must be numbers");
    v(i) = cell.get<double>();
  }
  return v;
}

json polytope_to_json(const geom::Polytope& p) {
  json doc;
  doc["dim"] = p.dim();
  doc["normals"] = matrix_to_json(p.normals());
  doc["offsets"] = vector_to_json(p.offsets());
  return doc;
}

geom::Polytope polytope_from_json(const json& doc, const char* name) {
  if (!doc.is_object())
    throw std::invalid_argument(std::string("json: '") + name + "' must be an object");
  const auto& dim_field = field(doc, "dim");
  if (!dim_field.is_number_integer() || dim_field.get<int>() < 0)
    throw std::invalid_argument(std::string("json: '") + name + "' has a bad dimension");
  const int dim = dim_field.get<int>();
  Eigen::MatrixXd normals = matrix_from_json(field(doc, "normals"), name);
  Eigen::VectorXd offsets = vector_from_json(field(doc, "offsets"), name);
  if (dim == 0) {
    // Placeholder slot (a family stores one where no set applies).
    if (normals.rows() != 0 || offsets.size() != 0)
      throw std::invalid_argument(std::string("json: '") + name + "' row count mismatch");
    return geom::Polytope();
  }
  if (normals.rows() == 0) {
    if (offsets.size() != 0)
      throw std::invalid_argument(std::string("json: '") + name + "' row count mismatch");
    return geom::Polytope(dim);
  }
  if (normals.cols() != dim || normals.rows() != offsets.size())
    throw std::invalid_argument(std::string("json: '") + name + "' row count mismatch");
  return geom::Polytope::from_inequalities(normals, offsets);
}

int int_from(const json& doc, const char* name) {
  const auto& f = field(doc, name);
  if (!f.is_number_integer())
    throw std::invalid_argument(std::string("json: '") + name + "' must be an integer");
  return f.get<int>();
}

double double_from(const json& doc, const char* name) {
  const auto& f = field(doc, name);
  if (!f.is_number()) throw std::invalid_argument(std::string("json: '") + name + "' must be a number");
  return f.get<double>();
}

std::uint64_t seed_from(const json& doc, const char* name) {
  const auto& f = field(doc, name);
  if (!f.is_number_integer())
    throw std::invalid_argument(std::string("json: '") + name + "' must be an integer");
  return f.get<std::uint64_t>();
}

const char* channel_name(adv::Channel c) {
  switch (c) {
    case adv::Channel::Sensor: return "sensor";
    case adv::Channel::Actuator: return "actuator";
    case adv::Channel::Both: return "both";
  }
  throw std::logic_error("unreachable channel");
}

adv::Channel channel_value(const std::string& s) {
  if (s == "sensor") return adv::Channel::Sensor;
  if (s == "actuator") return adv::Channel::Actuator;
  if (s == "both") return adv::Channel::Both;
  throw std::invalid_argument("json: unknown channel '" + s + "'");
}

const char* kind_name(adv::Kind k) {
  switch (k) {
    case adv::Kind::Dos: return "dos";
    case adv::Kind::FdiAdditive: return "fdi_additive";
    case adv::Kind::Stealthy: return "stealthy";
  }
  throw std::logic_error("unreachable kind");
}

adv::Kind kind_value(const std::string& s) {
  if (s == "dos") return adv::Kind::Dos;
  if (s == "fdi_additive") return adv::Kind::FdiAdditive;
  if (s == "stealthy") return adv::Kind::Stealthy;
  throw std::invalid_argument("json: unknown attack kind '" + s + "'");
}

json synthesis_to_json(const reach::SynthesisOptions& opt) {
  json doc;
  doc["tau"] = opt.tau;
  doc["ring_count"] = opt.ring_count;
  doc["violation_window"] = opt.violation_window;
  doc["cost_family_size"] = opt.cost_family_size;
  doc["watermark_seed"] = opt.watermark_seed;
  doc["gain_spread"] = opt.gain_spread;
  return doc;
}

reach::SynthesisOptions synthesis_from_json(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("json: 'synthesis' must be an object");
  reach::SynthesisOptions opt;
  opt.tau = int_from(doc, "tau");
  opt.ring_count = int_from(doc, "ring_count");
  opt.violation_window = int_from(doc, "violation_window");
  opt.cost_family_size = int_from(doc, "cost_family_size");
  opt.watermark_seed = seed_from(doc, "watermark_seed");
  opt.gain_spread = double_from(doc, "gain_spread");
  return opt;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::string model_to_json(const model::SystemModel& m) {
  json doc;
  doc["kind"] = "plant";
  doc["A"] = matrix_to_json(m.A);
  doc["B"] = matrix_to_json(m.B);
  doc["Bd"] = matrix_to_json(m.Bd);
  doc["state_set"] = polytope_to_json(m.state_set);
  doc["input_set"] = polytope_to_json(m.input_set);
  doc["process_noise"] = polytope_to_json(m.process_noise);
  doc["measurement_noise"] = polytope_to_json(m.measurement_noise);
  return dump(doc);
}

model::SystemModel model_from_json(const std::string& text) {
  json doc = parse_document(text);
  if (field(doc, "kind").get<std::string>() != "plant")
    throw std::invalid_argument("json: document is not a plant description");
  model::SystemModel m;
  m.A = matrix_from_json(field(doc, "A"), "A");
  m.B = matrix_from_json(field(doc, "B"), "B");
  m.Bd = matrix_from_json(field(doc, "Bd"), "Bd");
  m.state_set = polytope_from_json(field(doc, "state_set"), "state_set");
  m.input_set = polytope_from_json(field(doc, "input_set"), "input_set");
  m.process_noise = polytope_from_json(field(doc, "process_noise"), "process_noise");
  m.measurement_noise = polytope_from_json(field(doc, "measurement_noise"), "measurement_noise");
  model::validate(m);
  return m;
}

std::string scenario_to_json(const sim::Scenario& sc) {
  json doc;
  doc["kind"] = "scenario";
  doc["x0"] = vector_to_json(sc.x0);
  doc["horizon"] = sc.horizon;
  doc["sample_time"] = sc.sample_time;
  doc["disturbance_seed"] = sc.disturbance_seed;
  doc["watermark_seed"] = sc.watermark_seed;
  doc["rekey_steps"] = sc.rekey_steps;
  doc["violation_window"] = sc.violation_window;
  doc["synthesis"] = synthesis_to_json(sc.synth);
  json attacks = json::array();
  for (const auto& a : sc.attacks.actions) {
    json act;
    act["t_start"] = a.t_start;
    act["t_end"] = a.t_end;
    act["channel"] = channel_name(a.channel);
    act["attack"] = kind_name(a.kind);
    act["payload"] = vector_to_json(a.payload);
    act["goal_weight"] = a.goal_weight;
    attacks.push_back(std::move(act));
  }
  doc["attacks"] = std::move(attacks);
  return dump(doc);
}

sim::Scenario scenario_from_json(const std::string& text) {
  json doc = parse_document(text);
  if (field(doc, "kind").get<std::string>() != "scenario")
    throw std::invalid_argument("json: document is not a scenario description");
  sim::Scenario sc;
  sc.x0 = vector_from_json(field(doc, "x0"), "x0");
  sc.horizon = int_from(doc, "horizon");
  sc.sample_time = double_from(doc, "sample_time");
  sc.disturbance_seed = seed_from(doc, "disturbance_seed");
  sc.watermark_seed = seed_from(doc, "watermark_seed");
  sc.rekey_steps = int_from(doc, "rekey_steps");
  sc.violation_window = int_from(doc, "violation_window");
  sc.synth = synthesis_from_json(field(doc, "synthesis"));
  const auto& attacks = array_field(doc, "attacks");
  for (const auto& act : attacks) {
    adv::AttackAction a;
    a.t_start = int_from(act, "t_start");
    a.t_end = int_from(act, "t_end");
    a.channel = channel_value(field(act, "channel").get<std::string>());
    a.kind = kind_value(field(act, "attack").get<std::string>());
    a.payload = vector_from_json(field(act, "payload"), "payload");
    a.goal_weight = double_from(act, "goal_weight");
    sc.attacks.actions.push_back(std::move(a));
  }
  return sc;
}

std::string family_digest(const model::SystemModel& m, const reach::SynthesisOptions& opt) {
  json doc;
  doc["plant"] = json::parse(model_to_json(m));
  doc["synthesis"] = synthesis_to_json(opt);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(doc.dump())));
  return buf;
}

std::string family_to_cache(const reach::ControllableFamily& fam, const model::SystemModel& m,
                            const reach::SynthesisOptions& opt) {
  json doc;
  doc["kind"] = "family_cache";
  doc["digest"] = family_digest(m, opt);
  doc["tau"] = fam.tau;
  doc["violation_window"] = fam.violation_window;
  doc["max_safe_index"] = fam.max_safe_index;
  json rings = json::array();
  for (const auto& p : fam.state_sets) rings.push_back(polytope_to_json(p));
  doc["state_sets"] = std::move(rings);
  json eroded = json::array();
  for (const auto& ring : fam.eroded_targets) {
    json steps = json::array();
    for (const auto& p : ring) steps.push_back(polytope_to_json(p));
    eroded.push_back(std::move(steps));
  }
  doc["eroded_targets"] = std::move(eroded);
  json extended = json::array();
  for (const auto& p : fam.extended_sets) extended.push_back(polytope_to_json(p));
  doc["extended_sets"] = std::move(extended);
  json inputs = json::array();
  for (const auto& p : fam.input_sets) inputs.push_back(polytope_to_json(p));
  doc["input_sets"] = std::move(inputs);
  doc["terminal_input_set"] = polytope_to_json(fam.terminal_input_set);
  doc["base_gain"] = matrix_to_json(fam.base_gain);
  json gains = json::array();
  for (const auto& g : fam.terminal_gains) gains.push_back(matrix_to_json(g));
  doc["terminal_gains"] = std::move(gains);
  return dump(doc);
}

std::optional<reach::ControllableFamily> family_from_cache(const std::string& text,
                                                           const model::SystemModel& m,
                                                           const reach::SynthesisOptions& opt) {
  json doc = parse_document(text);
  if (field(doc, "kind").get<std::string>() != "family_cache")
    throw std::invalid_argument("json: document is not a family cache");
  if (field(doc, "digest").get<std::string>() != family_digest(m, opt)) return std::nullopt;
  reach::ControllableFamily fam;
  fam.tau = int_from(doc, "tau");
  fam.violation_window = int_from(doc, "violation_window");
  fam.max_safe_index = int_from(doc, "max_safe_index");
  for (const auto& p : array_field(doc, "state_sets"))
    fam.state_sets.push_back(polytope_from_json(p, "state_sets"));
  for (const auto& ring : array_field(doc, "eroded_targets")) {
    std::vector<geom::Polytope> steps;
    for (const auto& p : ring) steps.push_back(polytope_from_json(p, "eroded_targets"));
    fam.eroded_targets.push_back(std::move(steps));
  }
  for (const auto& p : array_field(doc, "extended_sets"))
    fam.extended_sets.push_back(polytope_from_json(p, "extended_sets"));
  for (const auto& p : array_field(doc, "input_sets"))
    fam.input_sets.push_back(polytope_from_json(p, "input_sets"));
  fam.terminal_input_set = polytope_from_json(field(doc, "terminal_input_set"), "terminal_input_set");
  fam.base_gain = matrix_from_json(field(doc, "base_gain"), "base_gain");
  for (const auto& g : array_field(doc, "terminal_gains"))
    fam.terminal_gains.push_back(matrix_from_json(g, "terminal_gains"));
  reach::validate_family(m, fam);
  return fam;
}

}  // namespace strhc::io
