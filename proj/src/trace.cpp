#include "strhc/trace.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace strhc::sim {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void append_vector(std::string& out, const Eigen::VectorXd& v) {
  for (int i = 0; i < v.size(); ++i) {
    out += ',';
    out += format_double(v(i));
  }
}

void append_optional(std::string& out, const std::optional<Eigen::VectorXd>& v, int dim) {
  if (v.has_value()) {
    append_vector(out, *v);
  } else {
    for (int i = 0; i < dim; ++i) out += ',';
  }
}

void append_header_block(std::string& out, const std::string& stem, int dim) {
  for (int i = 0; i < dim; ++i) out += "," + stem + std::to_string(i);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

}  // namespace

std::string to_csv(const SimTrace& trace, int state_dim, int input_dim, int noise_dim) {
  std::string out = "t,seconds";
  append_header_block(out, "x", state_dim);
  append_header_block(out, "y", state_dim);
  append_header_block(out, "yr", state_dim);
  append_header_block(out, "uc", input_dim);
  append_header_block(out, "ud", input_dim);
  append_header_block(out, "ua", input_dim);
  append_header_block(out, "dx", noise_dim);
  append_header_block(out, "dy", state_dim);
  out += ",level,i_hat,cost_index,detector,pre_ok,post_ok,status,timer,mode\n";

  for (const auto& r : trace.steps) {
    out += std::to_string(r.t);
    out += ',';
    out += format_double(r.seconds);
    append_vector(out, r.x);
    append_vector(out, r.y);
    append_optional(out, r.y_reported, state_dim);
    append_optional(out, r.u_command, input_dim);
    append_optional(out, r.u_delivered, input_dim);
    append_vector(out, r.u_applied);
    append_vector(out, r.dx);
    append_vector(out, r.dy);
    out += ',' + std::to_string(r.level);
    out += ',' + std::to_string(r.i_hat);
    out += ',' + std::to_string(r.cost_index);
    out += ',' + std::to_string(static_cast<int>(r.detector));
    out += ',' + std::to_string(static_cast<int>(r.pre_ok));
    out += ',' + std::to_string(static_cast<int>(r.post_ok));
    out += ',' + std::to_string(r.status);
    out += ',' + std::to_string(r.timer);
    out += ',' + std::to_string(r.mode);
    out += '\n';
  }
  return out;
}

SimTrace parse_csv(const std::string& text, int state_dim, int input_dim, int noise_dim) {
  const int expected = 2 + 3 * state_dim + 3 * input_dim + noise_dim + state_dim + 9;
  SimTrace trace;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      continue;
    }
    auto cells = split_line(line);
    if (static_cast<int>(cells.size()) != expected)
      throw std::invalid_argument("trace row has " + std::to_string(cells.size()) +
                                  " cells, expected " + std::to_string(expected));
    int k = 0;
    auto next_int = [&] { return std::stoi(cells[static_cast<size_t>(k++)]); };
    auto next_double = [&] { return std::stod(cells[static_cast<size_t>(k++)]); };
    auto next_vector = [&](int dim) {
      Eigen::VectorXd v(dim);
      for (int i = 0; i < dim; ++i) v(i) = next_double();
      return v;
    };
    auto next_optional = [&](int dim) -> std::optional<Eigen::VectorXd> {
      if (cells[static_cast<size_t>(k)].empty()) {
        k += dim;
        return std::nullopt;
      }
      return next_vector(dim);
    };

    StepRecord r;
    r.t = next_int();
    r.seconds = next_double();
    r.x = next_vector(state_dim);
    r.y = next_vector(state_dim);
    r.y_reported = next_optional(state_dim);
    r.u_command = next_optional(input_dim);
    r.u_delivered = next_optional(input_dim);
    r.u_applied = next_vector(input_dim);
    r.dx = next_vector(noise_dim);
    r.dy = next_vector(state_dim);
    r.level = next_int();
    r.i_hat = next_int();
    r.cost_index = next_int();
    r.detector = next_int() != 0;
    r.pre_ok = next_int() != 0;
    r.post_ok = next_int() != 0;
    r.status = next_int();
    r.timer = next_int();
    r.mode = next_int();
    trace.steps.push_back(std::move(r));
  }
  return trace;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace strhc::sim
