#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace strhc::sim {

/**
 * One closed-loop step as the plots and the analysis see it: the true state
 * and measurement, what each channel delivered (empty cells when a packet
 * was missing or the controller was silent), what the actuator applied, the
 * noise draws, both side's ring levels, the drawn cost index, and the
 * defense flags. pre_ok/post_ok are the firewall outcomes, status is the
 * controller regime (0 normal, 1 re-encrypting) and timer its countdown.
 */
struct StepRecord {
  int t = 0;
  double seconds = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  std::optional<Eigen::VectorXd> y_reported;
  std::optional<Eigen::VectorXd> u_command;
  std::optional<Eigen::VectorXd> u_delivered;
  Eigen::VectorXd u_applied;
  Eigen::VectorXd dx;
  Eigen::VectorXd dy;
  int level = -1;
  int i_hat = 0;
  int cost_index = -1;
  bool detector = false;
  bool pre_ok = true;
  bool post_ok = true;
  int status = 0;
  int timer = 0;
  int mode = 0;
};

struct SimTrace {
  std::vector<StepRecord> steps;
  bool aborted = false;
  int abort_step = -1;
  std::string abort_reason;
};

// Fixed-order CSV with 12 significant digits; optionals render as runs of
// empty cells. The header names vector columns x0..x{n-1} and so on.
std::string to_csv(const SimTrace& trace, int state_dim, int input_dim, int noise_dim);

// Inverse of to_csv for the same dimensions; throws std::invalid_argument on
// a malformed table.
SimTrace parse_csv(const std::string& text, int state_dim, int input_dim, int noise_dim);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace strhc::sim
