#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "strhc/polytope.hpp"
#include "strhc/reach.hpp"
#include "strhc/rng.hpp"
#include "strhc/system_model.hpp"

namespace strhc::ctrl {

// Strictly convex command objective (u - target)' weight (u - target) where
// the target is the center, optionally anchored at the middle of the
// admissible command window for the measurement being served. Anchoring
// keeps the center offsets visible through the emitted command even when the
// window sits far from zero, which is what makes two cost indices
// distinguishable to an observer of the command stream.
struct CommandCost {
  Eigen::MatrixXd weight;
  Eigen::VectorXd center;
  bool anchored = false;
};

/**
 * Randomized cost menu with matching terminal feedback gains. A size of one
 * is the unwatermarked baseline: canonical cost centered at zero, the base
 * terminal gain, and the selection stream never consulted. Sizes above one
 * enable the watermark: the controller draws a private index every step and
 * an command forger who cannot read the stream must guess it.
 */
struct CostFamily {
  std::vector<CommandCost> costs;
  std::vector<Eigen::MatrixXd> terminal_laws;

  int size() const { return static_cast<int>(costs.size()); }
};

// Thrown when a measurement leaves the outermost ring: the run has lost
// feasibility and the caller is expected to abort with diagnostics.
struct OutOfDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when the per-step program has no admissible command despite the
// membership precondition: a corrupted measurement or a stale family.
struct InfeasibleCommand : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Baseline menu: identity weight centered at zero plus the base gain. The
// unanchored form asks for the minimum-norm admissible command.
CostFamily canonical_cost_family(const Eigen::MatrixXd& base_gain, int input_dim);

// Anchored baseline: window-centered command, zero offset, base gain. This
// is both the single-entry controller menu and the best available emulation
// of a watermarked controller for anyone who cannot read the offsets.
CostFamily anchored_canonical_cost_family(const Eigen::MatrixXd& base_gain, int input_dim);

// Draws the cost menu for the family's terminal gains from the watermark
// seed: one positive definite weight and one small command offset per gain.
// The draw is deterministic in the seed and disjoint from the gain dither
// stream. A single-gain family yields the canonical baseline.
CostFamily draw_cost_family(const reach::ControllableFamily& fam, std::uint64_t watermark_seed);

// Checks menu/gain sizes, weight positive definiteness, offset admissibility,
// and that every terminal law keeps the terminal ring invariant under the
// disturbances while emitting admissible commands. Throws on violation.
void validate_cost_family(const model::SystemModel& m, const reach::ControllableFamily& fam,
                          const CostFamily& menu);

// Smallest ring index containing y, ties resolved toward the smaller index.
// Throws OutOfDomain when y is outside the outermost ring.
int set_level_index(const reach::ControllableFamily& fam, const Eigen::VectorXd& y);

// Minimizes the indexed cost over the commands that pair admissibly with y
// at the given ring: (y, u) in the ring's extended set and u in its input
// shadow. Throws InfeasibleCommand when the slice is empty.
Eigen::VectorXd solve_command(const reach::ControllableFamily& fam, const CostFamily& menu,
                              const Eigen::VectorXd& y, int level, int cost_index);

// Terminal feedback u = K_j y, projected back into the admissible command
// set if numerical noise pushed it outside.
Eigen::VectorXd terminal_control(const model::SystemModel& m, const CostFamily& menu,
                                 int cost_index, const Eigen::VectorXd& y);

enum class Status { NoAttack, Attack };

// One controller decision. When silent is set no command leaves the
// controller; level and cost_index are -1 on steps that never computed them.
struct StepDecision {
  bool silent = false;
  bool anomaly = false;
  Eigen::VectorXd command;
  int level = -1;
  int cost_index = -1;
  Status status = Status::NoAttack;
  int timer = 0;
};

/**
 * Controller-side automaton. Drives the per-step law while no attack is
 * flagged; on a flagged step it goes silent, counts the re-encryption window
 * down, and re-initializes when the window closes. The first computed level
 * must satisfy the feasibility start condition against the family's safe
 * index; later levels only need to stay inside the outermost ring.
 *
 * Detection at step t therefore looks like: silent through t .. t+T_encry,
 * first fresh command at t+T_encry+1.
 */
class Automaton {
 public:
  Automaton(const model::SystemModel& m, const reach::ControllableFamily& fam,
            CostFamily menu, std::uint64_t selection_seed);

  // One controller step: verdict from the detector plus the measurement
  // received this step. The measurement is ignored while silent.
  StepDecision step(bool attack_flagged, const Eigen::VectorXd& y);

  Status status() const { return status_; }
  int timer() const { return timer_; }
  int last_level() const { return level_; }
  int encryption_window() const { return window_; }

 private:
  const model::SystemModel& model_;
  const reach::ControllableFamily& family_;
  CostFamily menu_;
  rng::Stream selection_;
  Status status_ = Status::NoAttack;
  int timer_ = 0;
  int level_ = -1;
  int window_ = 0;
  bool started_ = false;

  int draw_cost_index();
};

}  // namespace strhc::ctrl
