#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "strhc/polytope.hpp"
#include "strhc/system_model.hpp"

namespace strhc::reach {

/**
 * Nested family of robust controllable sets. Ring 0 is the terminal invariant
 * set; ring i collects states that can be driven into ring i-1 within tau
 * steps by a single held command, robustly against the disturbances. Rings
 * are nested: state_sets[i-1] is contained in state_sets[i].
 *
 * eroded_targets[i][k] is ring i shrunk for a k-step held reach (k = 0 is the
 * ring itself). extended_sets[i] lives in (state, input) space and holds the
 * admissible command pairs for ring i >= 1; input_sets[i] is its input
 * shadow. terminal_input_set bounds the commands the terminal feedback family
 * can emit inside ring 0.
 */
struct ControllableFamily {
  int tau = 1;
  int violation_window = 0;
  std::vector<geom::Polytope> state_sets;
  std::vector<std::vector<geom::Polytope>> eroded_targets;
  std::vector<geom::Polytope> extended_sets;
  std::vector<geom::Polytope> input_sets;
  geom::Polytope terminal_input_set;
  Eigen::MatrixXd base_gain;
  std::vector<Eigen::MatrixXd> terminal_gains;
  int max_safe_index = 0;

  int ring_count() const { return static_cast<int>(state_sets.size()) - 1; }
};

// Infinite-horizon discrete-time LQR gain for u = K x via Riccati iteration.
// Throws when the iteration fails to stabilize A + B K.
Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R);

// Held-command cumulative input matrix, sum of A^j B for j = 0..k-1.
Eigen::MatrixXd held_input_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int k);

// Erosions of a target for k-step held reaches under accumulated process and
// measurement disturbance, k = 0..tau (entry 0 is the target itself).
std::vector<geom::Polytope> erode_targets(const model::SystemModel& m,
                                          const geom::Polytope& target, int tau);

// Maximal subset of the seed region (the whole state constraint set when
// seed is null) that every listed feedback gain keeps invariant both step by
// step and under commands held for up to tau steps.
geom::Polytope compute_rpi(const model::SystemModel& m,
                           const std::vector<Eigen::MatrixXd>& gains, int tau,
                           const geom::Polytope* seed = nullptr);

// Single-gain, one-step convenience overload.
geom::Polytope compute_rpi(const model::SystemModel& m, const Eigen::MatrixXd& K);

// Axis-aligned box bounding the smallest set the closed loop u = K(x + dy)
// can be confined to under the disturbances, inflated by the given factor.
// Used to seed compute_rpi with a tight terminal region: rings grown from a
// small terminal set keep out-growing the open-loop expansion, which is what
// makes a deep certified safe index possible at all.
geom::Polytope disturbance_floor_box(const model::SystemModel& m,
                                     const Eigen::MatrixXd& K, double inflate);

// One ring growth step from the previous ring's erosions.
struct RingStep {
  geom::Polytope extended;  // (state, input) pairs
  geom::Polytope state;
  geom::Polytope input;
};
RingStep ring_step(const model::SystemModel& m,
                   const std::vector<geom::Polytope>& eroded_prev, int tau);

// Largest ring index from which a bounded run of unplanned inputs (one
// admissible command followed by zeroed commands, disturbances throughout)
// still lands inside the ring shifted by the violation window. Checked by
// support arithmetic ring by ring; 0 means ring 1 already fails.
int compute_max_safe_index(const model::SystemModel& m, const ControllableFamily& fam);

struct SynthesisOptions {
  int tau = 4;
  int ring_count = 60;
  int violation_window = 5;
  int cost_family_size = 4;
  std::uint64_t watermark_seed = 1;
  double gain_spread = 0.05;  // elementwise half-range of the gain dither
};

// Draws the dithered terminal gain family from the watermark seed. A family
// of size one is the undithered base gain and consumes no randomness.
std::vector<Eigen::MatrixXd> draw_terminal_gains(const Eigen::MatrixXd& base_gain,
                                                 std::uint64_t watermark_seed, int count,
                                                 double gain_spread);

// Full offline synthesis: terminal set, ring family, input shadows, and the
// certified safe index. Throws when the terminal set comes out empty even
// with the dither backed off to zero, or when nesting fails numerically.
ControllableFamily synthesize_family(const model::SystemModel& m,
                                     const SynthesisOptions& options);

// Structural checks used after loading a cached family: sizes, nesting, and
// erosion consistency. Throws on violation.
void validate_family(const model::SystemModel& m, const ControllableFamily& fam);

}  // namespace strhc::reach
