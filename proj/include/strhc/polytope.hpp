#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "strhc/tolerance.hpp"

namespace strhc::geom {

/**
 * Convex polytope in halfspace form, {z : normals * z <= offsets}, with every
 * row normal scaled to unit length. An infeasible system is canonicalized to a
 * single contradictory constraint pair; a system with no rows is all of R^dim.
 * Instances are immutable values; every operation returns a new set.
 */
class Polytope {
 public:
  Polytope() = default;
  explicit Polytope(int dim);  // the whole space

  static Polytope from_inequalities(const Eigen::MatrixXd& normals,
                                    const Eigen::VectorXd& offsets);
  static Polytope box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);
  static Polytope singleton(const Eigen::VectorXd& point);
  static Polytope empty_set(int dim);

  int dim() const { return dim_; }
  int row_count() const { return static_cast<int>(offsets_.size()); }
  const Eigen::MatrixXd& normals() const { return normals_; }
  const Eigen::VectorXd& offsets() const { return offsets_; }

 private:
  friend struct PolytopeBuilder;  // internal trusted construction
  int dim_ = 0;
  Eigen::MatrixXd normals_;  // row_count x dim, unit rows
  Eigen::VectorXd offsets_;
};

// Membership with boundary slack. An empty set contains nothing.
bool contains(const Polytope& p, const Eigen::VectorXd& z, double tol = kGeomTol);

bool is_empty(const Polytope& p);

// Support value max dir.z over p: -inf for an empty set, +inf when unbounded
// in that direction.
double support(const Polytope& p, const Eigen::VectorXd& dir);

// A maximizer of dir.z over p, when one exists.
std::optional<Eigen::VectorXd> support_point(const Polytope& p, const Eigen::VectorXd& dir);

// Minimal halfspace description of the same set (empty input canonicalized).
Polytope remove_redundancy(const Polytope& p);

Polytope intersect(const Polytope& a, const Polytope& b);

// Image {M z + shift : z in p}. Works for invertible square maps directly and
// lifts through a projection otherwise (wide, tall, or rank-deficient M).
Polytope affine_image(const Polytope& p, const Eigen::MatrixXd& M,
                      const Eigen::VectorXd& shift = Eigen::VectorXd());

Polytope minkowski_sum(const Polytope& a, const Polytope& b);

// Erosion {z : z + q in p for every q in b}.
Polytope pontryagin_diff(const Polytope& p, const Polytope& b);

// Orthogonal projection onto the listed coordinates (ascending original
// order), by successive variable elimination with pruning after each stage.
Polytope project(const Polytope& p, const std::vector<int>& keep);

// Largest-ball center, a convenient interior point. Empty optional when the
// set is empty.
std::optional<Eigen::VectorXd> chebyshev_center(const Polytope& p);

// Axis-aligned bounds; entries are +-inf where the set is unbounded.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};
Box bounding_box(const Polytope& p);

// Containment a subset-of b, checked facet-wise within tol.
bool is_subset(const Polytope& a, const Polytope& b, double tol = kGeomTol);

// Planar vertex list ordered around the boundary; for plotting and area
// reporting only. Requires dim == 2.
std::vector<Eigen::Vector2d> planar_vertices(const Polytope& p);
double planar_area(const Polytope& p);

}  // namespace strhc::geom
