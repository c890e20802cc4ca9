#pragma once

namespace strhc {

// Geometric tolerance shared by every set operation. Boundary points within
// this distance of a facet count as members.
inline constexpr double kGeomTol = 1e-7;

// Numerical slack used inside the solvers (pivot acceptance, feasibility).
inline constexpr double kSolverTol = 1e-9;

}  // namespace strhc
