#include "strhc/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "strhc/linear_program.hpp"

namespace strhc::geom {
namespace {

constexpr double kZeroNormal = 1e-12;
constexpr double kParallelGap = 1e-12;   // 1 - dot(a, b) below this means parallel
constexpr double kDropSlack = 1e-9;
constexpr double kElimCoeff = 1e-10;     // coefficient treated as zero by elimination
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Rows {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  int dim = 0;
  int count() const { return static_cast<int>(b.size()); }
};

Rows make_rows(int dim, int reserve) {
  Rows r;
  r.dim = dim;
  r.A = Eigen::MatrixXd(reserve, dim);
  r.b = Eigen::VectorXd(reserve);
  return r;
}

Rows empty_rows(int dim) {
  Rows r = make_rows(dim, 2);
  r.A.setZero();
  r.A(0, 0) = 1.0;
  r.A(1, 0) = -1.0;
  r.b(0) = -1.0;
  r.b(1) = -1.0;
  return r;
}

// Normalizes rows to unit normals, dropping trivial ones. Returns false when a
// zero-normal row is itself contradictory.
bool normalize_rows(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, Rows* out) {
  const int dim = static_cast<int>(A.cols());
  Rows r = make_rows(dim, static_cast<int>(A.rows()));
  int n = 0;
  for (int i = 0; i < A.rows(); ++i) {
    const double len = A.row(i).norm();
    if (!std::isfinite(len) || !std::isfinite(b(i)))
      throw std::invalid_argument("polytope: non-finite constraint row");
    if (len <= kZeroNormal) {
      if (b(i) < -kGeomTol) return false;
      continue;
    }
    r.A.row(n) = A.row(i) / len;
    r.b(n) = b(i) / len;
    ++n;
  }
  r.A.conservativeResize(n, dim);
  r.b.conservativeResize(n);
  *out = std::move(r);
  return true;
}

// Merges duplicate directions, keeping the tightest offset per direction.
void dedup_parallel(Rows* r) {
  const int m = r->count();
  std::vector<int> keep;
  keep.reserve(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    bool merged = false;
    for (int k : keep) {
      if (r->A.row(k).dot(r->A.row(i)) >= 1.0 - kParallelGap) {
        r->b(k) = std::min(r->b(k), r->b(i));
        merged = true;
        break;
      }
    }
    if (!merged) keep.push_back(i);
  }
  if (static_cast<int>(keep.size()) == m) return;
  Rows slim = make_rows(r->dim, static_cast<int>(keep.size()));
  int n = 0;
  for (int k : keep) {
    slim.A.row(n) = r->A.row(k);
    slim.b(n) = r->b(k);
    ++n;
  }
  *r = std::move(slim);
}

double box_support(const Box& box, const Eigen::VectorXd& dir) {
  double v = 0.0;
  for (int j = 0; j < dir.size(); ++j) {
    const double c = dir(j);
    if (c > 0.0)
      v += c * box.upper(j);
    else if (c < 0.0)
      v += c * box.lower(j);
    if (std::isnan(v)) return kInf;
  }
  return v;
}

// Drops rows that a bounding superset already proves slack.
void box_prefilter(Rows* r, const Box& box) {
  std::vector<int> keep;
  for (int i = 0; i < r->count(); ++i)
    if (box_support(box, r->A.row(i).transpose()) > r->b(i) - kDropSlack) keep.push_back(i);
  if (static_cast<int>(keep.size()) == r->count()) return;
  Rows slim = make_rows(r->dim, static_cast<int>(keep.size()));
  int n = 0;
  for (int k : keep) {
    slim.A.row(n) = r->A.row(k);
    slim.b(n) = r->b(k);
    ++n;
  }
  *r = std::move(slim);
}

Box box_from_rows(const Rows& r, bool* infeasible) {
  Box box;
  box.lower = Eigen::VectorXd::Constant(r.dim, -kInf);
  box.upper = Eigen::VectorXd::Constant(r.dim, kInf);
  *infeasible = false;
  for (int j = 0; j < r.dim; ++j) {
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(r.dim);
    dir(j) = 1.0;
    auto up = lp::maximize(dir, r.A, r.b);
    if (up.status == lp::Status::Infeasible) { *infeasible = true; return box; }
    if (up.status == lp::Status::Optimal) box.upper(j) = up.value;
    dir(j) = -1.0;
    auto lo = lp::maximize(dir, r.A, r.b);
    if (lo.status == lp::Status::Infeasible) { *infeasible = true; return box; }
    if (lo.status == lp::Status::Optimal) box.lower(j) = -lo.value;
  }
  return box;
}

// Cheap exactness-preserving pass for large systems: each candidate is tested
// against only the rows kept so far. Their intersection contains the final
// set, so a candidate slack against it is slack against the final set and can
// be dropped for good. Keeps the exact per-row pass downstream off the huge
// unreduced system that variable elimination emits.
void insertion_prefilter(Rows* r) {
  const int m = r->count();
  if (m <= 64) return;
  Eigen::MatrixXd A(m, r->dim);
  Eigen::VectorXd b(m);
  int kept = 0;
  for (int i = 0; i < m; ++i) {
    bool keep = kept == 0;
    if (!keep) {
      auto res = lp::maximize(r->A.row(i).transpose(), A.topRows(kept), b.head(kept));
      keep = res.status == lp::Status::Unbounded ||
             (res.status == lp::Status::Optimal && res.value > r->b(i) + kDropSlack);
    }
    if (keep) {
      A.row(kept) = r->A.row(i);
      b(kept) = r->b(i);
      ++kept;
    }
  }
  if (kept == m) return;
  Rows slim = make_rows(r->dim, kept);
  slim.A = A.topRows(kept);
  slim.b = b.head(kept);
  *r = std::move(slim);
}

// Full reduction pipeline. `superset` is any box known to contain the set; it
// only accelerates pruning and never changes the result.
bool reduce_rows(Rows* r, const Box* superset) {
  dedup_parallel(r);
  if (r->count() == 0) return true;

  Box box;
  bool infeasible = false;
  if (superset != nullptr) {
    box = *superset;
  } else {
    box = box_from_rows(*r, &infeasible);
    if (infeasible) return false;
  }
  box_prefilter(r, box);
  insertion_prefilter(r);

  const int m = r->count();
  std::vector<bool> alive(static_cast<size_t>(m), true);
  int alive_count = m;
  for (int i = 0; i < m; ++i) {
    if (alive_count <= 1) break;
    Eigen::MatrixXd A(alive_count, r->dim);
    Eigen::VectorXd b(alive_count);
    int n = 0;
    for (int k = 0; k < m; ++k) {
      if (!alive[static_cast<size_t>(k)]) continue;
      A.row(n) = r->A.row(k);
      b(n) = r->b(k) + (k == i ? 1.0 : 0.0);
      ++n;
    }
    auto res = lp::maximize(r->A.row(i).transpose(), A, b);
    if (res.status == lp::Status::Infeasible) return false;
    if (res.status == lp::Status::Optimal && res.value <= r->b(i) + kDropSlack) {
      alive[static_cast<size_t>(i)] = false;
      --alive_count;
    }
  }

  Rows slim = make_rows(r->dim, alive_count);
  int n = 0;
  for (int k = 0; k < m; ++k) {
    if (!alive[static_cast<size_t>(k)]) continue;
    slim.A.row(n) = r->A.row(k);
    slim.b(n) = r->b(k);
    ++n;
  }
  *r = std::move(slim);

  if (superset != nullptr && r->count() > 0) {
    // Feasibility was not yet established on this path.
    auto res = lp::maximize(Eigen::VectorXd::Zero(r->dim), r->A, r->b);
    if (res.status == lp::Status::Infeasible) return false;
  }
  return true;
}

// Eliminates one variable by pairing opposite-signed rows; the variable's
// column is zeroed but kept so indices stay aligned.
Rows eliminate_variable(const Rows& r, int j) {
  std::vector<int> pos, neg, zero;
  for (int i = 0; i < r.count(); ++i) {
    const double c = r.A(i, j);
    if (c > kElimCoeff)
      pos.push_back(i);
    else if (c < -kElimCoeff)
      neg.push_back(i);
    else
      zero.push_back(i);
  }
  Rows out = make_rows(r.dim, static_cast<int>(zero.size() + pos.size() * neg.size()));
  int n = 0;
  for (int i : zero) {
    out.A.row(n) = r.A.row(i);
    out.A(n, j) = 0.0;
    out.b(n) = r.b(i);
    ++n;
  }
  for (int p : pos) {
    const double cp = r.A(p, j);
    for (int q : neg) {
      const double cq = -r.A(q, j);
      Eigen::RowVectorXd row = r.A.row(p) / cp + r.A.row(q) / cq;
      row(j) = 0.0;
      const double len = row.norm();
      if (len <= kZeroNormal) continue;  // vacuous combination
      out.A.row(n) = row / len;
      out.b(n) = (r.b(p) / cp + r.b(q) / cq) / len;
      ++n;
    }
  }
  out.A.conservativeResize(n, r.dim);
  out.b.conservativeResize(n);
  return out;
}

}  // namespace

struct PolytopeBuilder {
  // Trusted path: rows are already unit-normalized and reduced.
  static Polytope make(int dim, Eigen::MatrixXd A, Eigen::VectorXd b) {
    Polytope p(dim);
    p.normals_ = std::move(A);
    p.offsets_ = std::move(b);
    return p;
  }
  static Polytope from_rows(Rows r) { return make(r.dim, std::move(r.A), std::move(r.b)); }
  static Polytope canonical_empty(int dim) { return from_rows(empty_rows(dim)); }
  static Rows rows_of(const Polytope& p) {
    Rows r;
    r.dim = p.dim();
    r.A = p.normals();
    r.b = p.offsets();
    return r;
  }
  // Shared tail for operations that assembled a raw system.
  static Polytope finish(Rows r, const Box* superset) {
    if (!reduce_rows(&r, superset)) return canonical_empty(r.dim);
    return from_rows(std::move(r));
  }
};

Polytope::Polytope(int dim) : dim_(dim), normals_(0, dim), offsets_(0) {
  if (dim < 0) throw std::invalid_argument("polytope: negative dimension");
}

Polytope Polytope::from_inequalities(const Eigen::MatrixXd& normals,
                                     const Eigen::VectorXd& offsets) {
  if (normals.rows() != offsets.size())
    throw std::invalid_argument("polytope: row count mismatch");
  const int dim = static_cast<int>(normals.cols());
  if (dim <= 0) throw std::invalid_argument("polytope: dimension must be positive");
  Rows r;
  if (!normalize_rows(normals, offsets, &r)) return PolytopeBuilder::canonical_empty(dim);
  return PolytopeBuilder::finish(std::move(r), nullptr);
}

Polytope Polytope::box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  const int dim = static_cast<int>(lower.size());
  if (upper.size() != dim || dim == 0)
    throw std::invalid_argument("polytope: malformed box bounds");
  for (int j = 0; j < dim; ++j)
    if (lower(j) > upper(j)) return PolytopeBuilder::canonical_empty(dim);
  Eigen::MatrixXd A(2 * dim, dim);
  Eigen::VectorXd b(2 * dim);
  A.setZero();
  for (int j = 0; j < dim; ++j) {
    A(2 * j, j) = 1.0;
    b(2 * j) = upper(j);
    A(2 * j + 1, j) = -1.0;
    b(2 * j + 1) = -lower(j);
  }
  return PolytopeBuilder::make(dim, std::move(A), std::move(b));
}

Polytope Polytope::singleton(const Eigen::VectorXd& point) { return box(point, point); }

Polytope Polytope::empty_set(int dim) { return PolytopeBuilder::canonical_empty(dim); }

bool contains(const Polytope& p, const Eigen::VectorXd& z, double tol) {
  if (z.size() != p.dim()) throw std::invalid_argument("contains: dimension mismatch");
  if (p.row_count() == 0) return true;
  return ((p.normals() * z - p.offsets()).array() <= tol).all();
}

bool is_empty(const Polytope& p) {
  if (p.row_count() == 0) return false;
  auto res = lp::maximize(Eigen::VectorXd::Zero(p.dim()), p.normals(), p.offsets());
  return res.status == lp::Status::Infeasible;
}

double support(const Polytope& p, const Eigen::VectorXd& dir) {
  if (dir.size() != p.dim()) throw std::invalid_argument("support: dimension mismatch");
  auto res = lp::maximize(dir, p.normals(), p.offsets());
  switch (res.status) {
    case lp::Status::Optimal: return res.value;
    case lp::Status::Unbounded: return kInf;
    case lp::Status::Infeasible: return -kInf;
  }
  return -kInf;
}

std::optional<Eigen::VectorXd> support_point(const Polytope& p, const Eigen::VectorXd& dir) {
  auto res = lp::maximize(dir, p.normals(), p.offsets());
  if (res.status != lp::Status::Optimal) return std::nullopt;
  return res.point;
}

Polytope remove_redundancy(const Polytope& p) {
  Rows r = PolytopeBuilder::rows_of(p);
  return PolytopeBuilder::finish(std::move(r), nullptr);
}

Polytope intersect(const Polytope& a, const Polytope& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("intersect: dimension mismatch");
  Rows r = make_rows(a.dim(), a.row_count() + b.row_count());
  r.A << a.normals(), b.normals();
  r.b << a.offsets(), b.offsets();
  return PolytopeBuilder::finish(std::move(r), nullptr);
}

Polytope affine_image(const Polytope& p, const Eigen::MatrixXd& M,
                      const Eigen::VectorXd& shift) {
  const int din = static_cast<int>(M.cols());
  const int dout = static_cast<int>(M.rows());
  if (din != p.dim()) throw std::invalid_argument("affine_image: dimension mismatch");
  Eigen::VectorXd t = shift.size() == 0 ? Eigen::VectorXd::Zero(dout) : shift;
  if (t.size() != dout) throw std::invalid_argument("affine_image: shift dimension mismatch");

  if (is_empty(p)) return PolytopeBuilder::canonical_empty(dout);

  if (din == dout) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (lu.isInvertible()) {
      // Pull the constraints back through the inverse map.
      Eigen::MatrixXd Minv = lu.inverse();
      Eigen::MatrixXd A = p.normals() * Minv;
      Eigen::VectorXd b = p.offsets() + A * t;
      Rows r;
      if (!normalize_rows(A, b, &r)) return PolytopeBuilder::canonical_empty(dout);
      return PolytopeBuilder::from_rows(std::move(r));
    }
  }

  // General map: describe {(w, z) : z in p, w = M z + t} and drop z.
  const int lifted = dout + din;
  Rows r = make_rows(lifted, p.row_count() + 2 * dout);
  r.A.setZero();
  int n = 0;
  for (int i = 0; i < p.row_count(); ++i) {
    r.A.block(n, dout, 1, din) = p.normals().row(i);
    r.b(n) = p.offsets()(i);
    ++n;
  }
  for (int i = 0; i < dout; ++i) {
    r.A(n, i) = 1.0;
    r.A.block(n, dout, 1, din) = -M.row(i);
    r.b(n) = t(i);
    ++n;
    r.A(n, i) = -1.0;
    r.A.block(n, dout, 1, din) = M.row(i);
    r.b(n) = -t(i);
    ++n;
  }
  Rows lifted_rows;
  if (!normalize_rows(r.A, r.b, &lifted_rows)) return PolytopeBuilder::canonical_empty(dout);

  Box pbox = bounding_box(p);
  Box lbox;
  lbox.lower = Eigen::VectorXd(lifted);
  lbox.upper = Eigen::VectorXd(lifted);
  for (int i = 0; i < dout; ++i) {
    lbox.upper(i) = support(p, M.row(i).transpose()) + t(i);
    lbox.lower(i) = -support(p, -M.row(i).transpose()) + t(i);
  }
  lbox.lower.tail(din) = pbox.lower;
  lbox.upper.tail(din) = pbox.upper;

  Rows cur = std::move(lifted_rows);
  for (int j = dout; j < lifted; ++j) {
    cur = eliminate_variable(cur, j);
    if (!reduce_rows(&cur, &lbox)) return PolytopeBuilder::canonical_empty(dout);
  }
  Rows final_rows = make_rows(dout, cur.count());
  final_rows.A = cur.A.leftCols(dout);
  final_rows.b = cur.b;
  Rows packed;
  if (!normalize_rows(final_rows.A, final_rows.b, &packed))
    return PolytopeBuilder::canonical_empty(dout);
  return PolytopeBuilder::from_rows(std::move(packed));
}

Polytope minkowski_sum(const Polytope& a, const Polytope& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("minkowski_sum: dimension mismatch");
  const int dim = a.dim();
  if (is_empty(a) || is_empty(b)) return PolytopeBuilder::canonical_empty(dim);

  if (dim <= 2) {
    // In the plane the sum's facet directions come from the operands, so the
    // sum is exactly the support-tight intersection over those directions.
    Rows cand = make_rows(dim, a.row_count() + b.row_count());
    cand.A << a.normals(), b.normals();
    cand.b.setZero();
    dedup_parallel(&cand);
    Rows out = make_rows(dim, cand.count());
    int n = 0;
    for (int i = 0; i < cand.count(); ++i) {
      const Eigen::VectorXd dir = cand.A.row(i).transpose();
      const double v = support(a, dir) + support(b, dir);
      if (!std::isfinite(v)) continue;  // unbounded direction puts no facet here
      out.A.row(n) = cand.A.row(i);
      out.b(n) = v;
      ++n;
    }
    out.A.conservativeResize(n, dim);
    out.b.conservativeResize(n);
    Box abox = bounding_box(a);
    Box bbox = bounding_box(b);
    Box sum_box;
    sum_box.lower = abox.lower + bbox.lower;
    sum_box.upper = abox.upper + bbox.upper;
    return PolytopeBuilder::finish(std::move(out), &sum_box);
  }

  // General dimension: lift to (z, q) with z - q in a, q in b, then drop q.
  const int lifted = 2 * dim;
  Rows r = make_rows(lifted, a.row_count() + b.row_count());
  r.A.setZero();
  int n = 0;
  for (int i = 0; i < a.row_count(); ++i) {
    r.A.block(n, 0, 1, dim) = a.normals().row(i);
    r.A.block(n, dim, 1, dim) = -a.normals().row(i);
    r.b(n) = a.offsets()(i);
    ++n;
  }
  for (int i = 0; i < b.row_count(); ++i) {
    r.A.block(n, dim, 1, dim) = b.normals().row(i);
    r.b(n) = b.offsets()(i);
    ++n;
  }
  Box abox = bounding_box(a);
  Box bbox = bounding_box(b);
  Box lbox;
  lbox.lower = Eigen::VectorXd(lifted);
  lbox.upper = Eigen::VectorXd(lifted);
  lbox.lower.head(dim) = abox.lower + bbox.lower;
  lbox.upper.head(dim) = abox.upper + bbox.upper;
  lbox.lower.tail(dim) = bbox.lower;
  lbox.upper.tail(dim) = bbox.upper;

  Rows cur;
  if (!normalize_rows(r.A, r.b, &cur)) return PolytopeBuilder::canonical_empty(dim);
  for (int j = dim; j < lifted; ++j) {
    cur = eliminate_variable(cur, j);
    if (!reduce_rows(&cur, &lbox)) return PolytopeBuilder::canonical_empty(dim);
  }
  Rows final_rows = make_rows(dim, cur.count());
  final_rows.A = cur.A.leftCols(dim);
  final_rows.b = cur.b;
  Rows packed;
  if (!normalize_rows(final_rows.A, final_rows.b, &packed))
    return PolytopeBuilder::canonical_empty(dim);
  return PolytopeBuilder::from_rows(std::move(packed));
}

Polytope pontryagin_diff(const Polytope& p, const Polytope& b) {
  if (p.dim() != b.dim()) throw std::invalid_argument("pontryagin_diff: dimension mismatch");
  if (is_empty(b)) return Polytope(p.dim());
  if (is_empty(p)) return PolytopeBuilder::canonical_empty(p.dim());
  Rows r = PolytopeBuilder::rows_of(p);
  for (int i = 0; i < r.count(); ++i) {
    const double h = support(b, r.A.row(i).transpose());
    if (!std::isfinite(h)) return PolytopeBuilder::canonical_empty(p.dim());
    r.b(i) -= h;
  }
  Box pbox = bounding_box(p);
  return PolytopeBuilder::finish(std::move(r), &pbox);
}

Polytope project(const Polytope& p, const std::vector<int>& keep) {
  const int dim = p.dim();
  if (keep.empty() || static_cast<int>(keep.size()) >= dim)
    throw std::invalid_argument("project: must keep a strict nonempty subset of coordinates");
  std::vector<bool> kept(static_cast<size_t>(dim), false);
  for (int k : keep) {
    if (k < 0 || k >= dim || kept[static_cast<size_t>(k)])
      throw std::invalid_argument("project: bad coordinate list");
    kept[static_cast<size_t>(k)] = true;
  }
  const int dout = static_cast<int>(keep.size());
  if (is_empty(p)) return PolytopeBuilder::canonical_empty(dout);

  Box box = bounding_box(p);
  Rows cur = PolytopeBuilder::rows_of(p);
  std::vector<int> pending;
  for (int j = 0; j < dim; ++j)
    if (!kept[static_cast<size_t>(j)]) pending.push_back(j);

  while (!pending.empty()) {
    // Cheapest column first keeps the intermediate systems small.
    size_t best = 0;
    long best_cost = -1;
    for (size_t idx = 0; idx < pending.size(); ++idx) {
      const int j = pending[idx];
      long pos = 0, neg = 0;
      for (int i = 0; i < cur.count(); ++i) {
        const double c = cur.A(i, j);
        if (c > kElimCoeff) ++pos;
        else if (c < -kElimCoeff) ++neg;
      }
      const long cost = pos * neg;
      if (best_cost < 0 || cost < best_cost) { best_cost = cost; best = idx; }
    }
    const int j = pending[best];
    pending.erase(pending.begin() + static_cast<long>(best));
    cur = eliminate_variable(cur, j);
    if (!reduce_rows(&cur, &box)) return PolytopeBuilder::canonical_empty(dout);
  }

  Rows final_rows = make_rows(dout, cur.count());
  for (int c = 0; c < dout; ++c) final_rows.A.col(c) = cur.A.col(keep[static_cast<size_t>(c)]);
  final_rows.b = cur.b;
  Rows packed;
  if (!normalize_rows(final_rows.A, final_rows.b, &packed))
    return PolytopeBuilder::canonical_empty(dout);
  return PolytopeBuilder::from_rows(std::move(packed));
}

std::optional<Eigen::VectorXd> chebyshev_center(const Polytope& p) {
  const int n = p.dim();
  const int m = p.row_count();
  if (m == 0) return Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd A(m + 1, n + 1);
  Eigen::VectorXd b(m + 1);
  A.setZero();
  A.block(0, 0, m, n) = p.normals();
  A.col(n).head(m).setOnes();
  b.head(m) = p.offsets();
  A(m, n) = 1.0;
  b(m) = 1e6;  // keeps the radius bounded on fat sets
  Eigen::VectorXd obj = Eigen::VectorXd::Zero(n + 1);
  obj(n) = 1.0;
  auto res = lp::maximize(obj, A, b);
  if (res.status != lp::Status::Optimal || res.point(n) < -kSolverTol) return std::nullopt;
  return res.point.head(n).eval();
}

Box bounding_box(const Polytope& p) {
  Rows r = PolytopeBuilder::rows_of(p);
  bool infeasible = false;
  Box box = box_from_rows(r, &infeasible);
  if (infeasible) {
    box.lower = Eigen::VectorXd::Constant(p.dim(), kInf);
    box.upper = Eigen::VectorXd::Constant(p.dim(), -kInf);
  }
  return box;
}

bool is_subset(const Polytope& a, const Polytope& b, double tol) {
  if (a.dim() != b.dim()) throw std::invalid_argument("is_subset: dimension mismatch");
  if (is_empty(a)) return true;
  for (int i = 0; i < b.row_count(); ++i) {
    const double h = support(a, b.normals().row(i).transpose());
    if (h > b.offsets()(i) + tol) return false;
  }
  return true;
}

std::vector<Eigen::Vector2d> planar_vertices(const Polytope& p) {
  if (p.dim() != 2) throw std::invalid_argument("planar_vertices: requires a planar set");
  std::vector<Eigen::Vector2d> pts;
  const int m = p.row_count();
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      Eigen::Matrix2d M;
      M.row(0) = p.normals().row(i);
      M.row(1) = p.normals().row(j);
      if (std::abs(M.determinant()) < 1e-10) continue;
      Eigen::Vector2d v = M.inverse() * Eigen::Vector2d(p.offsets()(i), p.offsets()(j));
      if (contains(p, v, 10 * kGeomTol)) pts.push_back(v);
    }
  }
  if (pts.empty()) return pts;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& v : pts) mean += v;
  mean /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return std::atan2(a.y() - mean.y(), a.x() - mean.x()) <
           std::atan2(b.y() - mean.y(), b.x() - mean.x());
  });
  std::vector<Eigen::Vector2d> unique;
  for (const auto& v : pts)
    if (unique.empty() || (unique.back() - v).norm() > 1e-9) unique.push_back(v);
  if (unique.size() > 1 && (unique.front() - unique.back()).norm() <= 1e-9) unique.pop_back();
  return unique;
}

double planar_area(const Polytope& p) {
  const auto verts = planar_vertices(p);
  if (verts.size() < 3) return 0.0;
  double twice = 0.0;
  for (size_t i = 0; i < verts.size(); ++i) {
    const auto& a = verts[i];
    const auto& b = verts[(i + 1) % verts.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * std::abs(twice);
}

}  // namespace strhc::geom
