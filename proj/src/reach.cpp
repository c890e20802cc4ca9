#include "strhc/reach.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "strhc/rng.hpp"

namespace strhc::reach {
namespace {

constexpr std::uint64_t kGainStreamSalt = 0x6761696e73ULL;
constexpr double kFixedPointTol = 1e-8;

double spectral_radius(const Eigen::MatrixXd& M) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Real block-eigenbasis of M: complex pairs contribute (Re v, Im v) columns,
// real eigenvalues their eigenvector. In this basis a stable M acts blockwise
// as a scaled rotation or a scalar, so round direction fans contract at
// nearly the spectral radius. Returns false when the basis is defective.
bool real_eigenbasis(const Eigen::MatrixXd& M, Eigen::MatrixXd* T) {
  const int n = static_cast<int>(M.rows());
  Eigen::EigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success) return false;
  T->resize(n, n);
  int col = 0;
  for (int i = 0; i < n && col < n; ++i) {
    const std::complex<double> lam = es.eigenvalues()(i);
    if (std::abs(lam.imag()) < 1e-10) {
      Eigen::VectorXd v = es.eigenvectors().col(i).real();
      if (v.norm() < 1e-12) v = es.eigenvectors().col(i).imag();
      if (v.norm() < 1e-12) return false;
      T->col(col++) = v / v.norm();
    } else if (lam.imag() > 0.0) {
      if (col + 2 > n) return false;
      Eigen::VectorXd re = es.eigenvectors().col(i).real();
      Eigen::VectorXd im = es.eigenvectors().col(i).imag();
      // One common scale for the pair: scaling the columns separately would
      // break the scaled-rotation structure of the transformed block.
      const double scale = std::max(re.norm(), im.norm());
      if (scale < 1e-12 || std::min(re.norm(), im.norm()) < 1e-9 * scale)
        return false;
      T->col(col++) = re / scale;
      T->col(col++) = im / scale;
    }
  }
  if (col != n) return false;
  return std::abs(T->determinant()) > 1e-10;
}

// Erodes every offset of p by the support of source mapped through M, i.e.
// the difference p minus the set M * source.
geom::Polytope erode_by_mapped(const geom::Polytope& p, const geom::Polytope& source,
                               const Eigen::MatrixXd& M) {
  if (p.row_count() == 0) return p;
  Eigen::VectorXd b = p.offsets();
  for (int i = 0; i < p.row_count(); ++i) {
    const double h = geom::support(source, M.transpose() * p.normals().row(i).transpose());
    if (!std::isfinite(h)) return geom::Polytope::empty_set(p.dim());
    b(i) -= h;
  }
  return geom::Polytope::from_inequalities(p.normals(), b);
}

// Terminal core as a scaled copy of a fixed fan polytope tangent to the
// closed-loop Lyapunov ellipse. Every requirement on the terminal set --
// state and input admissibility, one-step invariance under each terminal
// gain, landing inside its own eroded targets under a held base-gain command
// -- is linear in the scale factor, so the workable scale range is closed
// form. The fixed fan keeps the facet count small and stable, which the ring
// recursion then inherits; an open-ended invariant-set iteration instead
// accretes facets until the elimination steps blow up. Returns the empty set
// when some direction cannot be made invariant at any scale.
geom::Polytope terminal_core(const model::SystemModel& m,
                             const std::vector<Eigen::MatrixXd>& gains,
                             const Eigen::MatrixXd& base_gain, int tau) {
  const int n = m.state_dim();
  const geom::Polytope fail = geom::Polytope::empty_set(n);
  const Eigen::MatrixXd Acl = m.A + m.B * base_gain;
  if (spectral_radius(Acl) >= 1.0 - 1e-9) return fail;
  Eigen::MatrixXd T;
  if (!real_eigenbasis(Acl, &T)) return fail;
  const Eigen::MatrixXd Tinv = T.inverse();

  // Direction fan in eigenbasis coordinates, mapped back through T. The unit
  // fan polytope in those coordinates contracts under the closed loop at
  // close to the spectral radius, so the scale conditions below get a real
  // margin to work with.
  std::vector<Eigen::VectorXd> units;
  if (n == 1) {
    units.push_back(Eigen::VectorXd::Ones(1));
  } else if (n == 2) {
    for (int i = 0; i < 12; ++i) {
      const double th = M_PI * static_cast<double>(i) / 12.0;
      Eigen::VectorXd u(2);
      u << std::cos(th), std::sin(th);
      units.push_back(u);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
      u(i) = 1.0;
      units.push_back(u);
      for (int j = i + 1; j < n; ++j) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        v(i) = 1.0;
        v(j) = 1.0;
        units.push_back(v / std::sqrt(2.0));
        v(j) = -1.0;
        units.push_back(v / std::sqrt(2.0));
      }
    }
  }
  const int half = static_cast<int>(units.size());
  Eigen::MatrixXd D(2 * half, n);
  Eigen::VectorXd o(2 * half);
  for (int i = 0; i < half; ++i) {
    // Fan halfspace g'z <= 1 in eigen coordinates z = Tinv x.
    Eigen::VectorXd d = Tinv.transpose() * units[static_cast<size_t>(i)];
    const double len = d.norm();
    if (len < 1e-12) return fail;
    D.row(2 * i) = d.transpose() / len;
    o(2 * i) = 1.0 / len;
    D.row(2 * i + 1) = -d.transpose() / len;
    o(2 * i + 1) = 1.0 / len;
  }
  const geom::Polytope shape = geom::Polytope::from_inequalities(D, o);

  std::vector<Eigen::MatrixXd> Apow(static_cast<size_t>(tau) + 1);
  Apow[0] = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= tau; ++k)
    Apow[static_cast<size_t>(k)] = m.A * Apow[static_cast<size_t>(k - 1)];

  double smin = 0.0;
  double smax = std::numeric_limits<double>::infinity();
  bool ok = true;
  // Requirement s*h + w <= s*cap, with h the shape support of the mapped
  // direction and w the accumulated disturbance support.
  const auto need = [&](double h, double w, double cap) {
    if (!std::isfinite(h) || !std::isfinite(w)) { ok = false; return; }
    if (h >= cap - 1e-12) {
      if (w > 1e-15 || h > cap + 1e-12) ok = false;
      return;
    }
    if (w > 0.0) smin = std::max(smin, w / (cap - h));
  };

  for (int i = 0; i < m.state_set.row_count() && ok; ++i) {
    const Eigen::VectorXd a = m.state_set.normals().row(i).transpose();
    const double h = geom::support(shape, a);
    if (h > 1e-15) smax = std::min(smax, m.state_set.offsets()(i) / h);
  }
  for (const auto& K : gains) {
    for (int i = 0; i < m.input_set.row_count() && ok; ++i) {
      const Eigen::VectorXd a = m.input_set.normals().row(i).transpose();
      const double w = geom::support(m.measurement_noise, K.transpose() * a);
      const double h = geom::support(shape, K.transpose() * a);
      if (h > 1e-15)
        smax = std::min(smax, (m.input_set.offsets()(i) - w) / h);
      else if (w > m.input_set.offsets()(i))
        ok = false;
    }
    const Eigen::MatrixXd Aj = m.A + m.B * K;
    const Eigen::MatrixXd BK = m.B * K;
    for (int i = 0; i < 2 * half && ok; ++i) {
      const Eigen::VectorXd d = D.row(i).transpose();
      const double h = geom::support(shape, Aj.transpose() * d);
      const double w = geom::support(m.process_noise, m.Bd.transpose() * d) +
                       geom::support(m.measurement_noise, BK.transpose() * d);
      need(h, w, o(i));
    }
  }
  for (int k = 1; k <= tau && ok; ++k) {
    const Eigen::MatrixXd Mk =
        Apow[static_cast<size_t>(k)] + held_input_matrix(m.A, m.B, k) * base_gain;
    for (int i = 0; i < 2 * half && ok; ++i) {
      const Eigen::VectorXd d = D.row(i).transpose();
      double w = 0.0;
      for (int l = 1; l <= k; ++l) {
        w += geom::support(m.process_noise,
                           (Apow[static_cast<size_t>(l - 1)] * m.Bd).transpose() * d);
        w += geom::support(m.measurement_noise, Apow[static_cast<size_t>(l)].transpose() * d);
      }
      const double h = geom::support(shape, Mk.transpose() * d);
      need(h, w, o(i));
    }
  }
  if (!ok) return fail;

  double s;
  if (smin > 0.0)
    s = 1.25 * smin;
  else
    s = std::isfinite(smax) ? 0.01 * smax : 1.0;
  if (!(s > 0.0) || s > smax) return fail;
  return geom::Polytope::from_inequalities(D, s * o);
}

// Rebuilds a planar convex polygon from its counterclockwise vertex list.
geom::Polytope polygon_from_vertices(const std::vector<Eigen::VectorXd>& v) {
  const int V = static_cast<int>(v.size());
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2);
  for (const auto& p : v) c += p;
  c /= static_cast<double>(V);
  Eigen::MatrixXd A(V, 2);
  Eigen::VectorXd b(V);
  for (int i = 0; i < V; ++i) {
    const Eigen::VectorXd& p0 = v[static_cast<size_t>(i)];
    const Eigen::VectorXd& p1 = v[static_cast<size_t>((i + 1) % V)];
    Eigen::VectorXd nn(2);
    nn << p1(1) - p0(1), p0(0) - p1(0);
    if (nn.dot(c - p0) > 0.0) nn = -nn;
    A.row(i) = nn.transpose();
    b(i) = nn.dot(p0);
  }
  return geom::Polytope::from_inequalities(A, b);
}

// Caps a planar ring's facet count by shaving minimum-area corner ears, never
// uncovering the set that must stay inside. Inner approximation: membership
// claims made by the trimmed ring remain valid for the exact one.
geom::Polytope trim_ring(const geom::Polytope& ring, const geom::Polytope& inner_keep,
                         int cap_high, int cap_low) {
  if (ring.dim() != 2 || ring.row_count() <= cap_high) return ring;
  const auto verts = geom::planar_vertices(ring);
  if (static_cast<int>(verts.size()) <= cap_high) return ring;
  std::vector<Eigen::VectorXd> v(verts.begin(), verts.end());
  while (static_cast<int>(v.size()) > cap_low) {
    const int V = static_cast<int>(v.size());
    int best = -1;
    double best_area = std::numeric_limits<double>::infinity();
    for (int i = 0; i < V; ++i) {
      const Eigen::VectorXd& a = v[static_cast<size_t>((i + V - 1) % V)];
      const Eigen::VectorXd& b = v[static_cast<size_t>(i)];
      const Eigen::VectorXd& c = v[static_cast<size_t>((i + 1) % V)];
      const double area =
          0.5 * std::abs((b(0) - a(0)) * (c(1) - a(1)) - (c(0) - a(0)) * (b(1) - a(1)));
      if (area >= best_area) continue;
      Eigen::VectorXd nn(2);
      nn << c(1) - a(1), a(0) - c(0);
      const double len = nn.norm();
      if (len < 1e-12) {
        best = i;  // collinear corner, free to drop
        best_area = area;
        continue;
      }
      nn /= len;
      if (nn.dot(b - a) < 0.0) nn = -nn;  // outward: toward the dropped corner
      if (geom::support(inner_keep, nn) > nn.dot(a) + 1e-12) continue;
      best = i;
      best_area = area;
    }
    if (best < 0) break;
    v.erase(v.begin() + best);
  }
  if (static_cast<int>(v.size()) < 3) return ring;
  geom::Polytope out = polygon_from_vertices(v);
  if (geom::is_empty(out) || !geom::is_subset(inner_keep, out, kGeomTol)) return ring;
  return out;
}

}  // namespace

Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
      R.rows() != B.cols() || R.cols() != B.cols())
    throw std::invalid_argument("lqr_gain: shape mismatch");
  Eigen::MatrixXd P = Q;
  for (int it = 0; it < 10000; ++it) {
    const Eigen::MatrixXd S = R + B.transpose() * P * B;
    const Eigen::MatrixXd BtPA = B.transpose() * P * A;
    const Eigen::MatrixXd Pn =
        Q + A.transpose() * P * A - BtPA.transpose() * S.ldlt().solve(BtPA);
    const double delta = (Pn - P).norm();
    P = Pn;
    if (delta <= 1e-13 * std::max(1.0, P.norm())) break;
  }
  const Eigen::MatrixXd S = R + B.transpose() * P * B;
  Eigen::MatrixXd K = -S.ldlt().solve(B.transpose() * P * A);
  if (spectral_radius(A + B * K) >= 1.0 - 1e-9)
    throw std::runtime_error("lqr_gain: closed loop not stable");
  return K;
}

Eigen::MatrixXd held_input_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int k) {
  if (k < 0) throw std::invalid_argument("held_input_matrix: negative horizon");
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(B.rows(), B.cols());
  Eigen::MatrixXd Aj = Eigen::MatrixXd::Identity(A.rows(), A.cols());
  for (int j = 0; j < k; ++j) {
    sum += Aj * B;
    Aj = A * Aj;
  }
  return sum;
}

std::vector<geom::Polytope> erode_targets(const model::SystemModel& m,
                                          const geom::Polytope& target, int tau) {
  if (tau < 1) throw std::invalid_argument("erode_targets: tau must be at least 1");
  const int n = m.state_dim();
  std::vector<geom::Polytope> out;
  out.reserve(static_cast<size_t>(tau) + 1);
  out.push_back(target);
  Eigen::MatrixXd Apow = Eigen::MatrixXd::Identity(n, n);  // A^(k-1)
  for (int k = 1; k <= tau; ++k) {
    geom::Polytope e = erode_by_mapped(out.back(), m.process_noise, Apow * m.Bd);
    e = erode_by_mapped(e, m.measurement_noise, m.A * Apow);
    out.push_back(std::move(e));
    Apow = m.A * Apow;
  }
  return out;
}

geom::Polytope disturbance_floor_box(const model::SystemModel& m, const Eigen::MatrixXd& K,
                                     double inflate) {
  model::validate(m);
  const int n = m.state_dim();
  if (K.rows() != m.input_dim() || K.cols() != n)
    throw std::invalid_argument("disturbance_floor_box: gain shape");
  if (!(inflate >= 1.0)) throw std::invalid_argument("disturbance_floor_box: inflate < 1");
  const Eigen::MatrixXd Acl = m.A + m.B * K;
  if (spectral_radius(Acl) >= 1.0 - 1e-9)
    throw std::invalid_argument("disturbance_floor_box: closed loop not stable");
  const Eigen::MatrixXd BK = m.B * K;
  const geom::Box xbox = geom::bounding_box(m.state_set);
  Eigen::VectorXd half(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v(i) = 1.0;
    double h = 0.0;
    for (int j = 0; j < 100000; ++j) {
      const double inc = geom::support(m.process_noise, m.Bd.transpose() * v) +
                         geom::support(m.measurement_noise, BK.transpose() * v);
      h += inc;
      if (inc < 1e-13 && j > 4) break;
      v = Acl.transpose() * v;
    }
    double floor = 1.0;
    if (std::isfinite(xbox.lower(i)) && std::isfinite(xbox.upper(i)))
      floor = 0.5 * (xbox.upper(i) - xbox.lower(i));
    half(i) = std::max(h * inflate, 1e-4 * floor);
  }
  return geom::Polytope::box(-half, half);
}

geom::Polytope compute_rpi(const model::SystemModel& m,
                           const std::vector<Eigen::MatrixXd>& gains, int tau,
                           const geom::Polytope* seed) {
  model::validate(m);
  if (gains.empty()) throw std::invalid_argument("compute_rpi: no gains");
  if (tau < 1) throw std::invalid_argument("compute_rpi: tau must be at least 1");
  const int n = m.state_dim();
  const int mm = m.input_dim();
  if (seed && seed->dim() != n) throw std::invalid_argument("compute_rpi: seed dimension");
  for (const auto& K : gains)
    if (K.rows() != mm || K.cols() != n) throw std::invalid_argument("compute_rpi: gain shape");

  // Precompute A^k and held-input sums.
  std::vector<Eigen::MatrixXd> Apow(static_cast<size_t>(tau) + 1);
  std::vector<Eigen::MatrixXd> Bheld(static_cast<size_t>(tau) + 1);
  Apow[0] = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= tau; ++k) Apow[static_cast<size_t>(k)] = m.A * Apow[static_cast<size_t>(k - 1)];
  for (int k = 0; k <= tau; ++k) Bheld[static_cast<size_t>(k)] = held_input_matrix(m.A, m.B, k);

  // Start from the state constraints (clipped to the seed region when one is
  // given) with every gain's command admissible.
  std::vector<Eigen::MatrixXd> blocksA;
  std::vector<Eigen::VectorXd> blocksB;
  blocksA.push_back(m.state_set.normals());
  blocksB.push_back(m.state_set.offsets());
  if (seed) {
    blocksA.push_back(seed->normals());
    blocksB.push_back(seed->offsets());
  }
  for (const auto& K : gains) {
    const auto& U = m.input_set;
    Eigen::MatrixXd rows(U.row_count(), n);
    Eigen::VectorXd offs(U.row_count());
    for (int i = 0; i < U.row_count(); ++i) {
      const Eigen::VectorXd a = U.normals().row(i).transpose();
      rows.row(i) = (K.transpose() * a).transpose();
      offs(i) = U.offsets()(i) - geom::support(m.measurement_noise, K.transpose() * a);
    }
    blocksA.push_back(std::move(rows));
    blocksB.push_back(std::move(offs));
  }
  int total = 0;
  for (const auto& blk : blocksB) total += static_cast<int>(blk.size());
  Eigen::MatrixXd A0(total, n);
  Eigen::VectorXd b0(total);
  int at = 0;
  for (size_t i = 0; i < blocksA.size(); ++i) {
    A0.middleRows(at, blocksA[i].rows()) = blocksA[i];
    b0.segment(at, blocksB[i].size()) = blocksB[i];
    at += static_cast<int>(blocksB[i].size());
  }
  geom::Polytope omega = geom::Polytope::from_inequalities(A0, b0);
  if (geom::is_empty(omega)) return omega;

  for (int it = 0; it < 200; ++it) {
    const auto eroded = erode_targets(m, omega, tau);
    std::vector<Eigen::MatrixXd> rowsA;
    std::vector<Eigen::VectorXd> rowsB;
    rowsA.push_back(omega.normals());
    rowsB.push_back(omega.offsets());
    for (const auto& K : gains) {
      const Eigen::MatrixXd Acl = m.A + m.B * K;
      // One-step invariance under fresh feedback.
      {
        Eigen::MatrixXd blk(omega.row_count(), n);
        Eigen::VectorXd off(omega.row_count());
        for (int i = 0; i < omega.row_count(); ++i) {
          const Eigen::VectorXd a = omega.normals().row(i).transpose();
          blk.row(i) = (Acl.transpose() * a).transpose();
          off(i) = omega.offsets()(i) - geom::support(m.process_noise, m.Bd.transpose() * a) -
                   geom::support(m.measurement_noise, (m.B * K).transpose() * a);
        }
        rowsA.push_back(std::move(blk));
        rowsB.push_back(std::move(off));
      }
      // Invariance when the first command stays applied for k steps.
      for (int k = 1; k <= tau; ++k) {
        const auto& tk = eroded[static_cast<size_t>(k)];
        const Eigen::MatrixXd Mk = Apow[static_cast<size_t>(k)] + Bheld[static_cast<size_t>(k)] * K;
        Eigen::MatrixXd blk(tk.row_count(), n);
        Eigen::VectorXd off(tk.row_count());
        for (int i = 0; i < tk.row_count(); ++i) {
          const Eigen::VectorXd a = tk.normals().row(i).transpose();
          blk.row(i) = (Mk.transpose() * a).transpose();
          off(i) = tk.offsets()(i) -
                   geom::support(m.measurement_noise,
                                 (Bheld[static_cast<size_t>(k)] * K).transpose() * a);
        }
        rowsA.push_back(std::move(blk));
        rowsB.push_back(std::move(off));
      }
    }
    total = 0;
    for (const auto& blk : rowsB) total += static_cast<int>(blk.size());
    Eigen::MatrixXd An(total, n);
    Eigen::VectorXd bn(total);
    at = 0;
    for (size_t i = 0; i < rowsA.size(); ++i) {
      An.middleRows(at, rowsA[i].rows()) = rowsA[i];
      bn.segment(at, rowsB[i].size()) = rowsB[i];
      at += static_cast<int>(rowsB[i].size());
    }
    geom::Polytope next = geom::Polytope::from_inequalities(An, bn);
    if (geom::is_empty(next)) return next;
    if (geom::is_subset(omega, next, kFixedPointTol)) return next;
    omega = std::move(next);
  }
  throw std::runtime_error("compute_rpi: fixed point not reached");
}

geom::Polytope compute_rpi(const model::SystemModel& m, const Eigen::MatrixXd& K) {
  return compute_rpi(m, std::vector<Eigen::MatrixXd>{K}, 1);
}

RingStep ring_step(const model::SystemModel& m, const std::vector<geom::Polytope>& eroded_prev,
                   int tau) {
  if (static_cast<int>(eroded_prev.size()) != tau + 1)
    throw std::invalid_argument("ring_step: erosion list does not match tau");
  const int n = m.state_dim();
  const int mm = m.input_dim();
  int total = m.state_set.row_count() + m.input_set.row_count();
  for (int k = 1; k <= tau; ++k) total += eroded_prev[static_cast<size_t>(k)].row_count();
  Eigen::MatrixXd A(total, n + mm);
  Eigen::VectorXd b(total);
  A.setZero();
  int at = 0;
  A.block(at, 0, m.state_set.row_count(), n) = m.state_set.normals();
  b.segment(at, m.state_set.row_count()) = m.state_set.offsets();
  at += m.state_set.row_count();
  A.block(at, n, m.input_set.row_count(), mm) = m.input_set.normals();
  b.segment(at, m.input_set.row_count()) = m.input_set.offsets();
  at += m.input_set.row_count();
  Eigen::MatrixXd Apow = m.A;
  for (int k = 1; k <= tau; ++k) {
    const auto& tk = eroded_prev[static_cast<size_t>(k)];
    const Eigen::MatrixXd Bk = held_input_matrix(m.A, m.B, k);
    for (int i = 0; i < tk.row_count(); ++i) {
      const Eigen::VectorXd a = tk.normals().row(i).transpose();
      A.block(at, 0, 1, n) = (Apow.transpose() * a).transpose();
      A.block(at, n, 1, mm) = (Bk.transpose() * a).transpose();
      b(at) = tk.offsets()(i);
      ++at;
    }
    Apow = m.A * Apow;
  }
  RingStep out;
  out.extended = geom::Polytope::from_inequalities(A, b);
  if (geom::is_empty(out.extended)) {
    out.state = geom::Polytope::empty_set(n);
    out.input = geom::Polytope::empty_set(mm);
    return out;
  }
  std::vector<int> keep_x(static_cast<size_t>(n));
  std::vector<int> keep_u(static_cast<size_t>(mm));
  for (int i = 0; i < n; ++i) keep_x[static_cast<size_t>(i)] = i;
  for (int i = 0; i < mm; ++i) keep_u[static_cast<size_t>(i)] = n + i;
  out.state = geom::project(out.extended, keep_x);
  out.input = geom::project(out.extended, keep_u);
  return out;
}

std::vector<Eigen::MatrixXd> draw_terminal_gains(const Eigen::MatrixXd& base_gain,
                                                 std::uint64_t watermark_seed, int count,
                                                 double gain_spread) {
  if (count < 1) throw std::invalid_argument("draw_terminal_gains: count must be positive");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<size_t>(count));
  if (count == 1) {
    out.push_back(base_gain);
    return out;
  }
  rng::Stream stream(watermark_seed ^ kGainStreamSalt);
  for (int j = 0; j < count; ++j) {
    Eigen::MatrixXd dither(base_gain.rows(), base_gain.cols());
    for (int r = 0; r < dither.rows(); ++r)
      for (int c = 0; c < dither.cols(); ++c) dither(r, c) = rng::uniform_in(stream, -1.0, 1.0);
    out.push_back(base_gain + gain_spread * dither);
  }
  return out;
}

namespace {

// Outer hull of the union of the gain images of the terminal set, evaluated
// on a fixed direction slate (exact for one-dimensional inputs), then pruned
// by the plain and first-ring input constraints.
geom::Polytope terminal_input_hull(const model::SystemModel& m,
                                   const std::vector<Eigen::MatrixXd>& gains,
                                   const geom::Polytope& terminal_set,
                                   const geom::Polytope& first_ring_inputs) {
  const int mm = m.input_dim();
  std::vector<Eigen::RowVectorXd> dirs;
  for (int i = 0; i < mm; ++i) {
    Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(mm);
    e(i) = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  for (int i = 0; i < m.input_set.row_count(); ++i) dirs.push_back(m.input_set.normals().row(i));
  for (int i = 0; i < first_ring_inputs.row_count(); ++i)
    dirs.push_back(first_ring_inputs.normals().row(i));

  Eigen::MatrixXd A(static_cast<int>(dirs.size()), mm);
  Eigen::VectorXd b(static_cast<int>(dirs.size()));
  for (size_t i = 0; i < dirs.size(); ++i) {
    A.row(static_cast<int>(i)) = dirs[i];
    double h = -std::numeric_limits<double>::infinity();
    double reach = 0.0;
    for (const auto& K : gains) {
      Eigen::VectorXd pulled = K.transpose() * dirs[i].transpose();
      h = std::max(h, geom::support(terminal_set, pulled));
      reach = std::max(reach, pulled.norm());
    }
    // Measurements are admitted into the terminal set up to the membership
    // tolerance, so the hull must cover the gains applied to that overhang
    // or honest boundary commands would sit on a coin-flip edge.
    b(static_cast<int>(i)) = h + kGeomTol * (1.0 + reach);
  }
  geom::Polytope hull = geom::Polytope::from_inequalities(A, b);
  return geom::intersect(geom::intersect(hull, m.input_set), first_ring_inputs);
}

}  // namespace

ControllableFamily synthesize_family(const model::SystemModel& m,
                                     const SynthesisOptions& options) {
  model::validate(m);
  if (options.tau < 1 || options.ring_count < 1 || options.violation_window < 0 ||
      options.cost_family_size < 1)
    throw std::invalid_argument("synthesize_family: bad options");

  ControllableFamily fam;
  fam.tau = options.tau;
  fam.violation_window = options.violation_window;
  const int n = m.state_dim();
  const int mm = m.input_dim();
  fam.base_gain = lqr_gain(m.A, m.B, Eigen::MatrixXd::Identity(n, n),
                           Eigen::MatrixXd::Identity(mm, mm));

  // A tight terminal set is load-bearing: rings grown from a small core keep
  // out-growing the open-loop expansion for many rings, which is what lets
  // the safe-index certificate reach deep into the family.
  geom::Polytope terminal;
  double spread = options.gain_spread;
  for (int attempt = 0; attempt < 8; ++attempt) {
    fam.terminal_gains =
        draw_terminal_gains(fam.base_gain, options.watermark_seed, options.cost_family_size,
                            spread);
    terminal = terminal_core(m, fam.terminal_gains, fam.base_gain, fam.tau);
    if (geom::is_empty(terminal)) {
      // Fan construction refused; fall back to the invariant subset of a
      // small box around the disturbance floor.
      const geom::Polytope seed = disturbance_floor_box(m, fam.base_gain, 1.5);
      terminal = compute_rpi(m, fam.terminal_gains, fam.tau, &seed);
    }
    if (!geom::is_empty(terminal)) break;
    spread = attempt >= 5 ? 0.0 : 0.5 * spread;
  }
  if (geom::is_empty(terminal))
    throw std::runtime_error("synthesize_family: terminal set is empty for this plant");

  fam.state_sets.push_back(terminal);
  fam.eroded_targets.push_back(erode_targets(m, terminal, fam.tau));
  fam.extended_sets.push_back(geom::Polytope());  // ring 0 has no command pairs
  fam.input_sets.push_back(geom::Polytope());     // filled once ring 1 exists

  const int n_dims = n;
  for (int i = 1; i <= options.ring_count; ++i) {
    RingStep rs = ring_step(m, fam.eroded_targets.back(), fam.tau);
    if (geom::is_empty(rs.state))
      throw std::runtime_error("synthesize_family: ring " + std::to_string(i) +
                               " came out empty");
    const auto& prev = fam.state_sets.back();
    if (geom::is_subset(rs.state, prev, 1e-9)) {
      // No growth; the family has saturated, so the remaining rings repeat.
      fam.state_sets.push_back(prev);
      fam.eroded_targets.push_back(fam.eroded_targets.back());
      fam.extended_sets.push_back(rs.extended);
      fam.input_sets.push_back(rs.input);
      continue;
    }
    if (!geom::is_subset(prev, rs.state, kGeomTol))
      throw std::runtime_error("synthesize_family: nesting failed at ring " +
                               std::to_string(i));
    geom::Polytope trimmed = trim_ring(rs.state, prev, 18, 14);
    if (trimmed.row_count() < rs.state.row_count()) {
      // Restrict the command pairs to the trimmed ring so the projection
      // identity between the state ring and its command set stays exact.
      Eigen::MatrixXd lift = Eigen::MatrixXd::Zero(trimmed.row_count(), n_dims + mm);
      lift.leftCols(n_dims) = trimmed.normals();
      rs.extended = geom::intersect(
          rs.extended, geom::Polytope::from_inequalities(lift, trimmed.offsets()));
      std::vector<int> keep_u(static_cast<size_t>(mm));
      for (int j = 0; j < mm; ++j) keep_u[static_cast<size_t>(j)] = n_dims + j;
      rs.input = geom::project(rs.extended, keep_u);
      rs.state = std::move(trimmed);
    }
    fam.eroded_targets.push_back(erode_targets(m, rs.state, fam.tau));
    fam.state_sets.push_back(std::move(rs.state));
    fam.extended_sets.push_back(std::move(rs.extended));
    fam.input_sets.push_back(std::move(rs.input));
  }

  fam.terminal_input_set =
      terminal_input_hull(m, fam.terminal_gains, fam.state_sets[0], fam.input_sets[1]);
  fam.input_sets[0] = fam.terminal_input_set;
  fam.max_safe_index = compute_max_safe_index(m, fam);
  validate_family(m, fam);
  return fam;
}

int compute_max_safe_index(const model::SystemModel& m, const ControllableFamily& fam) {
  const int N = fam.ring_count();
  if (N < 1) return 0;
  const int n = m.state_dim();

  std::vector<Eigen::MatrixXd> Apow(static_cast<size_t>(fam.tau) + 1);
  Apow[0] = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= fam.tau; ++k)
    Apow[static_cast<size_t>(k)] = m.A * Apow[static_cast<size_t>(k - 1)];

  // Disturbance tube of the unplanned excursion: one admissible command, then
  // zeroed commands, with process noise at every step.
  const geom::Polytope mapped_noise = geom::affine_image(m.process_noise, m.Bd);
  const geom::Polytope mapped_input = geom::affine_image(m.input_set, m.B);
  std::vector<geom::Polytope> tube(static_cast<size_t>(fam.tau) + 1);
  tube[1] = geom::minkowski_sum(mapped_noise, mapped_input);
  for (int k = 2; k <= fam.tau; ++k) {
    geom::Polytope shifted =
        geom::affine_image(tube[static_cast<size_t>(k - 1)], m.A);
    tube[static_cast<size_t>(k)] = geom::minkowski_sum(shifted, mapped_noise);
  }

  int certified = 0;
  for (int r = 1; r <= N; ++r) {
    const int s = std::min(N, r + fam.violation_window);
    const auto& landing = fam.state_sets[static_cast<size_t>(s)];
    const auto& start = fam.state_sets[static_cast<size_t>(r)];
    bool ok = true;
    for (int k = 1; k <= fam.tau && ok; ++k) {
      for (int i = 0; i < landing.row_count(); ++i) {
        const Eigen::VectorXd a = landing.normals().row(i).transpose();
        const double h = geom::support(start, Apow[static_cast<size_t>(k)].transpose() * a) +
                         geom::support(tube[static_cast<size_t>(k)], a);
        if (h > landing.offsets()(i) + kGeomTol) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) break;
    certified = r;
  }
  return certified;
}

void validate_family(const model::SystemModel& m, const ControllableFamily& fam) {
  const int n = m.state_dim();
  const size_t rings = fam.state_sets.size();
  if (rings < 2) throw std::runtime_error("family: needs at least one ring beyond the core");
  if (fam.eroded_targets.size() != rings || fam.extended_sets.size() != rings ||
      fam.input_sets.size() != rings)
    throw std::runtime_error("family: inconsistent container sizes");
  if (fam.terminal_gains.empty()) throw std::runtime_error("family: no terminal gains");
  for (const auto& K : fam.terminal_gains)
    if (K.rows() != m.input_dim() || K.cols() != n)
      throw std::runtime_error("family: terminal gain shape");
  for (size_t i = 0; i < rings; ++i) {
    if (fam.state_sets[i].dim() != n) throw std::runtime_error("family: ring dimension");
    if (geom::is_empty(fam.state_sets[i]))
      throw std::runtime_error("family: empty ring " + std::to_string(i));
    if (fam.eroded_targets[i].size() != static_cast<size_t>(fam.tau) + 1)
      throw std::runtime_error("family: erosion list length");
    if (!geom::is_subset(fam.eroded_targets[i][0], fam.state_sets[i], 1e-9) ||
        !geom::is_subset(fam.state_sets[i], fam.eroded_targets[i][0], 1e-9))
      throw std::runtime_error("family: erosion base mismatch at ring " + std::to_string(i));
    if (i > 0 && !geom::is_subset(fam.state_sets[i - 1], fam.state_sets[i], kGeomTol))
      throw std::runtime_error("family: nesting violated at ring " + std::to_string(i));
  }
  if (fam.max_safe_index < 0 || fam.max_safe_index > fam.ring_count())
    throw std::runtime_error("family: safe index out of range");
}

}  // namespace strhc::reach
