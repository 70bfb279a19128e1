#pragma once

#include "qslab/algebra.hpp"
#include "qslab/quasistate.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace qslab {

/// The concrete matrix algebras of the reductive toolbox.
struct AlgebraKind {
  enum class Type { sl2R, su2, un };
  Type type = Type::sl2R;
  Eigen::Index n = 0;  // only used for un

  static AlgebraKind sl2R() { return {Type::sl2R, 2}; }
  static AlgebraKind su2() { return {Type::su2, 2}; }
  static AlgebraKind un(Eigen::Index n) { return {Type::un, n}; }

  std::string name() const {
    switch (type) {
      case Type::sl2R: return "sl2R";
      case Type::su2: return "su2";
      case Type::un: return "u(" + std::to_string(n) + ")";
    }
    return "sl2R";
  }
};

/// sl2(R) realified: basis (h, e, f), coordinates (a, b, c) <-> [[a, b], [c, -a]].
inline AlgebraPtr sl2_algebra() {
  Eigen::VectorXd he = Eigen::VectorXd::Zero(3), hf = Eigen::VectorXd::Zero(3),
                  ef = Eigen::VectorXd::Zero(3);
  he(1) = 2.0;
  hf(2) = -2.0;
  ef(0) = 1.0;
  return make_algebra(3, {{0, 1, he}, {0, 2, hf}, {1, 2, ef}}, {"h", "e", "f"});
}

inline Eigen::MatrixXd sl2_matrix(const Eigen::VectorXd& c) {
  Eigen::MatrixXd m(2, 2);
  m << c(0), c(1), c(2), -c(0);
  return m;
}

inline Eigen::VectorXd sl2_coords(const Eigen::MatrixXd& m) {
  Eigen::VectorXd c(3);
  c << m(0, 0), m(0, 1), m(1, 0);
  return c;
}

namespace detail {

/// Skew-Hermitian basis of u(n): first the diagonal generators i E_kk, then
/// for each k < l the pair E_kl - E_lk and i(E_kl + E_lk).
inline std::vector<Eigen::MatrixXcd> un_basis(Eigen::Index n) {
  using namespace std::complex_literals;
  std::vector<Eigen::MatrixXcd> basis;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    m(k, k) = 1i;
    basis.push_back(m);
  }
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = k + 1; l < n; ++l) {
      Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
      a(k, l) = 1.0;
      a(l, k) = -1.0;
      basis.push_back(a);
      Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
      s(k, l) = 1i;
      s(l, k) = 1i;
      basis.push_back(s);
    }
  return basis;
}

}  // namespace detail

inline Eigen::MatrixXcd un_matrix(Eigen::Index n, const Eigen::VectorXd& coords) {
  const auto basis = detail::un_basis(n);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < basis.size(); ++i)
    m += coords(static_cast<Eigen::Index>(i)) * basis[i];
  return m;
}

inline Eigen::VectorXd un_coords(Eigen::Index n, const Eigen::MatrixXcd& m) {
  Eigen::VectorXd c(n * n);
  Eigen::Index idx = 0;
  for (Eigen::Index k = 0; k < n; ++k) c(idx++) = m(k, k).imag();
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = k + 1; l < n; ++l) {
      c(idx++) = m(k, l).real();
      c(idx++) = m(k, l).imag();
    }
  return c;
}

/// u(n) realified as an n^2-dimensional real Lie algebra.
inline AlgebraPtr un_algebra(Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("un_algebra: n >= 1");
  const auto basis = detail::un_basis(n);
  const Eigen::Index dim = n * n;
  std::vector<BracketEntry> entries;
  std::vector<std::string> labels;
  for (Eigen::Index i = 0; i < dim; ++i) labels.push_back("u" + std::to_string(i + 1));
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = i + 1; j < dim; ++j) {
      const Eigen::MatrixXcd comm =
          basis[static_cast<std::size_t>(i)] * basis[static_cast<std::size_t>(j)] -
          basis[static_cast<std::size_t>(j)] * basis[static_cast<std::size_t>(i)];
      const Eigen::VectorXd c = un_coords(n, comm);
      if (c.norm() > 0.0)
        entries.push_back({static_cast<int>(i), static_cast<int>(j), c});
    }
  return make_algebra(dim, entries, std::move(labels));
}

/// su(2): basis u1 = [[i,0],[0,-i]], u2 = [[0,1],[-1,0]], u3 = [[0,i],[i,0]].
inline AlgebraPtr su2_algebra() {
  Eigen::VectorXd c12 = 2.0 * Eigen::VectorXd::Unit(3, 2);
  Eigen::VectorXd c23 = 2.0 * Eigen::VectorXd::Unit(3, 0);
  Eigen::VectorXd c13 = -2.0 * Eigen::VectorXd::Unit(3, 1);
  return make_algebra(3, {{0, 1, c12}, {1, 2, c23}, {0, 2, c13}},
                      {"u1", "u2", "u3"});
}

inline Eigen::MatrixXcd su2_matrix(const Eigen::VectorXd& c) {
  using namespace std::complex_literals;
  Eigen::MatrixXcd m(2, 2);
  m(0, 0) = 1i * c(0);
  m(0, 1) = c(1) + 1i * c(2);
  m(1, 0) = -c(1) + 1i * c(2);
  m(1, 1) = -1i * c(0);
  return m;
}

inline Eigen::VectorXd su2_coords(const Eigen::MatrixXcd& m) {
  Eigen::VectorXd c(3);
  c << m(0, 0).imag(), m(0, 1).real(), m(0, 1).imag();
  return c;
}

/// Element of one of the concrete matrix algebras, validated against the
/// defining matrix-shape invariant.
struct MatrixAlgebraElement {
  AlgebraKind kind;
  Eigen::MatrixXcd matrix;
};

inline MatrixAlgebraElement make_matrix_element(AlgebraKind kind,
                                                Eigen::MatrixXcd m) {
  const double nm = m.norm();
  switch (kind.type) {
    case AlgebraKind::Type::sl2R:
      if (m.rows() != 2 || m.cols() != 2)
        throw std::invalid_argument("sl2R element must be 2x2");
      if (m.imag().norm() > 1e-12 * (1.0 + nm))
        throw std::invalid_argument("sl2R element must be real");
      if (std::abs(m.trace()) > 1e-12 * (1.0 + nm))
        throw std::invalid_argument("sl2R element must be traceless");
      break;
    case AlgebraKind::Type::su2:
      if (m.rows() != 2 || m.cols() != 2)
        throw std::invalid_argument("su2 element must be 2x2");
      if ((m + m.adjoint().eval()).norm() > 1e-12 * (1.0 + nm))
        throw std::invalid_argument("su2 element must be skew-Hermitian");
      if (std::abs(m.trace()) > 1e-12 * (1.0 + nm))
        throw std::invalid_argument("su2 element must be traceless");
      break;
    case AlgebraKind::Type::un:
      if (m.rows() != kind.n || m.cols() != kind.n)
        throw std::invalid_argument("u(n) element has wrong shape");
      if ((m + m.adjoint().eval()).norm() > 1e-12 * (1.0 + nm))
        throw std::invalid_argument("u(n) element must be skew-Hermitian");
      break;
  }
  return MatrixAlgebraElement{kind, std::move(m)};
}

/// Additive Jordan-type decomposition X = Xc + Xk + Xa + Xn into pairwise
/// commuting central-elliptic, compact-semisimple, hyperbolic and nilpotent
/// parts, together with the central elliptic representative Yc.
struct JordanParts {
  Eigen::MatrixXcd Xc, Xk, Xa, Xn, Yc;
};

namespace detail {
inline Eigen::MatrixXd sl2_J() {
  Eigen::MatrixXd j(2, 2);
  j << 0, -1, 1, 0;
  return j;
}
}  // namespace detail

/// Signed elliptic angle of a real traceless 2x2 matrix: theta with X
/// conjugate to theta J, zero for non-elliptic X. Borderline determinants
/// (|det| <= 1e-10 |X|^2) count as nilpotent.
inline double sl2_elliptic_angle(const Eigen::MatrixXd& x) {
  const double d = x.determinant();
  const double cutoff = 1e-10 * x.squaredNorm();
  if (d <= cutoff) return 0.0;
  const double jcomp = x(1, 0) - x(0, 1);
  return (jcomp >= 0 ? 1.0 : -1.0) * std::sqrt(d);
}

inline JordanParts jordan_parts(const MatrixAlgebraElement& x) {
  const Eigen::Index n = x.matrix.rows();
  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(n, n);
  JordanParts parts{zero, zero, zero, zero, zero};
  switch (x.kind.type) {
    case AlgebraKind::Type::sl2R: {
      const Eigen::MatrixXd m = x.matrix.real();
      const double d = m.determinant();
      const double cutoff = 1e-10 * m.squaredNorm();
      if (d > cutoff) {
        parts.Xc = x.matrix;  // elliptic; z(k) = k = so(2) here
        parts.Yc = sl2_elliptic_angle(m) * detail::sl2_J();
      } else if (d < -cutoff) {
        parts.Xa = x.matrix;  // hyperbolic
      } else {
        parts.Xn = x.matrix;  // nilpotent (borderline included)
      }
      break;
    }
    case AlgebraKind::Type::su2:
      parts.Xk = x.matrix;  // compact, z(k) trivial
      break;
    case AlgebraKind::Type::un: {
      const std::complex<double> mean = x.matrix.trace() / double(n);
      parts.Xc = mean * Eigen::MatrixXcd::Identity(n, n);
      parts.Xk = x.matrix - parts.Xc;
      parts.Yc = parts.Xc;
      break;
    }
  }
  return parts;
}

/// The Ad-invariant quasi-state zeta(X) = alpha(Y_c) in the concrete cases:
/// sl2(R): lambda * (signed elliptic angle), normalized by alpha(J) = lambda;
/// u(n): lambda * Im tr X; su(2): identically zero (non-Hermitian).
inline QuasiState gw_quasistate(AlgebraKind kind, double lambda) {
  json params;
  params["kind"] = kind.name();
  params["lambda"] = lambda;
  switch (kind.type) {
    case AlgebraKind::Type::sl2R:
      return QuasiState{sl2_algebra(),
                        [lambda](const Eigen::VectorXd& c) {
                          return lambda * sl2_elliptic_angle(sl2_matrix(c));
                        },
                        Family::gw_reductive, params};
    case AlgebraKind::Type::su2:
      return QuasiState{su2_algebra(),
                        [](const Eigen::VectorXd&) { return 0.0; },
                        Family::gw_reductive, params};
    case AlgebraKind::Type::un: {
      const Eigen::Index n = kind.n;
      return QuasiState{un_algebra(n),
                        [lambda, n](const Eigen::VectorXd& c) {
                          return lambda * c.head(n).sum();  // Im tr X
                        },
                        Family::gw_reductive, params};
    }
  }
  throw std::logic_error("gw_quasistate: unreachable");
}

/// For nonzero nilpotent x in sl2(R), an invertible g with g x g^-1 = 2x.
/// Built as g = u diag(sqrt 2, 1/sqrt 2) u^-1 where u conjugates the standard
/// nilpotent e to x.
inline Eigen::MatrixXd nilpotent_doubling_conjugator(const Eigen::MatrixXd& x) {
  const double nx = x.norm();
  if (nx == 0.0)
    throw std::domain_error("nilpotent_doubling_conjugator: x = 0");
  if (std::abs(x.trace()) > 1e-10 * nx ||
      std::abs(x.determinant()) > 1e-10 * nx * nx)
    throw std::domain_error("nilpotent_doubling_conjugator: x not nilpotent");

  // u = [v | p] with v spanning im x and x p = v: then u e u^-1 = x.
  const Eigen::MatrixXd im = column_space(x);
  const Eigen::VectorXd v = im.col(0);
  const Eigen::VectorXd p =
      x.completeOrthogonalDecomposition().solve(v);
  Eigen::MatrixXd u(2, 2);
  u << v, p;
  Eigen::MatrixXd d(2, 2);
  d << std::sqrt(2.0), 0, 0, 1.0 / std::sqrt(2.0);
  return u * d * u.inverse();
}

/// Weyl-invariance vanishing on the Cartan line of sl2(R): checks that
/// zeta(diag(t,-t)) is odd in t, invariant under the Weyl flip
/// Ad(k), k = [[0,1],[-1,0]], and therefore zero, within 1e-8 relative.
inline VerificationReport weyl_vanishing_check(const QuasiState& zeta,
                                               int samples = 100,
                                               std::uint64_t seed = 42,
                                               double tolerance = 1e-8) {
  if (!zeta.algebra->same_as(*sl2_algebra()))
    throw std::domain_error("weyl_vanishing_check: state must live on sl2(R)");
  // Ad(k) = exp(ad(-pi/2 J)); J has coordinates (0, -1, 1).
  Eigen::VectorXd jc(3);
  jc << 0, -1, 1;
  const Eigen::MatrixXd flip =
      zeta.algebra->ad_matrix((-M_PI / 2.0) * jc).exp();

  Rng rng(seed);
  detail::ResidualTracker tracker;
  for (int s = 0; s < samples; ++s) {
    const double mag = std::pow(10.0, rng.uniform(-1.0, 1.0));
    const double t = (rng.uniform() < 0.5 ? -1.0 : 1.0) * mag;
    Eigen::VectorXd ht = Eigen::VectorXd::Zero(3);
    ht(0) = t;
    const double vt = zeta.eval(ht);
    const double vmt = zeta.eval((-ht).eval());
    const double vflip = zeta.eval(flip * ht);
    const double scale = 1.0 + std::abs(t);
    const double residual =
        std::max({std::abs(vt + vmt), std::abs(vt - vflip), std::abs(vt)}) /
        scale;
    if (residual >= tracker.max_residual) {
      json w;
      w["t"] = t;
      w["zeta_ht"] = vt;
      w["zeta_h_minus_t"] = vmt;
      w["zeta_flip_ht"] = vflip;
      tracker.update(residual, w);
    }
  }
  return VerificationReport{"weyl_vanishing",
                            tracker.max_residual <= tolerance,
                            samples,
                            seed,
                            tracker.max_residual,
                            tolerance,
                            tracker.worst};
}

}  // namespace qslab
