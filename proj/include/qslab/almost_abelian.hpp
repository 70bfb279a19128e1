#pragma once

#include "qslab/algebra.hpp"
#include "qslab/quasistate.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qslab {

/// The pair (V, phi) defining the almost-abelian algebra g_phi = V x| R,
/// with rank data of phi and phi^2 cached. W = im phi carries the c-functions
/// of the zeta_{alpha,c} family; its orthonormal basis is sign-canonical so
/// W-coordinates are reproducible.
struct AlmostAbelianSpec {
  Eigen::Index v_dim = 0;
  Eigen::MatrixXd phi;
  Eigen::Index rank_phi = 0;
  Eigen::Index rank_phi2 = 0;
  Eigen::MatrixXd im_phi;    // v_dim x rank_phi, orthonormal columns
  Eigen::MatrixXd im_phi2;   // v_dim x rank_phi2
  Eigen::MatrixXd ker_phi;   // v_dim x (v_dim - rank_phi)

  explicit AlmostAbelianSpec(Eigen::MatrixXd phi_in) : phi(std::move(phi_in)) {
    if (phi.rows() != phi.cols() || phi.rows() < 1)
      throw std::invalid_argument("AlmostAbelianSpec: phi must be square");
    v_dim = phi.rows();
    const Eigen::MatrixXd phi2 = phi * phi;
    im_phi = column_space(phi);
    im_phi2 = column_space(phi2);
    ker_phi = nullspace(phi);
    rank_phi = im_phi.cols();
    rank_phi2 = im_phi2.cols();
    // im phi^2 must sit inside im phi.
    const double res =
        (im_phi2 - im_phi * (im_phi.transpose() * im_phi2)).norm();
    if (res > 1e-9 * (1.0 + im_phi2.norm()))
      throw std::invalid_argument(
          "AlmostAbelianSpec: im phi^2 not contained in im phi (residual " +
          std::to_string(res) + ")");
  }
};

enum class SublinearKind {
  constant,
  bounded_smooth,
  power,
  radial_log,
  quotient_invariant,
};

inline std::string sublinear_kind_name(SublinearKind k) {
  switch (k) {
    case SublinearKind::constant: return "constant";
    case SublinearKind::bounded_smooth: return "bounded_smooth";
    case SublinearKind::power: return "power";
    case SublinearKind::radial_log: return "radial_log";
    case SublinearKind::quotient_invariant: return "quotient_invariant";
  }
  return "constant";
}

/// A continuous sublinear function on W-coordinates, from a closed
/// enumeration of kinds. quotient_invariant wrappers factor through a chosen
/// orthogonal complement of im phi^2 in W and therefore satisfy the descent
/// condition of the Ad-invariance criterion structurally.
struct SublinearFunction {
  SublinearKind kind = SublinearKind::constant;
  Eigen::Index domain_dim = 0;
  json params = json::object();
  std::function<double(const Eigen::VectorXd&)> eval;
  bool structurally_invariant = false;

  double operator()(const Eigen::VectorXd& w) const { return eval(w); }
};

inline SublinearFunction sublinear_constant(Eigen::Index dim, double value) {
  SublinearFunction c;
  c.kind = SublinearKind::constant;
  c.domain_dim = dim;
  c.params["value"] = value;
  c.eval = [value](const Eigen::VectorXd&) { return value; };
  c.structurally_invariant = true;
  return c;
}

inline SublinearFunction sublinear_zero(Eigen::Index dim) {
  return sublinear_constant(dim, 0.0);
}

/// c(w) = arctan(<d, w>); bounded, smooth, c(0) = 0.
inline SublinearFunction sublinear_arctan(Eigen::Index dim,
                                          std::optional<Eigen::VectorXd> dir =
                                              std::nullopt) {
  Eigen::VectorXd d = dir ? *dir
                          : (dim > 0 ? Eigen::VectorXd::Constant(
                                           dim, 1.0 / std::sqrt(double(dim)))
                                     : Eigen::VectorXd(0));
  if (d.size() != dim)
    throw std::invalid_argument("sublinear_arctan: direction length != dim");
  SublinearFunction c;
  c.kind = SublinearKind::bounded_smooth;
  c.domain_dim = dim;
  c.params["direction"] = std::vector<double>(d.data(), d.data() + d.size());
  c.eval = [d = std::move(d)](const Eigen::VectorXd& w) {
    return std::atan(d.dot(w));
  };
  return c;
}

/// c(w) = |w|^p with 0 < p < 1.
inline SublinearFunction sublinear_power(Eigen::Index dim, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("sublinear_power: need 0 < p < 1");
  SublinearFunction c;
  c.kind = SublinearKind::power;
  c.domain_dim = dim;
  c.params["p"] = p;
  c.eval = [p](const Eigen::VectorXd& w) { return std::pow(w.norm(), p); };
  return c;
}

/// c(w) = log(1 + |w|).
inline SublinearFunction sublinear_radial_log(Eigen::Index dim) {
  SublinearFunction c;
  c.kind = SublinearKind::radial_log;
  c.domain_dim = dim;
  c.eval = [](const Eigen::VectorXd& w) { return std::log1p(w.norm()); };
  return c;
}

/// Wraps `inner` so that c = inner o (projection onto the orthogonal
/// complement of im phi^2 inside W). The result is constant along im phi^2
/// by construction.
inline SublinearFunction make_quotient_invariant(const AlmostAbelianSpec& spec,
                                                 SublinearFunction inner) {
  const Eigen::Index r1 = spec.rank_phi;
  // im phi^2 expressed in W-coordinates, then its orthogonal complement.
  const Eigen::MatrixXd m2 = spec.im_phi.transpose() * spec.im_phi2;  // r1 x r2
  const Eigen::MatrixXd comp = nullspace(m2.transpose());             // r1 x (r1 - r2)
  if (inner.domain_dim != comp.cols())
    throw std::invalid_argument(
        "make_quotient_invariant: inner domain must match the complement of "
        "im phi^2 in W (dim " + std::to_string(comp.cols()) + ")");
  SublinearFunction c;
  c.kind = SublinearKind::quotient_invariant;
  c.domain_dim = r1;
  c.params["inner_kind"] = sublinear_kind_name(inner.kind);
  c.params["inner"] = inner.params;
  c.eval = [comp, f = inner.eval](const Eigen::VectorXd& w) {
    return f(comp.transpose() * w);
  };
  c.structurally_invariant = true;
  return c;
}

/// g_phi = V x| R with [(v,s),(w,t)] = (s phi(w) - t phi(v), 0).
/// Coordinates are (v_1 .. v_n, t).
inline AlgebraPtr build_g_phi(const AlmostAbelianSpec& spec) {
  return semidirect(spec.v_dim, abelian_algebra(1, {"t"}),
                    {LinearMap{spec.phi}});
}

/// The quasi-state zeta_{alpha,c}(v, t) = c(phi(v)/t) t + alpha(v) for t != 0
/// and alpha(v) for t = 0, with the constant c0 = zeta(0,1) absorbed as
/// c |-> c + c0. c takes W-coordinates (the cached basis of im phi) and must
/// satisfy c(0) = 0.
inline QuasiState zeta_alpha_c(const AlmostAbelianSpec& spec,
                               const Eigen::VectorXd& alpha,
                               const SublinearFunction& c, double c0 = 0.0) {
  if (alpha.size() != spec.v_dim)
    throw std::invalid_argument("zeta_alpha_c: alpha length != V_dim");
  if (c.domain_dim != spec.rank_phi)
    throw std::invalid_argument(
        "zeta_alpha_c: c must live on W-coordinates of dimension " +
        std::to_string(spec.rank_phi));
  if (c.eval(Eigen::VectorXd::Zero(c.domain_dim)) != 0.0)
    throw std::invalid_argument("zeta_alpha_c: c(0) != 0");

  json params;
  params["alpha"] =
      std::vector<double>(alpha.data(), alpha.data() + alpha.size());
  params["c_kind"] = sublinear_kind_name(c.kind);
  params["c_params"] = c.params;
  params["c0"] = c0;

  const Eigen::Index vd = spec.v_dim;
  const Eigen::MatrixXd phi = spec.phi;
  const Eigen::MatrixXd wbasis_t = spec.im_phi.transpose();
  return QuasiState{
      build_g_phi(spec),
      [vd, phi, wbasis_t, alpha, ceval = c.eval, c0](const Eigen::VectorXd& x) {
        const Eigen::VectorXd v = x.head(vd);
        const double t = x(vd);
        if (t == 0.0) return alpha.dot(v);  // literal t = 0 branch
        const Eigen::VectorXd w = wbasis_t * (phi * v / t);
        return (ceval(w) + c0) * t + alpha.dot(v);
      },
      Family::zeta_alpha_c, params};
}

/// The two conditions of the Ad-invariance criterion for zeta_{alpha,c}:
/// (i) im phi inside ker alpha (exact, 1e-10 relative) and (ii) c descends to
/// W / im phi^2 (structural for quotient_invariant and constant kinds,
/// sampled otherwise).
struct AdInvarianceCriterion {
  bool linear_part_vanishes_on_im_phi = false;  // (i)
  bool c_descends_mod_im_phi2 = false;          // (ii)

  bool both() const {
    return linear_part_vanishes_on_im_phi && c_descends_mod_im_phi2;
  }
};

inline AdInvarianceCriterion ad_invariance_criterion(
    const AlmostAbelianSpec& spec, const Eigen::VectorXd& alpha,
    const SublinearFunction& c, std::uint64_t seed = 42) {
  AdInvarianceCriterion out;
  const double na = alpha.norm(), np = spec.phi.norm();
  out.linear_part_vanishes_on_im_phi =
      (spec.phi.transpose() * alpha).norm() <= 1e-10 * na * np ||
      (na == 0.0);

  if (c.structurally_invariant) {
    out.c_descends_mod_im_phi2 = true;
    return out;
  }
  const Eigen::MatrixXd phi2 = spec.phi * spec.phi;
  const Eigen::MatrixXd wt = spec.im_phi.transpose();
  Rng rng(seed);
  bool ok = true;
  static const double radii[3] = {0.1, 1.0, 10.0};
  for (int s = 0; s < 96 && ok; ++s) {
    const Eigen::VectorXd w =
        radii[s % 3] * rng.unit_vector(spec.rank_phi);
    const Eigen::VectorXd u = radii[(s / 3) % 3] * rng.unit_vector(spec.v_dim);
    const Eigen::VectorXd shift = wt * (phi2 * u);
    const double base = c.eval(w);
    if (std::abs(c.eval(w + shift) - base) > 1e-8 * (1.0 + std::abs(base)))
      ok = false;
  }
  out.c_descends_mod_im_phi2 = ok;
  return out;
}

/// phi_n of the corollary: n x n nilpotent single Jordan block with 1s on the
/// superdiagonal.
inline Eigen::MatrixXd jordan_nilpotent(Eigen::Index n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) m(i, i + 1) = 1.0;
  return m;
}

struct InvariantSplitting {
  Eigen::MatrixXd v0;  // v_dim x n, phi-cyclic chain basis
  Eigen::MatrixXd v1;  // v_dim x (v_dim - n), phi-invariant complement
  Eigen::Index n = 0;
};

/// Outcome of the rigidity decision for g_phi. Non-rigid verdicts carry the
/// invariant splitting and a chain of bracket-respecting surjections
/// g_phi -> g_{phi_n} -> ... -> g_{phi_2} ending with the canonical
/// identification of g_{phi_2} with the Heisenberg presentation (X, Y, Z).
struct RigidityVerdict {
  bool rigid = true;
  Eigen::Index rank_phi = 0;
  Eigen::Index rank_phi2 = 0;
  std::optional<InvariantSplitting> splitting;
  std::optional<std::vector<AlgebraMap>> witness_chain;
};

namespace detail {

/// Largest-magnitude entry made positive; canonicalizes sign choices coming
/// out of SVD-based constructions.
inline Eigen::VectorXd sign_canonical(Eigen::VectorXd v) {
  if (v.size() == 0) return v;
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0) v = -v;
  return v;
}

}  // namespace detail

inline RigidityVerdict decide_rigidity(const AlmostAbelianSpec& spec) {
  RigidityVerdict out;
  out.rank_phi = spec.rank_phi;
  out.rank_phi2 = spec.rank_phi2;
  out.rigid = (spec.rank_phi == spec.rank_phi2);
  if (out.rigid) return out;

  const Eigen::Index vd = spec.v_dim;
  // Rank decisions on the normalized endomorphism; chain vectors use phi
  // itself so that phi y_i = y_{i+1} exactly.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd0(spec.phi);
  const Eigen::MatrixXd phin = spec.phi / svd0.singularValues()(0);

  // Rank sequence of powers until stabilization; the stabilization index D is
  // the largest nilpotent Jordan block size.
  Eigen::MatrixXd pw = Eigen::MatrixXd::Identity(vd, vd);
  std::vector<Eigen::Index> ranks = {vd};
  Eigen::Index D = 0;
  for (Eigen::Index j = 1; j <= vd + 1; ++j) {
    pw = pw * phin;
    ranks.push_back(numeric_rank(pw));
    if (ranks[j] == ranks[j - 1]) {
      D = j - 1;
      break;
    }
  }
  if (D < 2)
    throw std::logic_error("decide_rigidity: inconsistent rank sequence");

  // Fitting decomposition V = N + R with N the generalized kernel.
  Eigen::MatrixXd phiD = Eigen::MatrixXd::Identity(vd, vd);
  for (Eigen::Index j = 0; j < D; ++j) phiD = phiD * phin;
  const Eigen::MatrixXd bn = nullspace(phiD);     // basis of N
  const Eigen::MatrixXd br = column_space(phiD);  // basis of R
  const Eigen::Index nn = bn.cols();

  const Eigen::MatrixXd a_hat = bn.transpose() * phin * bn;   // nilpotent on N
  const Eigen::MatrixXd a_raw = bn.transpose() * spec.phi * bn;

  // Cyclic vector of a largest block: top right singular vector of A^(D-1).
  Eigen::MatrixXd apow = Eigen::MatrixXd::Identity(nn, nn);
  for (Eigen::Index j = 0; j + 1 < D; ++j) apow = apow * a_hat;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(apow, Eigen::ComputeFullV);
  Eigen::VectorXd y1 = detail::sign_canonical(svd.matrixV().col(0));

  Eigen::MatrixXd chain(nn, D);
  chain.col(0) = y1;
  for (Eigen::Index j = 1; j < D; ++j) chain.col(j) = a_raw * chain.col(j - 1);

  // Invariant complement of the chain inside N: common kernel of the
  // functionals x -> <(A^T)^j z, x>, j = 0..D-1, with z the chain tail.
  Eigen::MatrixXd m(D, nn);
  Eigen::VectorXd row = chain.col(D - 1).normalized();
  for (Eigen::Index j = 0; j < D; ++j) {
    m.row(j) = row.transpose();
    row = (a_raw.transpose() * row).eval();
    const double rn = row.norm();
    if (rn > 0) row /= rn;
  }
  const Eigen::MatrixXd u = nullspace(m);  // nn x (nn - D)

  InvariantSplitting split;
  split.n = D;
  split.v0 = bn * chain;
  split.v1 = Eigen::MatrixXd(vd, vd - D);
  split.v1 << bn * u, br;
  out.splitting = split;

  // First surjection g_phi -> g_{phi_D}: chain coordinates, reversed so that
  // the target carries the superdiagonal normal form.
  Eigen::MatrixXd t_basis(vd, vd);
  t_basis << split.v0, split.v1;
  const Eigen::MatrixXd t_inv = t_basis.inverse();
  Eigen::MatrixXd q(D, vd);
  for (Eigen::Index k = 0; k < D; ++k) q.row(k) = t_inv.row(D - 1 - k);

  std::vector<AlgebraMap> maps;
  AlgebraPtr source = build_g_phi(spec);
  AlgebraPtr target = build_g_phi(AlmostAbelianSpec(jordan_nilpotent(D)));
  Eigen::MatrixXd m1 = Eigen::MatrixXd::Zero(D + 1, vd + 1);
  m1.topLeftCorner(D, vd) = q;
  m1(D, vd) = 1.0;
  maps.push_back(AlgebraMap{source, target, m1});

  // Center quotients g_{phi_k} -> g_{phi_{k-1}}, dropping the first V
  // coordinate (the center is ker phi_k x {0} = R e_1 x {0}).
  for (Eigen::Index k = D; k >= 3; --k) {
    AlgebraPtr next = build_g_phi(AlmostAbelianSpec(jordan_nilpotent(k - 1)));
    Eigen::MatrixXd mk = Eigen::MatrixXd::Zero(k, k + 1);
    for (Eigen::Index r = 0; r + 1 < k; ++r) mk(r, r + 1) = 1.0;
    mk(k - 1, k) = 1.0;
    maps.push_back(AlgebraMap{maps.back().target, next, mk});
  }

  // Canonical identification of g_{phi_2} with the (X, Y, Z) presentation,
  // (v1, v2, t) |-> (x, y, z) = (t, v2, v1), folded into the final map so the
  // chain ends at the Heisenberg algebra itself.
  Eigen::MatrixXd relabel(3, 3);
  relabel << 0, 0, 1, 0, 1, 0, 1, 0, 0;
  maps.back() = compose(
      AlgebraMap{maps.back().target, heisenberg_algebra(), relabel},
      maps.back());

  for (const auto& p : maps) {
    const double res = bracket_respect_residual(p);
    if (res > 1e-9)
      throw std::logic_error(
          "decide_rigidity: witness map fails bracket check, residual " +
          std::to_string(res));
  }
  out.witness_chain = std::move(maps);
  return out;
}

enum class ThreeDimLabel { L1, L2, L3, L4, simple_sl2, simple_su2, not_3d };

inline std::string label_name(ThreeDimLabel l) {
  switch (l) {
    case ThreeDimLabel::L1: return "L1";
    case ThreeDimLabel::L2: return "L2";
    case ThreeDimLabel::L3: return "L3";
    case ThreeDimLabel::L4: return "L4";
    case ThreeDimLabel::simple_sl2: return "simple_sl2";
    case ThreeDimLabel::simple_su2: return "simple_su2";
    case ThreeDimLabel::not_3d: return "not_3d";
  }
  return "not_3d";
}

/// Classification of a three-dimensional real Lie algebra. For L3 the
/// parameter a = -det(phi)/tr(phi)^2 is a full conjugation invariant; for L4
/// it is canonical only up to positive scaling and is reported as its sign.
struct Classification3d {
  ThreeDimLabel label = ThreeDimLabel::not_3d;
  std::optional<double> a;
};

inline Classification3d classify_3d(const AlgebraPtr& g) {
  if (g->dim() != 3) return {ThreeDimLabel::not_3d, std::nullopt};

  // Killing form; nondegenerate <=> simple (in dimension 3).
  Eigen::MatrixXd killing(3, 3);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j)
      killing(i, j) = (g->ad_generator(i) * g->ad_generator(j)).trace();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(killing);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double emax = ev.cwiseAbs().maxCoeff();
  if (emax > 0 && ev.cwiseAbs().minCoeff() > detail::kRankCutoff * emax) {
    int neg = 0;
    for (Eigen::Index i = 0; i < 3; ++i)
      if (ev(i) < 0) ++neg;
    if (neg == 1) return {ThreeDimLabel::simple_sl2, std::nullopt};
    if (neg == 3) return {ThreeDimLabel::simple_su2, std::nullopt};
    throw std::runtime_error("classify_3d: impossible Killing signature");
  }

  // Solvable case: locate a 2-dimensional abelian ideal V.
  Eigen::MatrixXd derived(3, 3);
  derived.col(0) = g->structure_column(0, 1);
  derived.col(1) = g->structure_column(0, 2);
  derived.col(2) = g->structure_column(1, 2);
  const Eigen::MatrixXd dspan = column_space(derived);
  const Eigen::Index dr = dspan.cols();
  if (dr == 0) return {ThreeDimLabel::L1, std::nullopt};

  Eigen::MatrixXd v_basis;
  if (dr == 2) {
    v_basis = dspan;
  } else if (dr == 1) {
    const Eigen::VectorXd z = dspan.col(0);
    const Eigen::MatrixXd cz = nullspace(g->ad_matrix(z));
    if (cz.cols() == 3) {
      // z central: V = span(z, any complement direction).
      const Eigen::MatrixXd comp = nullspace(z.transpose());
      v_basis = Eigen::MatrixXd(3, 2);
      v_basis << z, comp.col(0);
    } else if (cz.cols() == 2) {
      v_basis = cz;
    } else {
      throw std::runtime_error("classify_3d: classification failed");
    }
  } else {
    throw std::runtime_error("classify_3d: classification failed");
  }

  const double cscale = 1.0 + g->max_structure_constant();
  // V must be abelian and an ideal.
  const Eigen::VectorXd vv = g->ad_matrix(v_basis.col(0)) * v_basis.col(1);
  if (vv.norm() > 1e-9 * cscale)
    throw std::runtime_error("classify_3d: classification failed");
  for (Eigen::Index i = 0; i < 3; ++i) {
    const Eigen::MatrixXd img = g->ad_generator(i) * v_basis;
    const double res = (img - v_basis * (v_basis.transpose() * img)).norm();
    if (res > 1e-9 * cscale)
      throw std::runtime_error("classify_3d: classification failed");
  }

  const Eigen::MatrixXd tdir = nullspace(v_basis.transpose());
  const Eigen::MatrixXd phi =
      v_basis.transpose() * g->ad_matrix(tdir.col(0)) * v_basis;

  const double pn = phi.norm();
  if (pn <= 1e-12 * cscale) return {ThreeDimLabel::L1, std::nullopt};
  const double tr = phi.trace();
  const double det = phi.determinant();
  if ((phi - 0.5 * tr * Eigen::MatrixXd::Identity(2, 2)).norm() <=
      detail::kRankCutoff * pn)
    return {ThreeDimLabel::L2, std::nullopt};
  if (std::abs(tr) > detail::kRankCutoff * pn)
    return {ThreeDimLabel::L3, -det / (tr * tr)};
  // tr = 0: the L4 family; a is canonical up to positive scaling, so report
  // its sign, with the a = 0 tie decided by the rank of phi.
  Eigen::JacobiSVD<Eigen::MatrixXd> psvd(phi);
  const bool singular = psvd.singularValues()(1) <=
                        detail::kRankCutoff * psvd.singularValues()(0);
  if (singular) return {ThreeDimLabel::L4, 0.0};
  return {ThreeDimLabel::L4, det < 0 ? 1.0 : -1.0};
}

/// Ad-invariant quasi-states on the Heisenberg algebra:
/// zeta(x, y, z) = c(y/x) x + a y for x != 0, extended by a y at x = 0.
/// The value never depends on z.
inline QuasiState heisenberg_quasistate(double a, const SublinearFunction& c) {
  if (c.domain_dim != 1)
    throw std::invalid_argument("heisenberg_quasistate: c must be 1-dimensional");
  if (c.eval(Eigen::VectorXd::Zero(1)) != 0.0)
    throw std::invalid_argument("heisenberg_quasistate: c(0) != 0");
  json params;
  params["a"] = a;
  params["c_kind"] = sublinear_kind_name(c.kind);
  params["c_params"] = c.params;
  return QuasiState{heisenberg_algebra(),
                    [a, ceval = c.eval](const Eigen::VectorXd& p) {
                      const double x = p(0), y = p(1);
                      if (x == 0.0) return a * y;
                      Eigen::VectorXd arg(1);
                      arg(0) = y / x;
                      return ceval(arg) * x + a * y;
                    },
                    Family::heisenberg, params};
}

}  // namespace qslab
