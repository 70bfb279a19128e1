#include <catch2/catch_amalgamated.hpp>

#include "qslab/almost_abelian.hpp"

#include <cmath>

using namespace qslab;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd mat2(double a, double b, double c, double d) {
  MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

MatrixXd phi_L2() { return MatrixXd::Identity(2, 2); }
MatrixXd phi_L3(double a) { return mat2(0, 1, a, 1); }
MatrixXd phi_L4(double a) { return mat2(0, 1, a, 0); }

AlgebraPtr sl2_algebra_local() {
  VectorXd he = VectorXd::Zero(3), hf = VectorXd::Zero(3), ef = VectorXd::Zero(3);
  he(1) = 2.0;
  hf(2) = -2.0;
  ef(0) = 1.0;
  return make_algebra(3, {{0, 1, he}, {0, 2, hf}, {1, 2, ef}}, {"h", "e", "f"});
}

AlgebraPtr so3_algebra_local() {
  // [a,b] = c, [b,c] = a, [c,a] = b: compact simple, Killing negative definite.
  VectorXd ab = VectorXd::Unit(3, 2), bc = VectorXd::Unit(3, 0),
           ac = -VectorXd::Unit(3, 1).eval();
  return make_algebra(3, {{0, 1, ab}, {1, 2, bc}, {0, 2, ac}}, {"a", "b", "c"});
}

}  // namespace

TEST_CASE("AlmostAbelianSpec caches rank data") {
  AlmostAbelianSpec s2(phi_L4(0));
  CHECK(s2.rank_phi == 1);
  CHECK(s2.rank_phi2 == 0);
  AlmostAbelianSpec sid(phi_L2());
  CHECK(sid.rank_phi == 2);
  CHECK(sid.rank_phi2 == 2);
  MatrixXd phi3 = jordan_nilpotent(3);
  AlmostAbelianSpec s3(phi3);
  CHECK(s3.rank_phi == 2);
  CHECK(s3.rank_phi2 == 1);
}

TEST_CASE("build_g_phi: phi = 0 gives the abelian algebra") {
  AlmostAbelianSpec spec(MatrixXd::Zero(2, 2));
  auto g = build_g_phi(spec);
  CHECK(g->dim() == 3);
  CHECK(g->max_structure_constant() == 0.0);
}

TEST_CASE("build_g_phi: phi2 gives Heisenberg structure constants") {
  AlmostAbelianSpec spec(phi_L4(0));
  auto g = build_g_phi(spec);
  // [t, v2] = v1 and all other brackets vanish.
  CHECK(bracket(basis_element(g, 2), basis_element(g, 1)).coords ==
        basis_element(g, 0).coords);
  CHECK(bracket(basis_element(g, 2), basis_element(g, 0)).coords.norm() == 0.0);
  CHECK(bracket(basis_element(g, 0), basis_element(g, 1)).coords.norm() == 0.0);
}

TEST_CASE("build_g_phi: phi = Id on R is the (ax+b) algebra") {
  AlmostAbelianSpec spec(MatrixXd::Identity(1, 1));
  auto g = build_g_phi(spec);
  CHECK(g->dim() == 2);
  // [X3, X1] = X1 with X3 the t generator.
  CHECK(bracket(basis_element(g, 1), basis_element(g, 0)).coords ==
        basis_element(g, 0).coords);
}

TEST_CASE("zeta_alpha_c with c = 0 is the linear functional alpha") {
  AlmostAbelianSpec spec(phi_L4(0));
  VectorXd alpha(2);
  alpha << 1.5, -0.5;
  auto zeta = zeta_alpha_c(spec, alpha, sublinear_zero(1));
  Rng rng(2);
  for (int i = 0; i < 30; ++i) {
    VectorXd x = rng.gaussian_vector(3);
    CHECK(zeta.eval(x) == alpha.dot(x.head(2)));
  }
}

TEST_CASE("zeta_alpha_c frozen value on h3: arctan(1) + a") {
  AlmostAbelianSpec spec(phi_L4(0));
  const double a = 0.35;
  VectorXd alpha(2);
  alpha << 0, a;
  auto zeta = zeta_alpha_c(spec, alpha, sublinear_arctan(1));
  // h3 point x X + y Y + z Z = (x,y,z) = (1,1,0) <-> g_phi coords (z, y, x).
  VectorXd p(3);
  p << 0, 1, 1;
  CHECK(zeta.eval(p) == Catch::Approx(M_PI / 4 + a).epsilon(1e-14));
  // t = 0 branch is literal.
  VectorXd q(3);
  q << 3.0, 2.0, 0.0;
  CHECK(zeta.eval(q) == a * 2.0);
}

TEST_CASE("zeta_{0,c} is odd when c is odd") {
  AlmostAbelianSpec spec(phi_L3(1.0));
  auto zeta = zeta_alpha_c(spec, VectorXd::Zero(2), sublinear_arctan(2));
  Rng rng(4);
  for (int i = 0; i < 40; ++i) {
    const VectorXd x = 3.0 * rng.gaussian_vector(3);
    CHECK(zeta.eval(-x) == Catch::Approx(-zeta.eval(x)).margin(1e-13));
  }
}

TEST_CASE("zeta_alpha_c validates c(0) = 0") {
  AlmostAbelianSpec spec(phi_L4(0));
  CHECK_THROWS_AS(
      zeta_alpha_c(spec, VectorXd::Zero(2), sublinear_constant(1, 2.0)),
      std::invalid_argument);
  // The constant belongs in c0 instead.
  auto zeta = zeta_alpha_c(spec, VectorXd::Zero(2), sublinear_zero(1), 2.0);
  VectorXd e_t(3);
  e_t << 0, 0, 1;
  CHECK(zeta.eval(e_t) == 2.0);
}

TEST_CASE("ad_invariance_criterion on h3 with alpha = (0, a)") {
  AlmostAbelianSpec spec(phi_L4(0));
  VectorXd alpha(2);
  alpha << 0, 2.0;  // ker alpha = span(v1) = im phi
  auto crit = ad_invariance_criterion(spec, alpha, sublinear_arctan(1));
  CHECK(crit.linear_part_vanishes_on_im_phi);
  CHECK(crit.c_descends_mod_im_phi2);
  CHECK(crit.both());
}

TEST_CASE("ad_invariance_criterion: invertible phi forces constant c") {
  AlmostAbelianSpec spec(phi_L2());
  auto crit =
      ad_invariance_criterion(spec, VectorXd::Zero(2), sublinear_arctan(2));
  CHECK_FALSE(crit.c_descends_mod_im_phi2);
  auto crit2 =
      ad_invariance_criterion(spec, VectorXd::Zero(2), sublinear_zero(2));
  CHECK(crit2.c_descends_mod_im_phi2);
}

TEST_CASE("ad_invariance_criterion: alpha seeing im phi fails (i)") {
  AlmostAbelianSpec spec(phi_L4(0));
  VectorXd alpha(2);
  alpha << 1.0, 0.0;  // alpha(phi(v2)) = alpha(v1) = 1 != 0
  auto crit = ad_invariance_criterion(spec, alpha, sublinear_zero(1));
  CHECK_FALSE(crit.linear_part_vanishes_on_im_phi);
}

TEST_CASE("quotient_invariant wrapper descends structurally") {
  MatrixXd phi3 = jordan_nilpotent(3);
  AlmostAbelianSpec spec(phi3);
  // W = im phi is 2-dim, im phi^2 is 1-dim, complement is 1-dim.
  auto c = make_quotient_invariant(spec, sublinear_arctan(1));
  CHECK(c.domain_dim == 2);
  CHECK(c.structurally_invariant);
  auto crit = ad_invariance_criterion(spec, VectorXd::Zero(3), c);
  CHECK(crit.c_descends_mod_im_phi2);
  // Sampled descent holds too: perturbations along im phi^2 are invisible.
  Rng rng(6);
  const Eigen::MatrixXd pp = spec.phi * spec.phi;
  for (int i = 0; i < 30; ++i) {
    const VectorXd w = 2.0 * rng.gaussian_vector(2);
    const VectorXd shift = spec.im_phi.transpose() * (pp * rng.gaussian_vector(3));
    CHECK(std::abs(c.eval(w + shift) - c.eval(w)) <= 1e-12 * (1 + std::abs(c.eval(w))));
  }
}

TEST_CASE("SolvableAdInv equivalence across the phi grid") {
  std::vector<MatrixXd> phis = {phi_L4(0), jordan_nilpotent(3), phi_L2(),
                                mat2(1, 0, 0, 0), mat2(0, 1, -1, 0),
                                mat2(0, 1, 1, 0)};
  Rng rng(8);
  for (const auto& phi : phis) {
    AlmostAbelianSpec spec(phi);
    std::vector<SublinearFunction> cs = {
        sublinear_zero(spec.rank_phi), sublinear_arctan(spec.rank_phi),
        sublinear_power(spec.rank_phi, 0.5)};
    std::vector<VectorXd> alphas;
    alphas.push_back(rng.gaussian_vector(spec.v_dim));
    // Projection onto the annihilator of im phi: makes condition (i) hold.
    // Rounding dust from the projection is snapped to an exact zero (for an
    // invertible phi the only qualifying alpha is 0).
    VectorXd a2 = rng.gaussian_vector(spec.v_dim);
    a2 -= spec.im_phi * (spec.im_phi.transpose() * a2);
    if (a2.norm() < 1e-10) a2.setZero();
    alphas.push_back(a2);
    for (const auto& c : cs) {
      for (const auto& alpha : alphas) {
        auto crit = ad_invariance_criterion(spec, alpha, c);
        auto zeta = zeta_alpha_c(spec, alpha, c);
        auto report = check_ad_invariance(zeta, 400, 42);
        INFO("phi:\n" << phi << "\nalpha: " << alpha.transpose()
                      << "\nc kind: " << sublinear_kind_name(c.kind));
        CHECK(report.pass == crit.both());
      }
    }
  }
}

TEST_CASE("decide_rigidity on the classification table") {
  CHECK(decide_rigidity(AlmostAbelianSpec(MatrixXd::Zero(2, 2))).rigid);
  CHECK(decide_rigidity(AlmostAbelianSpec(phi_L2())).rigid);
  for (double a : {-1.0, 0.0, 1.0, 2.0})
    CHECK(decide_rigidity(AlmostAbelianSpec(phi_L3(a))).rigid);
  for (double a : {-1.0, 1.0, 2.0})
    CHECK(decide_rigidity(AlmostAbelianSpec(phi_L4(a))).rigid);
  auto v = decide_rigidity(AlmostAbelianSpec(phi_L4(0)));
  CHECK_FALSE(v.rigid);
  CHECK(v.rank_phi == 1);
  CHECK(v.rank_phi2 == 0);
}

TEST_CASE("witness for phi2 is the canonical identification with h3") {
  auto v = decide_rigidity(AlmostAbelianSpec(phi_L4(0)));
  REQUIRE(v.witness_chain.has_value());
  REQUIRE(v.witness_chain->size() == 1);
  const auto& p = v.witness_chain->front();
  CHECK(bracket_respect_residual(p) <= 1e-9);
  // (v1, v2, t) -> (t, v2, v1) up to the canonical sign choice.
  MatrixXd expected(3, 3);
  expected << 0, 0, 1, 0, 1, 0, 1, 0, 0;
  CHECK((p.matrix - expected).norm() <= 1e-12);
  CHECK(classify_3d(p.target).label == ThreeDimLabel::L4);
}

TEST_CASE("witness chain for Jordan blocks padded with identity") {
  for (Eigen::Index k : {2, 3, 4, 5}) {
    const Eigen::Index pad = 2;
    MatrixXd phi = MatrixXd::Zero(k + pad, k + pad);
    phi.topLeftCorner(k, k) = jordan_nilpotent(k);
    phi.bottomRightCorner(pad, pad) = MatrixXd::Identity(pad, pad);
    AlmostAbelianSpec spec(phi);
    auto v = decide_rigidity(spec);
    REQUIRE_FALSE(v.rigid);
    REQUIRE(v.witness_chain.has_value());
    CHECK(v.witness_chain->size() == static_cast<std::size_t>(k - 1));

    AlgebraMap total = v.witness_chain->front();
    for (std::size_t i = 1; i < v.witness_chain->size(); ++i) {
      CHECK(bracket_respect_residual((*v.witness_chain)[i]) <= 1e-9);
      total = compose((*v.witness_chain)[i], total);
    }
    CHECK(bracket_respect_residual(total) <= 1e-9);
    CHECK(numeric_rank(total.matrix) == 3);  // surjective onto h3
    auto cls = classify_3d(total.target);
    CHECK(cls.label == ThreeDimLabel::L4);
    CHECK(cls.a.value() == 0.0);

    // Invariant splitting: phi-cyclic chain on V0, invariant complement V1.
    REQUIRE(v.splitting.has_value());
    const auto& s = *v.splitting;
    CHECK(s.n == k);
    for (Eigen::Index j = 0; j + 1 < s.n; ++j)
      CHECK((phi * s.v0.col(j) - s.v0.col(j + 1)).norm() <= 1e-9);
    CHECK((phi * s.v0.col(s.n - 1)).norm() <= 1e-9);
    const MatrixXd v1 = s.v1;
    for (Eigen::Index j = 0; j < v1.cols(); ++j) {
      const VectorXd img = phi * v1.col(j);
      // img stays inside span(V1).
      const Eigen::MatrixXd pinv =
          v1.completeOrthogonalDecomposition().pseudoInverse();
      CHECK((img - v1 * (pinv * img)).norm() <= 1e-8 * (1 + img.norm()));
    }
  }
}

TEST_CASE("pulling heisenberg_quasistate back along a witness chain") {
  MatrixXd phi = MatrixXd::Zero(4, 4);
  phi.topLeftCorner(3, 3) = jordan_nilpotent(3);
  phi(3, 3) = 1.0;
  auto v = decide_rigidity(AlmostAbelianSpec(phi));
  REQUIRE(v.witness_chain.has_value());
  AlgebraMap total = v.witness_chain->front();
  for (std::size_t i = 1; i < v.witness_chain->size(); ++i)
    total = compose((*v.witness_chain)[i], total);
  auto zeta = heisenberg_quasistate(0.6, sublinear_arctan(1));
  auto pulled = pullback(total, zeta);
  CHECK(check_quasistate(pulled, 1000, 42).pass);
  CHECK(check_ad_invariance(pulled, 500, 42).pass);
}

TEST_CASE("classify_3d labels the table and the simple algebras") {
  CHECK(classify_3d(abelian_algebra(3)).label == ThreeDimLabel::L1);
  CHECK(classify_3d(heisenberg_algebra()).label == ThreeDimLabel::L4);
  CHECK(classify_3d(heisenberg_algebra()).a.value() == 0.0);
  CHECK(classify_3d(build_g_phi(AlmostAbelianSpec(phi_L2()))).label ==
        ThreeDimLabel::L2);
  CHECK(classify_3d(sl2_algebra_local()).label == ThreeDimLabel::simple_sl2);
  CHECK(classify_3d(so3_algebra_local()).label == ThreeDimLabel::simple_su2);
  CHECK(classify_3d(abelian_algebra(4)).label == ThreeDimLabel::not_3d);
}

TEST_CASE("classify_3d round-trips the table parameters") {
  for (double a : {-1.0, 0.0, 1.0, 2.0}) {
    auto c3 = classify_3d(build_g_phi(AlmostAbelianSpec(phi_L3(a))));
    CHECK(c3.label == ThreeDimLabel::L3);
    CHECK(c3.a.value() == Catch::Approx(a).margin(1e-9));
    auto c4 = classify_3d(build_g_phi(AlmostAbelianSpec(phi_L4(a))));
    CHECK(c4.label == ThreeDimLabel::L4);
    const double expected = a == 0.0 ? 0.0 : (a > 0 ? 1.0 : -1.0);
    CHECK(c4.a.value() == Catch::Approx(expected).margin(1e-9));
  }
}

TEST_CASE("heisenberg_quasistate examples") {
  // c = 0: a homomorphism.
  auto hom = heisenberg_quasistate(2.0, sublinear_zero(1));
  VectorXd p(3);
  p << 5, 3, -7;
  CHECK(hom.eval(p) == 6.0);

  // a = 0, c = arctan: zeta(2, 2, 5) = 2 arctan(1) = pi/2.
  auto zeta = heisenberg_quasistate(0.0, sublinear_arctan(1));
  VectorXd q(3);
  q << 2, 2, 5;
  CHECK(zeta.eval(q) == Catch::Approx(M_PI / 2).epsilon(1e-14));

  // z-independence, exactly.
  Rng rng(10);
  auto full = heisenberg_quasistate(0.9, sublinear_power(1, 0.5));
  for (int i = 0; i < 30; ++i) {
    VectorXd x = rng.gaussian_vector(3);
    VectorXd y = x;
    y(2) = rng.uniform(-100.0, 100.0);
    CHECK(full.eval(x) == full.eval(y));
  }

  CHECK(check_quasistate(zeta, 800, 42).pass);
  CHECK(check_ad_invariance(zeta, 400, 42).pass);
}

TEST_CASE("zeta_alpha_c continuity proxy at t -> 0") {
  std::vector<SublinearFunction> cs = {
      sublinear_zero(1), sublinear_arctan(1), sublinear_power(1, 0.5),
      sublinear_radial_log(1)};
  AlmostAbelianSpec spec(phi_L4(0));
  VectorXd alpha(2);
  alpha << 0, 1.2;
  Rng rng(12);
  const VectorXd v = rng.gaussian_vector(2);
  for (const auto& c : cs) {
    auto zeta = zeta_alpha_c(spec, alpha, c);
    double prev = 1e30;
    for (double t : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
      VectorXd x(3);
      x << v(0), v(1), t;
      const double gap = std::abs(zeta.eval(x) - alpha.dot(v));
      CHECK(gap <= prev + 1e-12);
      prev = gap;
    }
    CHECK(prev <= 1e-2);  // vanishing gap by t = 1e-6
  }
}
