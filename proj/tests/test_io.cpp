#include <catch2/catch_amalgamated.hpp>

#include "qslab/qslab.hpp"

using namespace qslab;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("algebra JSON round-trip preserves structure") {
  auto h3 = heisenberg_algebra();
  const json j = algebra_to_json(*h3);
  CHECK(j["dim"] == 3);
  CHECK(j["brackets"].size() == 1);
  CHECK(j["brackets"][0]["i"] == 0);
  CHECK(j["brackets"][0]["j"] == 1);
  auto back = algebra_from_json(j);
  CHECK(back->same_as(*h3));
  CHECK(back->labels() == h3->labels());
}

TEST_CASE("algebra JSON rejects i >= j entries") {
  json j;
  j["dim"] = 3;
  j["brackets"] = json::array();
  json e;
  e["i"] = 1;
  e["j"] = 0;
  e["coeffs"] = {0.0, 0.0, 1.0};
  j["brackets"].push_back(e);
  CHECK_THROWS_AS(algebra_from_json(j), std::invalid_argument);
}

TEST_CASE("algebra JSON rejects non-Jacobi structure") {
  // [e1,e2] = e1, [e1,e3] = 0, [e2,e3] = e3 plus [e1,e2] copied wrong:
  // a deliberately inconsistent tensor violating Jacobi.
  json j;
  j["dim"] = 3;
  json b = json::array();
  b.push_back({{"i", 0}, {"j", 1}, {"coeffs", {0.0, 0.0, 1.0}}});
  b.push_back({{"i", 0}, {"j", 2}, {"coeffs", {0.0, 1.0, 0.0}}});
  b.push_back({{"i", 1}, {"j", 2}, {"coeffs", {1.0, 1.0, 1.0}}});
  j["brackets"] = b;
  CHECK_THROWS_AS(algebra_from_json(j), std::invalid_argument);
}

TEST_CASE("phi JSON round-trip") {
  MatrixXd phi(2, 2);
  phi << 0, 1, -1, 0;
  AlmostAbelianSpec spec(phi);
  const json j = phi_to_json(spec);
  auto back = phi_from_json(j);
  CHECK((back.phi - phi).norm() == 0.0);
  CHECK(back.v_dim == 2);

  json bad = j;
  bad["V_dim"] = 5;
  CHECK_THROWS_AS(phi_from_json(bad), std::invalid_argument);
}

TEST_CASE("rigidity verdict JSON carries the witness chain") {
  MatrixXd phi = MatrixXd::Zero(3, 3);
  phi(0, 1) = 1;
  phi(1, 2) = 1;
  auto v = decide_rigidity(AlmostAbelianSpec(phi));
  const json j = rigidity_to_json(v);
  CHECK(j["rigid"] == false);
  CHECK(j["witness_chain"].size() == 2);
  CHECK(j["witness_chain"][0]["source_dim"] == 4);
  CHECK(j["invariant_splitting"]["n"] == 3);

  auto r = decide_rigidity(AlmostAbelianSpec(MatrixXd::Identity(2, 2)));
  const json jr = rigidity_to_json(r);
  CHECK(jr["rigid"] == true);
  CHECK_FALSE(jr.contains("witness_chain"));
}

TEST_CASE("motion element JSON round-trip") {
  Rng rng(1);
  auto e = make_motion_element(rng.complex_gaussian_vector(2),
                               rng.skew_hermitian(2));
  const json j = motion_to_json(e);
  auto back = motion_from_json(j);
  CHECK((back.w - e.w).norm() == 0.0);
  CHECK((back.X - e.X).norm() == 0.0);
  CHECK_THROWS_AS(motion_from_json(json{{"w", json::array()}, {"X", json::array()}}),
                  std::invalid_argument);
}

TEST_CASE("verification report JSON shape") {
  auto zeta = heisenberg_quasistate(0.0, sublinear_arctan(1));
  auto rep = check_quasistate(zeta, 100, 11);
  const json j = rep.to_json();
  for (const char* key :
       {"verdict", "samples", "seed", "max_residual", "tolerance", "worst_case"})
    CHECK(j.contains(key));
}

TEST_CASE("sublinear function JSON parsing") {
  MatrixXd phi = MatrixXd::Zero(3, 3);
  phi(0, 1) = 1;
  phi(1, 2) = 1;
  AlmostAbelianSpec spec(phi);

  auto c1 = sublinear_from_json(json{{"kind", "arctan"}}, spec, spec.rank_phi);
  CHECK(c1.kind == SublinearKind::bounded_smooth);
  auto c2 = sublinear_from_json(json{{"kind", "power"}, {"p", 0.5}}, spec,
                                spec.rank_phi);
  CHECK(c2.kind == SublinearKind::power);
  auto c3 = sublinear_from_json(
      json{{"kind", "quotient_invariant"}, {"inner", {{"kind", "arctan"}}}},
      spec, spec.rank_phi);
  CHECK(c3.structurally_invariant);
  CHECK_THROWS_AS(sublinear_from_json(json{{"kind", "nope"}}, spec, 1),
                  std::invalid_argument);
}

TEST_CASE("complex matrix JSON uses [re, im] pairs") {
  Rng rng(2);
  const MatrixXcd m = rng.skew_hermitian(3);
  const json j = to_json(m);
  CHECK(j[0][0].is_array());
  CHECK(j[0][0].size() == 2);
  CHECK((cmatrix_from_json(j) - m).norm() == 0.0);
}
