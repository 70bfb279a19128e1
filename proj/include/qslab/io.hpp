#pragma once

#include "qslab/algebra.hpp"
#include "qslab/almost_abelian.hpp"
#include "qslab/quasistate.hpp"
#include "qslab/unitary_motion.hpp"

#include <string>
#include <vector>

namespace qslab {

// ---------------------------------------------------------------------------
// Real vectors and matrices: plain row-major arrays. Complex entries are
// [re, im] pairs.
// ---------------------------------------------------------------------------

inline json to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected a JSON array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

inline json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("expected a nonempty JSON array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(i)].size()) != cols)
      throw std::invalid_argument("ragged matrix rows");
    for (Eigen::Index k = 0; k < cols; ++k)
      m(i, k) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]
                    .get<double>();
  }
  return m;
}

inline json to_json(const Eigen::VectorXcd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    a.push_back({v(i).real(), v(i).imag()});
  return a;
}

inline Eigen::VectorXcd cvector_from_json(const json& j) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    if (!e.is_array() || e.size() != 2)
      throw std::invalid_argument("complex entries must be [re, im] pairs");
    v(static_cast<Eigen::Index>(i)) =
        std::complex<double>(e[0].get<double>(), e[1].get<double>());
  }
  return v;
}

inline json to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

inline Eigen::MatrixXcd cmatrix_from_json(const json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("expected a nonempty JSON array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) {
      const auto& e =
          j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument("complex entries must be [re, im] pairs");
      m(i, k) = std::complex<double>(e[0].get<double>(), e[1].get<double>());
    }
  return m;
}

// ---------------------------------------------------------------------------
// Lie algebra: { "dim": n, "labels": [...],
//                "brackets": [ {"i": i, "j": j, "coeffs": [...]} ] }, i < j.
// ---------------------------------------------------------------------------

inline json algebra_to_json(const LieAlgebra& g) {
  json j;
  j["dim"] = g.dim();
  j["labels"] = g.labels();
  json brackets = json::array();
  for (Eigen::Index a = 0; a < g.dim(); ++a)
    for (Eigen::Index b = a + 1; b < g.dim(); ++b) {
      const Eigen::VectorXd c = g.structure_column(a, b);
      if (c.norm() > 0.0) {
        json entry;
        entry["i"] = a;
        entry["j"] = b;
        entry["coeffs"] = to_json(c);
        brackets.push_back(entry);
      }
    }
  j["brackets"] = brackets;
  return j;
}

inline AlgebraPtr algebra_from_json(const json& j) {
  const Eigen::Index dim = j.at("dim").get<Eigen::Index>();
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j["labels"].get<std::vector<std::string>>();
  std::vector<BracketEntry> entries;
  for (const auto& e : j.value("brackets", json::array())) {
    const int i = e.at("i").get<int>();
    const int jj = e.at("j").get<int>();
    if (i >= jj)
      throw std::invalid_argument(
          "algebra_from_json: bracket entries must have i < j");
    entries.push_back({i, jj, vector_from_json(e.at("coeffs"))});
  }
  return make_algebra(dim, entries, std::move(labels));
}

// ---------------------------------------------------------------------------
// phi endomorphism: { "V_dim": n, "matrix": [[...]] }.
// ---------------------------------------------------------------------------

inline json phi_to_json(const AlmostAbelianSpec& spec) {
  json j;
  j["V_dim"] = spec.v_dim;
  j["matrix"] = to_json(spec.phi);
  return j;
}

inline AlmostAbelianSpec phi_from_json(const json& j) {
  const Eigen::MatrixXd m = matrix_from_json(j.at("matrix"));
  if (j.contains("V_dim") &&
      j["V_dim"].get<Eigen::Index>() != m.rows())
    throw std::invalid_argument("phi_from_json: V_dim does not match matrix");
  return AlmostAbelianSpec(m);
}

// ---------------------------------------------------------------------------
// Rigidity verdict, with the witness chain as explicit matrices.
// ---------------------------------------------------------------------------

inline json rigidity_to_json(const RigidityVerdict& v) {
  json j;
  j["rigid"] = v.rigid;
  j["rank_phi"] = v.rank_phi;
  j["rank_phi2"] = v.rank_phi2;
  if (v.witness_chain) {
    json chain = json::array();
    for (const auto& p : *v.witness_chain) {
      json step;
      step["source_dim"] = p.source->dim();
      step["target_dim"] = p.target->dim();
      step["matrix"] = to_json(p.matrix);
      chain.push_back(step);
    }
    j["witness_chain"] = chain;
  }
  if (v.splitting) {
    json s;
    s["n"] = v.splitting->n;
    s["V0"] = to_json(v.splitting->v0);
    s["V1"] = to_json(v.splitting->v1);
    j["invariant_splitting"] = s;
  }
  return j;
}

inline json classification_to_json(const Classification3d& c) {
  json j;
  j["label"] = label_name(c.label);
  if (c.a) j["a"] = *c.a;
  return j;
}

// ---------------------------------------------------------------------------
// MotionElement: { "n": n, "w": [[re,im],...], "X": [[[re,im],...],...] }.
// ---------------------------------------------------------------------------

inline json motion_to_json(const MotionElement& e) {
  json j;
  j["n"] = e.n;
  j["w"] = to_json(e.w);
  j["X"] = to_json(e.X);
  return j;
}

inline MotionElement motion_from_json(const json& j) {
  const Eigen::VectorXcd w = cvector_from_json(j.at("w"));
  const Eigen::MatrixXcd X = cmatrix_from_json(j.at("X"));
  if (j.contains("n") && j["n"].get<Eigen::Index>() != w.size())
    throw std::invalid_argument("motion_from_json: n does not match w");
  return make_motion_element(w, X);
}

// ---------------------------------------------------------------------------
// Sublinear c-functions:
//   {"kind": "constant", "value": k}
//   {"kind": "arctan", "direction": [...]}        (direction optional)
//   {"kind": "power", "p": 0.5}
//   {"kind": "radial_log"}
//   {"kind": "quotient_invariant", "inner": {...}}
// The wrapper kind projects onto the orthogonal complement of im phi^2 in W
// and therefore needs the spec.
// ---------------------------------------------------------------------------

inline SublinearFunction sublinear_from_json(const json& j,
                                             const AlmostAbelianSpec& spec,
                                             Eigen::Index domain_dim) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant" || kind == "zero")
    return sublinear_constant(domain_dim, j.value("value", 0.0));
  if (kind == "arctan" || kind == "bounded_smooth") {
    std::optional<Eigen::VectorXd> dir;
    if (j.contains("direction")) dir = vector_from_json(j["direction"]);
    return sublinear_arctan(domain_dim, dir);
  }
  if (kind == "power") return sublinear_power(domain_dim, j.value("p", 0.5));
  if (kind == "radial_log") return sublinear_radial_log(domain_dim);
  if (kind == "quotient_invariant") {
    const Eigen::MatrixXd m2 = spec.im_phi.transpose() * spec.im_phi2;
    const Eigen::Index inner_dim = nullspace(m2.transpose()).cols();
    return make_quotient_invariant(
        spec, sublinear_from_json(j.at("inner"), spec, inner_dim));
  }
  throw std::invalid_argument("unknown sublinear kind: " + kind);
}

}  // namespace qslab
