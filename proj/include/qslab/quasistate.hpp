#pragma once

#include <nlohmann/json.hpp>

#include "qslab/algebra.hpp"
#include "qslab/random.hpp"

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

namespace qslab {

using json = nlohmann::ordered_json;

enum class Family {
  linear,
  zeta_alpha_c,
  heisenberg,
  gw_reductive,
  motion_ad,
  pullback,
  custom,
};

inline std::string family_name(Family f) {
  switch (f) {
    case Family::linear: return "linear";
    case Family::zeta_alpha_c: return "zeta_alpha_c";
    case Family::heisenberg: return "heisenberg";
    case Family::gw_reductive: return "gw_reductive";
    case Family::motion_ad: return "motion_ad";
    case Family::pullback: return "pullback";
    case Family::custom: return "custom";
  }
  return "custom";
}

/// A candidate Lie quasi-state: a total evaluator on coordinates of a fixed
/// algebra plus provenance metadata. Evaluators must be pure and reentrant.
struct QuasiState {
  AlgebraPtr algebra;
  std::function<double(const Eigen::VectorXd&)> eval;
  Family family = Family::custom;
  json params = json::object();

  double operator()(const Eigen::VectorXd& x) const { return eval(x); }
  double operator()(const Element& x) const { return eval(x.coords); }
};

inline QuasiState linear_quasistate(const AlgebraPtr& g, Eigen::VectorXd coeffs) {
  if (coeffs.size() != g->dim())
    throw std::invalid_argument("linear_quasistate: coefficient length != dim");
  json params;
  params["coeffs"] = std::vector<double>(coeffs.data(), coeffs.data() + coeffs.size());
  return QuasiState{
      g, [c = std::move(coeffs)](const Eigen::VectorXd& x) { return c.dot(x); },
      Family::linear, params};
}

inline QuasiState zero_quasistate(const AlgebraPtr& g) {
  return linear_quasistate(g, Eigen::VectorXd::Zero(g->dim()));
}

/// Outcome of a sampled verification. Residuals are stored relative to the
/// per-sample scale factor, so `pass` holds iff max_residual <= tolerance.
struct VerificationReport {
  std::string check;
  bool pass = false;
  int samples = 0;
  std::uint64_t seed = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  json worst_case = json::object();

  json to_json() const {
    json j;
    j["check"] = check;
    j["verdict"] = pass ? "pass" : "fail";
    j["samples"] = samples;
    j["seed"] = seed;
    j["max_residual"] = max_residual;
    j["tolerance"] = tolerance;
    j["worst_case"] = worst_case;
    return j;
  }
};

namespace detail {

inline json vector_to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

struct ResidualTracker {
  double max_residual = 0.0;
  json worst = json::object();

  void update(double residual, const json& witness) {
    if (residual >= max_residual) {
      max_residual = residual;
      worst = witness;
    }
  }
};

inline const std::vector<double>& sample_radii() {
  static const std::vector<double> radii = {0.1, 1.0, 10.0};
  return radii;
}

}  // namespace detail

/// Checks the defining identity zeta(aX + bY) = a zeta(X) + b zeta(Y) on
/// seeded commuting pairs. X is drawn on spheres of radii {0.1, 1, 10}; Y is
/// a random combination of the centralizer basis of X (which always contains
/// X itself, so homogeneity is exercised too); a, b are uniform in [-10, 10].
/// Residuals are scaled by 1 + |a||X| + |b||Y| and compared against 1e-7.
inline VerificationReport check_quasistate(const QuasiState& zeta, int samples,
                                           std::uint64_t seed,
                                           double tolerance = 1e-7) {
  if (samples < 1) throw std::invalid_argument("check_quasistate: samples >= 1");
  const AlgebraPtr g = zeta.algebra;
  const Eigen::Index n = g->dim();
  Rng rng(seed);
  detail::ResidualTracker tracker;

  for (int s = 0; s < samples; ++s) {
    const double rx = detail::sample_radii()[s % 3];
    const Eigen::VectorXd x = rx * rng.unit_vector(n);
    const Eigen::MatrixXd cb = nullspace(g->ad_matrix(x));
    if (cb.cols() == 0) continue;  // cannot happen: x centralizes itself
    Eigen::VectorXd y = cb * rng.gaussian_vector(cb.cols());
    const double ry = detail::sample_radii()[(s / 3) % 3];
    if (y.norm() > 1e-12) y *= ry / y.norm();
    const double a = rng.uniform(-10.0, 10.0);
    const double b = rng.uniform(-10.0, 10.0);

    const double lhs = zeta.eval(a * x + b * y);
    const double rhs = a * zeta.eval(x) + b * zeta.eval(y);
    const double scale = 1.0 + std::abs(a) * x.norm() + std::abs(b) * y.norm();
    const double residual = std::abs(lhs - rhs) / scale;
    if (residual >= tracker.max_residual) {
      json w;
      w["a"] = a;
      w["b"] = b;
      w["X"] = detail::vector_to_json(x);
      w["Y"] = detail::vector_to_json(y);
      w["lhs"] = lhs;
      w["rhs"] = rhs;
      tracker.update(residual, w);
    }
  }
  return VerificationReport{"quasistate",
                            tracker.max_residual <= tolerance,
                            samples,
                            seed,
                            tracker.max_residual,
                            tolerance,
                            tracker.worst};
}

/// Checks zeta(exp(ad g) X) = zeta(X) on seeded samples. The conjugating
/// element is kept at radius <= 1 so the two matrix exponentials stay well
/// conditioned; residuals are scaled by 1 + |X| against tolerance 1e-6.
inline VerificationReport check_ad_invariance(const QuasiState& zeta,
                                              int samples, std::uint64_t seed,
                                              double tolerance = 1e-6) {
  if (samples < 1)
    throw std::invalid_argument("check_ad_invariance: samples >= 1");
  const AlgebraPtr g = zeta.algebra;
  const Eigen::Index n = g->dim();
  static const std::vector<double> conj_radii = {0.1, 0.5, 1.0};
  Rng rng(seed);
  detail::ResidualTracker tracker;

  for (int s = 0; s < samples; ++s) {
    const double rx = detail::sample_radii()[s % 3];
    const Eigen::VectorXd x = rx * rng.unit_vector(n);
    const double rg = conj_radii[(s / 3) % 3];
    const Eigen::VectorXd w = rg * rng.unit_vector(n);
    const Eigen::MatrixXd Ad = g->ad_matrix(w).exp();
    const Eigen::VectorXd ax = Ad * x;

    const double lhs = zeta.eval(ax);
    const double rhs = zeta.eval(x);
    const double scale = 1.0 + x.norm();
    const double residual = std::abs(lhs - rhs) / scale;
    if (residual >= tracker.max_residual) {
      json witness;
      witness["g"] = detail::vector_to_json(w);
      witness["X"] = detail::vector_to_json(x);
      witness["AdX"] = detail::vector_to_json(ax);
      witness["zeta_AdX"] = lhs;
      witness["zeta_X"] = rhs;
      tracker.update(residual, witness);
    }
  }
  return VerificationReport{"ad_invariance",
                            tracker.max_residual <= tolerance,
                            samples,
                            seed,
                            tracker.max_residual,
                            tolerance,
                            tracker.worst};
}

/// Result of splitting a quasi-state on a semidirect product V x| h into
/// normalized part + canonical character + h-restriction. Recombination
/// zeta0 + alpha + psi = zeta holds pointwise exactly because the parts are
/// defined by evaluating zeta itself.
struct Decomposition {
  QuasiState zeta0;                                   // normalized part on g
  std::function<double(const Eigen::VectorXd&)> alpha;  // functional on V coords
  Eigen::VectorXd alpha_coeffs;                       // alpha on the V basis
  QuasiState psi;                                     // restriction to h
};

/// Splits zeta along the V/h coordinates recorded by semidirect().
/// alpha(v) = zeta(v, 0) is validated to be linear within 1e-8 on seeded
/// samples; a violation means the input was not a quasi-state.
inline Decomposition decompose(const QuasiState& zeta,
                               std::uint64_t seed = 42) {
  const AlgebraPtr g = zeta.algebra;
  if (!g->semidirect_split())
    throw std::invalid_argument(
        "decompose: algebra does not carry a semidirect split");
  const Eigen::Index vd = g->semidirect_split()->v_dim;
  const AlgebraPtr h = g->semidirect_split()->h;
  const Eigen::Index n = g->dim();

  auto embed_v = [n, vd](const Eigen::VectorXd& v) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    x.head(vd) = v;
    return x;
  };
  auto embed_h = [n, vd](const Eigen::VectorXd& y) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    x.tail(n - vd) = y;
    return x;
  };

  auto alpha = [zeta, embed_v](const Eigen::VectorXd& v) {
    return zeta.eval(embed_v(v));
  };

  Eigen::VectorXd alpha_coeffs(vd);
  for (Eigen::Index i = 0; i < vd; ++i)
    alpha_coeffs(i) = alpha(Eigen::VectorXd::Unit(vd, i));

  Rng rng(seed);
  for (int s = 0; s < 64; ++s) {
    const double r = detail::sample_radii()[s % 3];
    const Eigen::VectorXd u = r * rng.unit_vector(vd);
    const Eigen::VectorXd v = r * rng.unit_vector(vd);
    const double a = rng.uniform(-10.0, 10.0);
    const double add = std::abs(alpha(u + v) - alpha(u) - alpha(v));
    const double hom = std::abs(alpha(a * u) - a * alpha(u));
    const double scale = 1.0 + std::abs(a) * u.norm() + v.norm();
    if (add > 1e-8 * scale || hom > 1e-8 * scale)
      throw std::invalid_argument(
          "decompose: canonical character is not linear; "
          "input is not a Lie quasi-state");
  }

  QuasiState psi{h,
                 [zeta, embed_h](const Eigen::VectorXd& y) {
                   return zeta.eval(embed_h(y));
                 },
                 Family::custom, json{{"role", "h_restriction"}}};

  QuasiState zeta0{g,
                   [zeta, embed_v, embed_h, vd, n](const Eigen::VectorXd& x) {
                     return zeta.eval(x) -
                            zeta.eval(embed_v(x.head(vd))) -
                            zeta.eval(embed_h(x.tail(n - vd)));
                   },
                   Family::custom, json{{"role", "normalized_part"}}};

  return Decomposition{std::move(zeta0), std::move(alpha),
                       std::move(alpha_coeffs), std::move(psi)};
}

struct SublinearityProfile {
  std::vector<double> radii;
  std::vector<double> max_ratio;  // max over directions of |f(r u)| / r
  bool consistent = false;        // last <= first / 2

  json to_json() const {
    json j;
    j["radii"] = radii;
    j["max_ratio"] = max_ratio;
    j["verdict"] = consistent ? "sublinear-consistent" : "not-sublinear";
    return j;
  }
};

/// Growth profile of f along rays: for each radius the maximum of |f(v)|/|v|
/// over sampled directions. The verdict is "sublinear-consistent" when the
/// profile drops by at least a factor of 2 from the first to the last radius.
inline SublinearityProfile sublinearity_profile(
    const std::function<double(const Eigen::VectorXd&)>& f, Eigen::Index dim,
    int directions, std::vector<double> radii, std::uint64_t seed = 42) {
  if (radii.size() < 3 || !std::is_sorted(radii.begin(), radii.end()))
    throw std::invalid_argument(
        "sublinearity_profile: need >= 3 increasing radii");
  if (directions < 1)
    throw std::invalid_argument("sublinearity_profile: directions >= 1");
  Rng rng(seed);
  std::vector<Eigen::VectorXd> dirs;
  dirs.reserve(static_cast<std::size_t>(directions));
  for (int d = 0; d < directions; ++d) dirs.push_back(rng.unit_vector(dim));

  SublinearityProfile out;
  out.radii = radii;
  for (double r : radii) {
    double m = 0.0;
    for (const auto& u : dirs) m = std::max(m, std::abs(f(r * u)) / r);
    out.max_ratio.push_back(m);
  }
  out.consistent = out.max_ratio.back() <= out.max_ratio.front() / 2.0;
  return out;
}

/// Pullback p* zeta = zeta o p along a surjection produced by quotient() or a
/// rigidity witness chain. Preserves the quasi-state identity and
/// Ad-invariance.
inline QuasiState pullback(const AlgebraMap& p, const QuasiState& zeta_q) {
  if (!zeta_q.algebra || !p.target || !zeta_q.algebra->same_as(*p.target))
    throw std::domain_error("pullback: quasi-state lives on a different algebra");
  json params;
  params["inner_family"] = family_name(zeta_q.family);
  return QuasiState{p.source,
                    [m = p.matrix, inner = zeta_q.eval](const Eigen::VectorXd& x) {
                      return inner(m * x);
                    },
                    Family::pullback, params};
}

}  // namespace qslab
