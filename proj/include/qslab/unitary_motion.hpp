#pragma once

#include "qslab/algebra.hpp"
#include "qslab/frame_functions.hpp"
#include "qslab/quasistate.hpp"
#include "qslab/reductive.hpp"

#include <algorithm>
#include <complex>
#include <numeric>
#include <vector>

namespace qslab {

/// (v, X) in the unitary motion algebra g_n = C^n x| u(n).
struct MotionElement {
  Eigen::Index n = 0;
  Eigen::VectorXcd w;
  Eigen::MatrixXcd X;
};

inline MotionElement make_motion_element(Eigen::VectorXcd w,
                                         Eigen::MatrixXcd X) {
  const Eigen::Index n = w.size();
  if (X.rows() != n || X.cols() != n)
    throw std::invalid_argument("make_motion_element: shape mismatch");
  if ((X + X.adjoint().eval()).norm() > 1e-12 * (1.0 + X.norm()))
    throw std::domain_error("make_motion_element: X must be skew-Hermitian");
  return MotionElement{n, std::move(w), std::move(X)};
}

/// Real form of multiplication by a complex matrix, acting on (Re w; Im w).
inline Eigen::MatrixXd realify(const Eigen::MatrixXcd& m) {
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = m.real();
  r.topRightCorner(n, n) = -m.imag();
  r.bottomLeftCorner(n, n) = m.imag();
  r.bottomRightCorner(n, n) = m.real();
  return r;
}

/// The realified unitary motion algebra of dimension 2n + n^2. V-coordinates
/// come first as (Re w; Im w), then the u(n) coordinates.
inline AlgebraPtr build_motion_algebra(Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("build_motion_algebra: n >= 1");
  const auto basis = detail::un_basis(n);
  std::vector<LinearMap> rho;
  rho.reserve(basis.size());
  for (const auto& b : basis) rho.push_back(LinearMap{realify(b)});
  std::vector<std::string> v_labels;
  for (Eigen::Index k = 0; k < n; ++k)
    v_labels.push_back("Re w" + std::to_string(k + 1));
  for (Eigen::Index k = 0; k < n; ++k)
    v_labels.push_back("Im w" + std::to_string(k + 1));
  return semidirect(2 * n, un_algebra(n), rho, std::move(v_labels));
}

inline Eigen::VectorXd motion_coords(const MotionElement& e) {
  Eigen::VectorXd x(2 * e.n + e.n * e.n);
  x.head(e.n) = e.w.real();
  x.segment(e.n, e.n) = e.w.imag();
  x.tail(e.n * e.n) = un_coords(e.n, e.X);
  return x;
}

inline MotionElement motion_from_coords(Eigen::Index n,
                                        const Eigen::VectorXd& x) {
  if (x.size() != 2 * n + n * n)
    throw std::invalid_argument("motion_from_coords: wrong coordinate length");
  Eigen::VectorXcd w(n);
  w.real() = x.head(n);
  w.imag() = x.segment(n, n);
  return MotionElement{n, w, un_matrix(n, x.tail(n * n))};
}

/// P_v in u(n): P_v(w) = i <w, v> / <v, v> v, with the inner product linear
/// in the first argument. -i P_v is the orthogonal projection onto C v, and
/// P_{lambda v} = P_v.
inline Eigen::MatrixXcd projector(const Eigen::VectorXcd& v) {
  const double n2 = v.squaredNorm();
  if (n2 == 0.0) throw std::domain_error("projector: v = 0");
  return std::complex<double>(0.0, 1.0) * (v * v.adjoint()) / n2;
}

/// Eigendata of a skew-Hermitian X: X v_j = i lambda_j v_j with real
/// lambda_j, ordered by decreasing |lambda|, eigenvectors orthonormal and
/// phase-normalized (first significant component positive real). l counts the
/// eigenvalues above the relative cutoff.
struct SpectralData {
  Eigen::VectorXd lambdas;
  Eigen::MatrixXcd vectors;
  Eigen::Index l = 0;
};

inline SpectralData spectral_data(const Eigen::MatrixXcd& X,
                                  double cutoff = 1e-9) {
  const Eigen::Index n = X.rows();
  if ((X + X.adjoint().eval()).norm() > 1e-12 * (1.0 + X.norm()))
    throw std::domain_error("spectral_data: X must be skew-Hermitian");
  // -iX is Hermitian with eigenvalues lambda_j.
  const Eigen::MatrixXcd h = std::complex<double>(0.0, -1.0) * X;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectral_data: eigensolver failed");

  Eigen::VectorXd lam = es.eigenvalues();
  Eigen::MatrixXcd vec = es.eigenvectors();
  for (Eigen::Index j = 0; j < n; ++j) {
    // Phase-normalize: first significant component becomes positive real.
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::complex<double> z = vec(i, j);
      if (std::abs(z) > 1e-8) {
        vec.col(j) *= std::conj(z) / std::abs(z);
        break;
      }
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     const double da = std::abs(lam(a)), db = std::abs(lam(b));
                     if (std::abs(da - db) > 1e-12 * (1.0 + da)) return da > db;
                     for (Eigen::Index i = 0; i < n; ++i) {
                       const auto za = vec(i, a), zb = vec(i, b);
                       if (std::abs(za.real() - zb.real()) > 1e-12)
                         return za.real() < zb.real();
                       if (std::abs(za.imag() - zb.imag()) > 1e-12)
                         return za.imag() < zb.imag();
                     }
                     return false;
                   });

  SpectralData out;
  out.lambdas.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.lambdas(j) = lam(order[static_cast<std::size_t>(j)]);
    out.vectors.col(j) = vec.col(order[static_cast<std::size_t>(j)]);
  }
  const double xnorm = X.norm();
  out.l = 0;
  while (out.l < n && std::abs(out.lambdas(out.l)) > cutoff * xnorm) ++out.l;

  // Contract checks: eigenpair residuals, orthonormality, projector sum.
  const std::complex<double> i1(0.0, 1.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double res =
        (X * out.vectors.col(j) - i1 * out.lambdas(j) * out.vectors.col(j))
            .norm();
    if (res > 1e-9 * (1.0 + xnorm))
      throw std::runtime_error("spectral_data: eigenpair residual too large");
  }
  if ((out.vectors.adjoint() * out.vectors -
       Eigen::MatrixXcd::Identity(n, n))
          .norm() > 1e-10)
    throw std::runtime_error("spectral_data: basis not orthonormal");
  Eigen::MatrixXcd psum = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) psum += projector(out.vectors.col(j));
  if ((psum - i1 * Eigen::MatrixXcd::Identity(n, n)).norm() > 1e-10)
    throw std::runtime_error("spectral_data: projector sum violated");
  return out;
}

/// f_zeta(w) = zeta(-i w, i 1) for a normalized quasi-state on g_n.
/// Normalization (zeta = 0 on V x {0} and {0} x u(n)) is verified on seeded
/// samples within 1e-9 before extraction.
inline FrameFunction extract_frame_function(const QuasiState& zeta0,
                                            std::uint64_t seed = 42) {
  const auto& split = zeta0.algebra->semidirect_split();
  if (!split || split->v_dim % 2 != 0)
    throw std::invalid_argument(
        "extract_frame_function: state must live on a motion algebra");
  const Eigen::Index n = split->v_dim / 2;
  if (n < 2)
    throw std::domain_error("extract_frame_function: needs n >= 2");
  const Eigen::Index dim = zeta0.algebra->dim();

  Rng rng(seed);
  for (int s = 0; s < 32; ++s) {
    const double r = detail::sample_radii()[s % 3];
    Eigen::VectorXd xv = Eigen::VectorXd::Zero(dim);
    xv.head(2 * n) = r * rng.unit_vector(2 * n);
    if (std::abs(zeta0.eval(xv)) > 1e-9 * (1.0 + r))
      throw std::invalid_argument(
          "extract_frame_function: state not normalized on V");
    Eigen::VectorXd xh = Eigen::VectorXd::Zero(dim);
    xh.tail(n * n) = r * rng.unit_vector(n * n);
    if (std::abs(zeta0.eval(xh)) > 1e-9 * (1.0 + r))
      throw std::invalid_argument(
          "extract_frame_function: state not normalized on u(n)");
  }

  FrameFunction f;
  f.n = n;
  f.declared_kind = FrameKind::custom;
  f.growth_class = GrowthClass::unknown;
  f.eval = [n, ev = zeta0.eval](const Eigen::VectorXcd& w) {
    const std::complex<double> mi(0.0, -1.0);
    const Eigen::MatrixXcd i1 =
        std::complex<double>(0.0, 1.0) * Eigen::MatrixXcd::Identity(n, n);
    return ev(motion_coords(MotionElement{n, mi * w, i1}));
  };
  return f;
}

/// Evaluates the spectral reconstruction sum for a precomputed
/// eigendecomposition; exposed so basis-stability can be tested directly.
inline double reconstruct_with(const FrameFunction& f,
                               const Eigen::VectorXcd& w,
                               const SpectralData& data) {
  const std::complex<double> i1(0.0, 1.0);
  double total = 0.0;
  for (Eigen::Index j = 0; j < data.l; ++j) {
    const Eigen::VectorXcd vj = data.vectors.col(j);
    // P_{v_j}(w) with v_j unit: i <w, v_j> v_j, inner product linear in the
    // first argument.
    const Eigen::VectorXcd pw = i1 * vj.dot(w) * vj;
    total += data.lambdas(j) * f.eval(pw / data.lambdas(j));
  }
  return total;
}

/// zeta(w, X) = sum_{j <= l} lambda_j f(P_{v_j}(w) / lambda_j); recovers a
/// normalized quasi-state from its frame function.
inline double reconstruct(const FrameFunction& f, const MotionElement& elem) {
  if (f.n != elem.n)
    throw std::invalid_argument("reconstruct: dimension mismatch");
  if (f.n < 2) throw std::domain_error("reconstruct: needs n >= 2");
  if (std::abs(f.eval(Eigen::VectorXcd::Zero(f.n))) != 0.0)
    throw std::invalid_argument("reconstruct: f(0) != 0");
  return reconstruct_with(f, elem.w, spectral_data(elem.X));
}

/// The Ad-invariant family on g_n: zeta(v, X) = i lambda tr(X), real because
/// tr(X) is purely imaginary. Independent of v by construction.
inline QuasiState motion_ad_quasistate(Eigen::Index n, double lambda) {
  if (n < 1) throw std::invalid_argument("motion_ad_quasistate: n >= 1");
  json params;
  params["n"] = n;
  params["lambda"] = lambda;
  return QuasiState{build_motion_algebra(n),
                    [n, lambda](const Eigen::VectorXd& x) {
                      // tr X = i * sum of the diagonal u(n) coordinates.
                      return -lambda * x.segment(2 * n, n).sum();
                    },
                    Family::motion_ad, params};
}

/// Outcome of the no-mixed-part check: the normalized part of zeta must
/// vanish, and the sublinearity profile justifies applying the triviality
/// theorem.
struct NoMixedReport {
  VerificationReport report;
  SublinearityProfile profile;

  json to_json() const {
    json j = report.to_json();
    j["sublinearity_profile"] = profile.to_json();
    return j;
  }
};

/// Computes zeta0 via decompose and asserts |zeta0| <= 1e-6 (1 + |x|) on
/// seeded samples. A failure for a genuine continuous quasi-state would
/// contradict the triviality of normalized states and is flagged as a
/// paper-contradiction candidate.
inline NoMixedReport no_mixed_decomposition_check(const QuasiState& zeta,
                                                  int samples,
                                                  std::uint64_t seed,
                                                  double tolerance = 1e-6) {
  const auto& split = zeta.algebra->semidirect_split();
  if (!split || split->v_dim % 2 != 0)
    throw std::invalid_argument(
        "no_mixed_decomposition_check: state must live on a motion algebra");
  const Eigen::Index n = split->v_dim / 2;
  if (n < 2)
    throw std::domain_error("no_mixed_decomposition_check: needs n >= 2");
  auto dec = decompose(zeta, seed);
  const Eigen::Index dim = zeta.algebra->dim();

  Rng rng(seed);
  detail::ResidualTracker tracker;
  for (int s = 0; s < samples; ++s) {
    const double r = detail::sample_radii()[s % 3];
    const Eigen::VectorXd x = r * rng.unit_vector(dim);
    const double val = dec.zeta0.eval(x);
    const double residual = std::abs(val) / (1.0 + x.norm());
    if (residual >= tracker.max_residual) {
      json w;
      w["x"] = detail::vector_to_json(x);
      w["zeta0"] = val;
      tracker.update(residual, w);
    }
  }
  const bool pass = tracker.max_residual <= tolerance;
  if (!pass)
    tracker.worst["note"] = "paper-contradiction candidate: inspect input";

  // Sublinearity of the normalized part along V at a fixed generic X.
  const Eigen::VectorXd xh = rng.unit_vector(n * n);
  auto zeta0_v = [&dec, n, dim, xh](const Eigen::VectorXd& v) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
    x.head(2 * n) = v;
    x.tail(n * n) = xh;
    return dec.zeta0.eval(x);
  };
  auto profile = sublinearity_profile(zeta0_v, 2 * n, 16,
                                      {1.0, 4.0, 16.0, 64.0, 256.0}, seed);

  return NoMixedReport{
      VerificationReport{"no_mixed_decomposition", pass, samples, seed,
                         tracker.max_residual, tolerance, tracker.worst},
      std::move(profile)};
}

}  // namespace qslab
