#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>

namespace qslab {

/// Seeded sampling engine used by all statistical checkers.
///
/// Wraps std::mt19937_64 but derives uniform and Gaussian variates directly
/// from the raw 64-bit stream, so a given seed produces the same sample
/// sequence on every platform and standard library.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal variate (Box-Muller, one value per draw).
  double gaussian() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Eigen::VectorXd gaussian_vector(Eigen::Index dim) {
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = gaussian();
    return v;
  }

  /// Uniform direction on the unit sphere of the given dimension.
  Eigen::VectorXd unit_vector(Eigen::Index dim) {
    Eigen::VectorXd v = gaussian_vector(dim);
    double n = v.norm();
    while (n < 1e-12) {  // astronomically rare; redraw
      v = gaussian_vector(dim);
      n = v.norm();
    }
    return v / n;
  }

  Eigen::VectorXcd complex_gaussian_vector(Eigen::Index dim) {
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double re = gaussian();
      const double im = gaussian();
      v(i) = std::complex<double>(re, im);
    }
    return v;
  }

  Eigen::VectorXcd complex_unit_vector(Eigen::Index dim) {
    Eigen::VectorXcd v = complex_gaussian_vector(dim);
    double n = v.norm();
    while (n < 1e-12) {
      v = complex_gaussian_vector(dim);
      n = v.norm();
    }
    return v / n;
  }

  /// Random skew-Hermitian n x n matrix with O(1) entries.
  Eigen::MatrixXcd skew_hermitian(Eigen::Index n) {
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        a(i, j) = std::complex<double>(gaussian(), gaussian());
    return 0.5 * (a - a.adjoint().eval());
  }

private:
  std::mt19937_64 gen_;
};

}  // namespace qslab
