#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qslab {

class LieAlgebra;
using AlgebraPtr = std::shared_ptr<const LieAlgebra>;

/// Dense real matrix viewed as a linear map; rows = target dim, cols = source dim.
struct LinearMap {
  Eigen::MatrixXd matrix;

  Eigen::Index source_dim() const { return matrix.cols(); }
  Eigen::Index target_dim() const { return matrix.rows(); }

  Eigen::VectorXd operator()(const Eigen::VectorXd& v) const {
    if (v.size() != matrix.cols())
      throw std::domain_error("LinearMap: argument dimension mismatch");
    return matrix * v;
  }
};

/// Coordinate vector in the basis of a fixed Lie algebra.
struct Element {
  AlgebraPtr algebra;
  Eigen::VectorXd coords;
};

namespace detail {
/// Relative cutoff used for all rank / nullspace decisions.
inline constexpr double kRankCutoff = 1e-9;
}  // namespace detail

/// Orthonormal nullspace basis of m, singular values below
/// cutoff * sigma_max treated as zero. Columns of the result span the kernel.
inline Eigen::MatrixXd nullspace(const Eigen::MatrixXd& m,
                                 double cutoff = detail::kRankCutoff) {
  const Eigen::Index n = m.cols();
  if (n == 0) return Eigen::MatrixXd(0, 0);
  if (m.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > cutoff * smax) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

inline Eigen::Index numeric_rank(const Eigen::MatrixXd& m,
                                 double cutoff = detail::kRankCutoff) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > cutoff * smax) ++rank;
  return rank;
}

/// Orthonormal basis of the column space of m (left singular vectors of the
/// nonzero singular values). Columns are sign-fixed so that the entry of
/// largest magnitude is positive, which makes the basis reproducible.
inline Eigen::MatrixXd column_space(const Eigen::MatrixXd& m,
                                    double cutoff = detail::kRankCutoff) {
  if (m.rows() == 0 || m.cols() == 0) return Eigen::MatrixXd(m.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > cutoff * smax) ++rank;
  Eigen::MatrixXd basis = svd.matrixU().leftCols(rank);
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    Eigen::Index imax = 0;
    basis.col(j).cwiseAbs().maxCoeff(&imax);
    if (basis(imax, j) < 0) basis.col(j) = -basis.col(j);
  }
  return basis;
}

/// Bracket table entry: [e_i, e_j] = coeffs in the basis, for i < j.
struct BracketEntry {
  int i = 0;
  int j = 0;
  Eigen::VectorXd coeffs;
};

/// Split structure recorded by semidirect(): first v_dim coordinates span the
/// abelian ideal V, the remaining ones the complementary subalgebra.
struct SemidirectSplit {
  Eigen::Index v_dim = 0;
  AlgebraPtr h;
};

/// Finite-dimensional real Lie algebra given by structure constants.
///
/// The structure tensor is stored as the family of adjoint matrices
/// ad(e_i); antisymmetry holds exactly by construction and the Jacobi
/// identity is validated on every basis triple at construction time.
/// Instances are immutable and safe to share across threads.
class LieAlgebra {
public:
  LieAlgebra(Eigen::Index dim, const std::vector<BracketEntry>& brackets,
             std::vector<std::string> labels = {})
      : dim_(dim), labels_(std::move(labels)) {
    if (dim < 0) throw std::invalid_argument("LieAlgebra: negative dimension");
    if (labels_.empty())
      for (Eigen::Index i = 0; i < dim; ++i)
        labels_.push_back("e" + std::to_string(i + 1));
    if (static_cast<Eigen::Index>(labels_.size()) != dim)
      throw std::invalid_argument("LieAlgebra: label count != dim");

    ad_basis_.assign(dim, Eigen::MatrixXd::Zero(dim, dim));
    for (const auto& entry : brackets) {
      if (entry.i < 0 || entry.j >= dim || entry.i >= entry.j)
        throw std::invalid_argument(
            "LieAlgebra: bracket entries require 0 <= i < j < dim");
      if (entry.coeffs.size() != dim)
        throw std::invalid_argument("LieAlgebra: bracket coeff length != dim");
      ad_basis_[entry.i].col(entry.j) = entry.coeffs;
      ad_basis_[entry.j].col(entry.i) = -entry.coeffs;
    }
    validate_jacobi();
  }

  Eigen::Index dim() const { return dim_; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// ad(e_i) as a dim x dim matrix.
  const Eigen::MatrixXd& ad_generator(Eigen::Index i) const {
    return ad_basis_.at(static_cast<std::size_t>(i));
  }

  /// Structure constants c^._{ij} = coordinates of [e_i, e_j].
  Eigen::VectorXd structure_column(Eigen::Index i, Eigen::Index j) const {
    return ad_basis_.at(static_cast<std::size_t>(i)).col(j);
  }

  Eigen::MatrixXd ad_matrix(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
    for (Eigen::Index i = 0; i < dim_; ++i)
      if (x(i) != 0.0) m += x(i) * ad_basis_[static_cast<std::size_t>(i)];
    return m;
  }

  double max_structure_constant() const {
    double c = 0.0;
    for (const auto& m : ad_basis_)
      c = std::max(c, m.size() ? m.cwiseAbs().maxCoeff() : 0.0);
    return c;
  }

  const std::optional<SemidirectSplit>& semidirect_split() const {
    return split_;
  }

  /// Two handles describe the same algebra if they share storage or have
  /// bitwise-identical structure tensors.
  bool same_as(const LieAlgebra& other) const {
    if (this == &other) return true;
    if (dim_ != other.dim_) return false;
    for (Eigen::Index i = 0; i < dim_; ++i) {
      const auto& a = ad_basis_[static_cast<std::size_t>(i)];
      const auto& b = other.ad_basis_[static_cast<std::size_t>(i)];
      if (!(a.array() == b.array()).all()) return false;
    }
    return true;
  }

private:
  friend AlgebraPtr semidirect(Eigen::Index, const AlgebraPtr&,
                               const std::vector<LinearMap>&,
                               std::vector<std::string>);

  void validate_jacobi() const {
    const double c = max_structure_constant();
    const double scale = 1.0 + c * c * c;
    for (Eigen::Index i = 0; i < dim_; ++i)
      for (Eigen::Index j = i + 1; j < dim_; ++j)
        for (Eigen::Index k = j + 1; k < dim_; ++k) {
          const Eigen::VectorXd r =
              ad_basis_[i] * ad_basis_[j].col(k) +
              ad_basis_[j] * ad_basis_[k].col(i) +
              ad_basis_[k] * ad_basis_[i].col(j);
          if (r.norm() > 1e-10 * scale)
            throw std::invalid_argument(
                "LieAlgebra: Jacobi identity fails on basis triple (" +
                std::to_string(i) + "," + std::to_string(j) + "," +
                std::to_string(k) + "), residual " + std::to_string(r.norm()));
        }
  }

  Eigen::Index dim_;
  std::vector<std::string> labels_;
  std::vector<Eigen::MatrixXd> ad_basis_;
  std::optional<SemidirectSplit> split_;
};

inline AlgebraPtr make_algebra(Eigen::Index dim,
                               const std::vector<BracketEntry>& brackets,
                               std::vector<std::string> labels = {}) {
  return std::make_shared<const LieAlgebra>(dim, brackets, std::move(labels));
}

/// Abelian algebra of the given dimension.
inline AlgebraPtr abelian_algebra(Eigen::Index dim,
                                  std::vector<std::string> labels = {}) {
  return make_algebra(dim, {}, std::move(labels));
}

/// Three-dimensional Heisenberg algebra, basis (X, Y, Z) with [X, Y] = Z.
inline AlgebraPtr heisenberg_algebra() {
  Eigen::VectorXd z(3);
  z << 0, 0, 1;
  return make_algebra(3, {{0, 1, z}}, {"X", "Y", "Z"});
}

inline Element element(const AlgebraPtr& g, Eigen::VectorXd coords) {
  if (!g) throw std::invalid_argument("element: null algebra");
  if (coords.size() != g->dim())
    throw std::invalid_argument("element: coordinate length != dim");
  return Element{g, std::move(coords)};
}

inline Element basis_element(const AlgebraPtr& g, Eigen::Index i) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(g->dim());
  c(i) = 1.0;
  return Element{g, std::move(c)};
}

inline void require_same_algebra(const Element& x, const Element& y,
                                 const char* who) {
  if (!x.algebra || !y.algebra || !x.algebra->same_as(*y.algebra))
    throw std::domain_error(std::string(who) +
                            ": elements belong to different algebras");
}

/// Lie bracket of two elements of the same algebra.
inline Element bracket(const Element& x, const Element& y) {
  require_same_algebra(x, y, "bracket");
  return Element{x.algebra, x.algebra->ad_matrix(x.coords) * y.coords};
}

/// Adjoint operator ad(x), acting on coordinates.
inline LinearMap ad(const Element& x) {
  return LinearMap{x.algebra->ad_matrix(x.coords)};
}

/// exp(ad(x)) via scaling-and-squaring (Eigen's Pade-based matrix
/// exponential meets the 1e-10 relative accuracy contract).
inline LinearMap exp_ad(const Element& x) {
  const Eigen::MatrixXd m = x.algebra->ad_matrix(x.coords);
  return LinearMap{m.exp()};
}

/// Orthonormal basis of the centralizer ker(ad x). For x = 0 this is the
/// full basis. Every returned y satisfies |[x, y]| <= 1e-8 (1 + |x||y|).
inline std::vector<Element> commuting_basis(const Element& x) {
  const Eigen::MatrixXd kernel = nullspace(x.algebra->ad_matrix(x.coords));
  std::vector<Element> out;
  out.reserve(static_cast<std::size_t>(kernel.cols()));
  for (Eigen::Index j = 0; j < kernel.cols(); ++j)
    out.push_back(Element{x.algebra, kernel.col(j)});
  return out;
}

/// Centralizer basis as a matrix (columns orthonormal).
inline Eigen::MatrixXd commuting_basis_matrix(const Element& x) {
  return nullspace(x.algebra->ad_matrix(x.coords));
}

/// Direct sum; cross brackets vanish and labels are concatenated.
inline AlgebraPtr direct_sum(const AlgebraPtr& g1, const AlgebraPtr& g2) {
  const Eigen::Index n1 = g1->dim(), n2 = g2->dim(), n = n1 + n2;
  std::vector<BracketEntry> entries;
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index j = i + 1; j < n1; ++j) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
      c.head(n1) = g1->structure_column(i, j);
      if (!c.isZero(0.0))
        entries.push_back({static_cast<int>(i), static_cast<int>(j), c});
    }
  for (Eigen::Index i = 0; i < n2; ++i)
    for (Eigen::Index j = i + 1; j < n2; ++j) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
      c.tail(n2) = g2->structure_column(i, j);
      if (!c.isZero(0.0))
        entries.push_back({static_cast<int>(n1 + i), static_cast<int>(n1 + j), c});
    }
  std::vector<std::string> labels = g1->labels();
  labels.insert(labels.end(), g2->labels().begin(), g2->labels().end());
  return make_algebra(n, entries, std::move(labels));
}

/// Semidirect product V x| h for an abelian V of dimension v_dim acted on by
/// rho: per h-basis-generator linear maps on V. rho must be a representation:
/// rho([X,Y]) = rho(X)rho(Y) - rho(Y)rho(X) within 1e-9, checked on basis
/// pairs. Coordinates are ordered (V first, then h) and the split is recorded
/// on the result.
inline AlgebraPtr semidirect(Eigen::Index v_dim, const AlgebraPtr& h,
                             const std::vector<LinearMap>& rho,
                             std::vector<std::string> v_labels = {}) {
  const Eigen::Index hd = h->dim();
  if (static_cast<Eigen::Index>(rho.size()) != hd)
    throw std::invalid_argument("semidirect: need one rho map per h generator");
  for (const auto& r : rho)
    if (r.matrix.rows() != v_dim || r.matrix.cols() != v_dim)
      throw std::invalid_argument("semidirect: rho maps must be v_dim x v_dim");

  double rho_scale = 1.0;
  for (const auto& r : rho)
    rho_scale = std::max(rho_scale, r.matrix.size() ? r.matrix.norm() : 0.0);
  for (Eigen::Index i = 0; i < hd; ++i)
    for (Eigen::Index j = i + 1; j < hd; ++j) {
      const Eigen::VectorXd bij = h->structure_column(i, j);
      Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(v_dim, v_dim);
      for (Eigen::Index k = 0; k < hd; ++k)
        if (bij(k) != 0.0) lhs += bij(k) * rho[static_cast<std::size_t>(k)].matrix;
      const Eigen::MatrixXd rhs =
          rho[static_cast<std::size_t>(i)].matrix * rho[static_cast<std::size_t>(j)].matrix -
          rho[static_cast<std::size_t>(j)].matrix * rho[static_cast<std::size_t>(i)].matrix;
      if ((lhs - rhs).norm() > 1e-9 * rho_scale * rho_scale)
        throw std::invalid_argument(
            "semidirect: rho is not a representation on generator pair (" +
            std::to_string(i) + "," + std::to_string(j) + "), residual " +
            std::to_string((lhs - rhs).norm()));
    }

  const Eigen::Index n = v_dim + hd;
  std::vector<BracketEntry> entries;
  // [h_i, v_a] = rho_i(e_a); with coordinates ordered (V, h) the pair index
  // is (a, v_dim + i) and [v_a, h_i] = -rho_i(e_a).
  for (Eigen::Index a = 0; a < v_dim; ++a)
    for (Eigen::Index i = 0; i < hd; ++i) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
      c.head(v_dim) = -rho[static_cast<std::size_t>(i)].matrix.col(a);
      if (!c.isZero(0.0))
        entries.push_back({static_cast<int>(a), static_cast<int>(v_dim + i), c});
    }
  for (Eigen::Index i = 0; i < hd; ++i)
    for (Eigen::Index j = i + 1; j < hd; ++j) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
      c.tail(hd) = h->structure_column(i, j);
      if (!c.isZero(0.0))
        entries.push_back(
            {static_cast<int>(v_dim + i), static_cast<int>(v_dim + j), c});
    }

  std::vector<std::string> labels;
  if (v_labels.empty())
    for (Eigen::Index a = 0; a < v_dim; ++a)
      labels.push_back("v" + std::to_string(a + 1));
  else
    labels = std::move(v_labels);
  if (static_cast<Eigen::Index>(labels.size()) != v_dim)
    throw std::invalid_argument("semidirect: V label count != v_dim");
  labels.insert(labels.end(), h->labels().begin(), h->labels().end());

  auto result = std::make_shared<LieAlgebra>(n, entries, std::move(labels));
  result->split_ = SemidirectSplit{v_dim, h};
  return result;
}

/// Surjective bracket-respecting linear map between two algebras.
struct AlgebraMap {
  AlgebraPtr source;
  AlgebraPtr target;
  Eigen::MatrixXd matrix;  // target_dim x source_dim

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
    if (x.size() != matrix.cols())
      throw std::domain_error("AlgebraMap: argument dimension mismatch");
    return matrix * x;
  }
};

/// Max residual of p[x,y] = [px, py] over source basis pairs, relative to
/// the structure scale. Used to validate quotient maps and witness chains.
inline double bracket_respect_residual(const AlgebraMap& p) {
  const Eigen::Index n = p.source->dim();
  const double scale =
      1.0 + p.source->max_structure_constant() + p.matrix.norm();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Eigen::VectorXd lhs = p.matrix * p.source->structure_column(i, j);
      const Eigen::VectorXd rhs =
          p.target->ad_matrix(p.matrix.col(i)) * p.matrix.col(j);
      worst = std::max(worst, (lhs - rhs).norm() / scale);
    }
  return worst;
}

inline AlgebraMap compose(const AlgebraMap& outer, const AlgebraMap& inner) {
  if (!inner.target->same_as(*outer.source))
    throw std::domain_error("compose: maps are not composable");
  return AlgebraMap{inner.source, outer.target, outer.matrix * inner.matrix};
}

struct QuotientResult {
  AlgebraPtr algebra;
  AlgebraMap projection;
};

/// Quotient of g by the span of ideal_basis. The span must be an ideal
/// (bracket(g, ideal) inside the span within 1e-9). The quotient is realized
/// on the orthogonal complement; the returned projection respects brackets
/// within 1e-9.
inline QuotientResult quotient(const AlgebraPtr& g,
                               const std::vector<Element>& ideal_basis) {
  const Eigen::Index n = g->dim();
  Eigen::MatrixXd ideal(n, static_cast<Eigen::Index>(ideal_basis.size()));
  for (std::size_t k = 0; k < ideal_basis.size(); ++k) {
    if (!ideal_basis[k].algebra->same_as(*g))
      throw std::domain_error("quotient: ideal element from another algebra");
    ideal.col(static_cast<Eigen::Index>(k)) = ideal_basis[k].coords;
  }
  const Eigen::MatrixXd ib = column_space(ideal);        // orthonormal ideal span
  const Eigen::MatrixXd comp = nullspace(ib.transpose()); // orthonormal complement

  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < ib.cols(); ++j) {
      const Eigen::VectorXd w = g->ad_generator(i) * ib.col(j);
      const Eigen::VectorXd res = w - ib * (ib.transpose() * w);
      if (res.norm() > 1e-9 * (1.0 + w.norm()))
        throw std::invalid_argument(
            "quotient: span is not an ideal (bracket with basis generator " +
            std::to_string(i) + " leaves the span, residual " +
            std::to_string(res.norm()) + ")");
    }

  const Eigen::Index m = comp.cols();
  std::vector<BracketEntry> entries;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const Eigen::VectorXd c =
          comp.transpose() * (g->ad_matrix(comp.col(i)) * comp.col(j));
      if (c.norm() > 0.0)
        entries.push_back({static_cast<int>(i), static_cast<int>(j), c});
    }
  std::vector<std::string> labels;
  for (Eigen::Index i = 0; i < m; ++i) labels.push_back("q" + std::to_string(i + 1));
  AlgebraPtr q = make_algebra(m, entries, std::move(labels));

  AlgebraMap p{g, q, comp.transpose()};
  const double res = bracket_respect_residual(p);
  if (res > 1e-9)
    throw std::invalid_argument(
        "quotient: projection does not respect brackets, residual " +
        std::to_string(res));
  return QuotientResult{q, std::move(p)};
}

}  // namespace qslab
