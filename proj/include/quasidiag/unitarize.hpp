#pragma once

//
// Module      : unitarize
// Description : average the grid inner product over the group, factor the
//               basis change V with V*V = S, and split off the nearby
//               unitary U by polar decomposition
//

#include <string>

#include "quasidiag/grid.hpp"
#include "quasidiag/group.hpp"
#include "quasidiag/linalg.hpp"

namespace qd {

/// Matrix S of the averaged inner product in the canonical frame:
/// <v,w>* = <v, S w>. deviation = ||S - I||.
struct GramData {
  Matrix S;
  QuadratureScheme quadrature;
  double deviation = 0.0;
};

namespace detail {

inline Matrix average_once(const EvaluationMap& em, const QuadratureScheme& quad) {
  const Eigen::Index E = em.weighted_matrix().rows();
  Matrix S = Matrix::Zero(E, E);
  for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
    const Matrix pi = induced_representation(em, quad.nodes[i]).matrix;
    S += quad.weights[i] * (pi.adjoint() * pi);
  }
  return 0.5 * (S + S.adjoint());
}

}  // namespace detail

/// S = sum_gamma w_gamma pi(gamma)^† pi(gamma). The integrand entries on the
/// torus are trig polynomials of degree <= 2*band, so the default lattice of
/// 4*band+1 nodes per dimension integrates them exactly; a doubled-resolution
/// recomputation must agree, otherwise the quadrature is refused.
inline GramData averaged_gram(const EvaluationMap& em, int avg_resolution = 0) {
  const GroupPtr& G = em.grid().group;
  GramData out;
  if (G->is_finite()) {
    out.quadrature = haar_quadrature(*G, G->order());
    out.S = detail::average_once(em, out.quadrature);
  } else {
    const int res = avg_resolution > 0 ? avg_resolution : 4 * em.band_degree() + 1;
    out.quadrature = haar_quadrature(*G, res);
    out.S = detail::average_once(em, out.quadrature);
    const Matrix S2 = detail::average_once(em, haar_quadrature(*G, 2 * res));
    if (operator_norm(S2 - out.S) > 1e-8) throw QuadratureTooCoarse();
  }
  const Eigen::Index E = out.S.rows();
  out.deviation = operator_norm(out.S - Matrix::Identity(E, E));
  if (min_eigenvalue_hermitian(out.S) <= 0.0) throw NotPositiveDefinite();
  return out;
}

enum class BasisStrategy { sqrt, cholesky };

inline const char* strategy_name(BasisStrategy s) {
  return s == BasisStrategy::sqrt ? "sqrt" : "cholesky";
}

/// Basis change V with V^†V = S, its polar parts, and the measured gap.
struct UnitarizationData {
  Matrix V;
  Matrix A;  // positive part
  Matrix U;  // unitary part, V = A U
  double vu_gap = 0.0;
  BasisStrategy strategy = BasisStrategy::cholesky;
  double deviation = 0.0;  // carried from GramData
};

/// Only V is produced here; polar_step completes A, U, vu_gap.
inline UnitarizationData basis_change(const GramData& gram, BasisStrategy strategy) {
  UnitarizationData ud;
  ud.strategy = strategy;
  ud.deviation = gram.deviation;
  ud.V = strategy == BasisStrategy::sqrt ? hermitian_sqrt(gram.S) : cholesky_upper(gram.S);
  return ud;
}

/// V = P Sigma Q^† -> U = P Q^†, A = P Sigma P^†, vu_gap = max |sigma - 1|.
/// The gap depends only on S, so both strategies must report the same value.
inline void polar_step(UnitarizationData& ud) {
  Eigen::JacobiSVD<Matrix> svd(ud.V, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues().minCoeff() <= 1e-10) throw SingularV();
  ud.U = svd.matrixU() * svd.matrixV().adjoint();
  ud.A = svd.matrixU() * svd.singularValues().cast<cdouble>().asDiagonal() *
         svd.matrixU().adjoint();
  double gap = 0.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    gap = std::max(gap, std::abs(svd.singularValues()(i) - 1.0));
  ud.vu_gap = gap;
}

inline UnitarizationData unitarization(const GramData& gram, BasisStrategy strategy) {
  UnitarizationData ud = basis_change(gram, strategy);
  polar_step(ud);
  return ud;
}

/// The representation rewritten in the averaged-inner-product frame:
/// pi~(gamma) = V pi(gamma) V^{-1}, unitary up to the averaging error.
inline Matrix unitarized_representation(const UnitarizationData& ud, const Matrix& pi) {
  return ud.V * pi * ud.V.inverse();
}

}  // namespace qd
