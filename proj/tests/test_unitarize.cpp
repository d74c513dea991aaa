#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "quasidiag/errors.hpp"
#include "quasidiag/unitarize.hpp"

using namespace qd;

namespace {

GridProfile perturbed(std::uint64_t seed, double amplitude = 0.1) {
  GridProfile p;
  p.perturbed = true;
  p.seed = seed;
  p.amplitude = amplitude;
  return p;
}

Matrix random_pd(int n) {
  Matrix M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      M(i, j) = cdouble(std::sin(1.0 + i + 3 * j), std::cos(2.0 + 2 * i + j));
  return M.adjoint() * M + 0.5 * Matrix::Identity(n, n);
}

}  // namespace

TEST_CASE("averaging over the group is a no-op on exact isometries") {
  const GroupPtr T = make_torus_group(1);
  const EvaluationMap em(build_grid(T, 12), 2);  // uniform, 12 >= 2*2+1
  const GramData gd = averaged_gram(em);
  REQUIRE(operator_norm(gd.S - Matrix::Identity(gd.S.rows(), gd.S.cols())) < 1e-10);
  REQUIRE(gd.deviation < 1e-10);

  const GroupPtr G = make_cyclic_group(5);
  const EvaluationMap emf(build_grid(G, 0), 0);
  const GramData gf = averaged_gram(emf);
  REQUIRE(operator_norm(gf.S - Matrix::Identity(5, 5)) < 1e-10);
}

TEST_CASE("averaged deviation is controlled by the isometry distortion") {
  const GroupPtr T = make_torus_group(1);
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const EvaluationMap em(build_grid(T, 14, perturbed(seed)), 2);
    const double eps_dist = isometry_distortion(em);
    const GramData gd = averaged_gram(em);
    REQUIRE(gd.deviation <= 2.0 * eps_dist + 1e-8);
  }
}

TEST_CASE("the averaged matrix is invariant under the representation") {
  const GroupPtr T = make_torus_group(1);
  const EvaluationMap em(build_grid(T, 14, perturbed(4)), 2);
  const GramData gd = averaged_gram(em);
  for (double a : {0.0, 0.77, 2.9}) {
    const Matrix pi = induced_representation(em, T->point(a)).matrix;
    REQUIRE(operator_norm(pi.adjoint() * gd.S * pi - gd.S) < 1e-10);
  }
}

TEST_CASE("a coarse averaging lattice is refused") {
  const GroupPtr T = make_torus_group(1);
  const EvaluationMap em(build_grid(T, 14, perturbed(4)), 2);
  // Entries of the integrand have degree up to 2*band = 4; 3 nodes alias them.
  REQUIRE_THROWS_AS(averaged_gram(em, 3), QuadratureTooCoarse);
}

TEST_CASE("diagonal basis change has the closed-form factor") {
  GramData gd;
  gd.S = Matrix::Zero(2, 2);
  gd.S(0, 0) = cdouble(4.0);
  gd.S(1, 1) = cdouble(1.0);
  gd.deviation = 3.0;
  for (BasisStrategy s : {BasisStrategy::sqrt, BasisStrategy::cholesky}) {
    const UnitarizationData ud = basis_change(gd, s);
    REQUIRE(std::abs(ud.V(0, 0) - cdouble(2.0)) < 1e-14);
    REQUIRE(std::abs(ud.V(1, 1) - cdouble(1.0)) < 1e-14);
    REQUIRE(std::abs(ud.V(0, 1)) < 1e-14);
    REQUIRE(std::abs(ud.V(1, 0)) < 1e-14);
    REQUIRE(ud.deviation == 3.0);
  }
  REQUIRE(std::string(strategy_name(BasisStrategy::sqrt)) == "sqrt");
  REQUIRE(std::string(strategy_name(BasisStrategy::cholesky)) == "cholesky");
}

TEST_CASE("both factorizations reproduce the averaged matrix") {
  GramData gd;
  gd.S = random_pd(3);
  for (BasisStrategy s : {BasisStrategy::sqrt, BasisStrategy::cholesky}) {
    const UnitarizationData ud = basis_change(gd, s);
    REQUIRE(operator_norm(ud.V.adjoint() * ud.V - gd.S) < 1e-10);
  }
}

TEST_CASE("polar decomposition splits the factor into positive and unitary parts") {
  GramData gd;
  gd.S = random_pd(4);
  for (BasisStrategy s : {BasisStrategy::sqrt, BasisStrategy::cholesky}) {
    const UnitarizationData ud = unitarization(gd, s);
    const Matrix I = Matrix::Identity(4, 4);
    REQUIRE(operator_norm(ud.U.adjoint() * ud.U - I) < 1e-12);
    REQUIRE(operator_norm(ud.A * ud.U - ud.V) < 1e-10);
    REQUIRE(min_eigenvalue_hermitian(ud.A) > -1e-12);
  }
}

TEST_CASE("the polar gap is a property of the averaged matrix alone") {
  GramData gd;
  gd.S = random_pd(4);
  const UnitarizationData us = unitarization(gd, BasisStrategy::sqrt);
  const UnitarizationData uc = unitarization(gd, BasisStrategy::cholesky);
  REQUIRE(std::abs(us.vu_gap - uc.vu_gap) < 1e-10);
  REQUIRE(us.vu_gap > 0.0);
}

TEST_CASE("Newton iteration confirms the unitary polar factor") {
  GramData gd;
  gd.S = random_pd(3);
  const UnitarizationData ud = unitarization(gd, BasisStrategy::cholesky);
  Matrix X = ud.V;
  for (int it = 0; it < 60; ++it) X = 0.5 * (X + X.inverse().adjoint());
  REQUIRE(operator_norm(X - ud.U) < 1e-10);
}

TEST_CASE("unitary input is a fixed point of the polar step") {
  GramData gd;
  gd.S = random_pd(3);
  const UnitarizationData ud = unitarization(gd, BasisStrategy::sqrt);
  REQUIRE(polar_gap(ud.U) < 1e-12);
  UnitarizationData again;
  again.V = ud.U;
  polar_step(again);
  REQUIRE(again.vu_gap < 1e-12);
  REQUIRE(operator_norm(again.U - ud.U) < 1e-10);
}

TEST_CASE("indefinite input is refused by every factorization") {
  Matrix S = Matrix::Identity(2, 2);
  S(1, 1) = cdouble(-0.5);
  REQUIRE_THROWS_AS(hermitian_sqrt(S), NotPositiveDefinite);
  REQUIRE_THROWS_AS(cholesky_upper(S), NotPositiveDefinite);
  REQUIRE_THROWS_AS(hermitian_inv_sqrt(S), NotPositiveDefinite);
  Matrix nearSingular = Matrix::Zero(2, 2);
  REQUIRE_THROWS_AS(polar_unitary(nearSingular), SingularV);
}

TEST_CASE("conjugation by the factor restores unitarity up to the gap") {
  const GroupPtr T = make_torus_group(1);
  const EvaluationMap em(build_grid(T, 14, perturbed(6)), 2);
  const GramData gd = averaged_gram(em);
  const UnitarizationData ud = unitarization(gd, BasisStrategy::cholesky);
  const Matrix pi = induced_representation(em, T->point(1.3)).matrix;
  const Matrix rho = unitarized_representation(ud, pi);
  // pi~ preserves the standard inner product exactly as much as S-invariance allows.
  const Matrix I = Matrix::Identity(rho.rows(), rho.cols());
  REQUIRE(operator_norm(rho.adjoint() * rho - I) < 1e-10);
}
