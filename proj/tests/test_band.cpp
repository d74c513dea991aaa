#include <catch2/catch_amalgamated.hpp>

#include "quasidiag/band_function.hpp"

using namespace qd;

namespace {

/// Independent convolution oracle: Haar quadrature of the defining integral
/// (f*k)(x) = int f(t) k(t^{-1} x) dt, exact for trig polynomials once the
/// lattice beats the combined degree.
cdouble convolution_oracle(const BandFunction& f, const BandFunction& k, const GroupElement& x) {
  const GroupPtr& G = f.group();
  const int m = 2 * (f.degree() + k.degree()) + 3;
  cdouble acc(0.0);
  if (G->dimension() == 1) {
    for (int t = 0; t < m; ++t) {
      const GroupElement g = G->point(two_pi * t / m);
      acc += f.evaluate(g) * k.evaluate(G->multiply(G->inverse(g), x));
    }
    return acc / static_cast<double>(m);
  }
  for (int t0 = 0; t0 < m; ++t0)
    for (int t1 = 0; t1 < m; ++t1) {
      const GroupElement g = G->point(two_pi * t0 / m, two_pi * t1 / m);
      acc += f.evaluate(g) * k.evaluate(G->multiply(G->inverse(g), x));
    }
  return acc / static_cast<double>(m * m);
}

BandFunction coeff_function(const GroupPtr& G, int degree,
                            const std::vector<std::pair<std::array<int, 2>, cdouble>>& cs) {
  BandFunction f = BandFunction::zero(G, degree);
  for (const auto& [j, c] : cs) f.mutable_coefficients()[f.offset(j)] = c;
  return f;
}

}  // namespace

TEST_CASE("coefficient convolution matches the quadrature double sum") {
  const GroupPtr T = make_torus_group(1);
  const BandFunction f = coeff_function(T, 3,
                                        {{{0, 0}, {0.7, 0.1}},
                                         {{1, 0}, {0.5, -0.3}},
                                         {{-2, 0}, {0.0, 0.25}},
                                         {{3, 0}, {-0.4, 0.0}}});
  const BandFunction k = coeff_function(T, 2,
                                        {{{0, 0}, {1.0, 0.0}},
                                         {{1, 0}, {0.5, 0.5}},
                                         {{-1, 0}, {0.5, -0.5}},
                                         {{2, 0}, {0.125, 0.0}}});
  const BandFunction conv = convolve(f, k);
  for (int s = 0; s < 11; ++s) {
    const GroupElement x = T->point(0.37 + two_pi * s / 11.0);
    REQUIRE(std::abs(conv.evaluate(x) - convolution_oracle(f, k, x)) < 1e-10);
  }
}

TEST_CASE("two-dimensional convolution matches the quadrature double sum") {
  const GroupPtr T2 = make_torus_group(2);
  const BandFunction f = coeff_function(T2, 1,
                                        {{{0, 0}, {1.0, 0.0}},
                                         {{1, -1}, {0.5, 0.25}},
                                         {{-1, 0}, {0.0, -0.5}}});
  const BandFunction k = coeff_function(T2, 1,
                                        {{{0, 0}, {1.0, 0.0}},
                                         {{0, 1}, {0.25, 0.0}},
                                         {{1, 1}, {0.0, 0.125}}});
  const BandFunction conv = convolve(f, k);
  const GroupElement x = T2->point(1.1, 2.3);
  REQUIRE(std::abs(conv.evaluate(x) - convolution_oracle(f, k, x)) < 1e-10);
}

TEST_CASE("finite-group convolution against the delta identity") {
  const GroupPtr G = make_cyclic_group(5);
  std::vector<cdouble> dv(5, cdouble(0.0));
  dv[0] = cdouble(5.0);  // |G| * indicator of the identity
  const BandFunction delta = BandFunction::from_values(G, dv);
  const BandFunction f = BandFunction::from_values(G, {{1, 0}, {0, 2}, {-1, 0}, {0.5, 0}, {0, -3}});
  const BandFunction conv = convolve(f, delta);
  for (int g = 0; g < 5; ++g) REQUIRE(std::abs(conv.value_at(g) - f.value_at(g)) < 1e-12);
}

TEST_CASE("squaring one plus cosine gives the known coefficients") {
  const GroupPtr T = make_torus_group(1);
  // 1 + cos(t) has coefficients {1/2, 1, 1/2} on {-1, 0, 1}.
  const BandFunction f = coeff_function(T, 1,
                                        {{{-1, 0}, {0.5, 0.0}},
                                         {{0, 0}, {1.0, 0.0}},
                                         {{1, 0}, {0.5, 0.0}}});
  const BandFunction sq = multiply_pointwise(f, f);
  REQUIRE(sq.degree() == 2);
  const double expected[5] = {0.25, 1.0, 1.5, 1.0, 0.25};
  for (int j = -2; j <= 2; ++j) {
    REQUIRE(sq.coefficient({j, 0}).real() == Catch::Approx(expected[j + 2]).margin(1e-14));
    REQUIRE(std::abs(sq.coefficient({j, 0}).imag()) < 1e-14);
  }
}

TEST_CASE("conjugation reflects and conjugates coefficients") {
  const GroupPtr T = make_torus_group(1);
  const BandFunction f = coeff_function(T, 2, {{{1, 0}, {0.5, 0.25}}, {{2, 0}, {0.0, -1.0}}});
  const BandFunction fb = f.conjugated();
  REQUIRE(fb.coefficient({-1, 0}) == cdouble(0.5, -0.25));
  REQUIRE(fb.coefficient({-2, 0}) == cdouble(0.0, 1.0));
  REQUIRE(fb.coefficient({1, 0}) == cdouble(0.0, 0.0));
  // Pointwise check.
  const GroupElement x = T->point(0.83);
  REQUIRE(std::abs(fb.evaluate(x) - std::conj(f.evaluate(x))) < 1e-14);
}

TEST_CASE("translation shifts function values") {
  const GroupPtr T = make_torus_group(1);
  const BandFunction f = coeff_function(T, 2, {{{1, 0}, {1.0, 0.0}}, {{-2, 0}, {0.0, 0.5}}});
  const GroupElement gamma = T->point(0.9);
  const BandFunction tf = translate(gamma, f);
  for (int s = 0; s < 7; ++s) {
    const GroupElement x = T->point(two_pi * s / 7.0);
    const GroupElement shifted = T->multiply(T->inverse(gamma), x);
    REQUIRE(std::abs(tf.evaluate(x) - f.evaluate(shifted)) < 1e-12);
  }

  const GroupPtr G = make_cyclic_group(4);
  const BandFunction h = BandFunction::from_values(G, {{1, 0}, {2, 0}, {3, 0}, {4, 0}});
  const BandFunction th = translate(G->element(1), h);
  for (int g = 0; g < 4; ++g) {
    const int src = G->table()[G->inverse(G->element(1)).index][g];
    REQUIRE(th.value_at(g) == h.value_at(src));
  }
}

TEST_CASE("sup norm, inner product, and integral agree with closed forms") {
  const GroupPtr T = make_torus_group(1);
  const BandFunction e1 = BandFunction::exponential(T, {1, 0});
  REQUIRE(sup_norm(e1) == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(std::abs(integral(e1)) < 1e-15);
  REQUIRE(l2_inner(e1, e1).real() == Catch::Approx(1.0).margin(1e-15));

  const BandFunction c = BandFunction::constant(T, cdouble(2.0, 0.0));
  REQUIRE(sup_norm(c) == Catch::Approx(2.0).margin(1e-12));
  REQUIRE(integral(c).real() == Catch::Approx(2.0).margin(1e-15));
  REQUIRE(std::abs(l2_inner(e1, c)) < 1e-15);

  // Parseval against quadrature for a mixed function.
  const BandFunction f = coeff_function(T, 2, {{{0, 0}, {1.0, 0.0}}, {{2, 0}, {0.0, 0.5}}});
  const QuadratureScheme q = haar_quadrature(*T, 11);
  cdouble acc(0.0);
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const cdouble v = f.evaluate(q.nodes[i]);
    acc += q.weights[i] * v * std::conj(v);
  }
  REQUIRE(std::abs(acc - l2_inner(f, f)) < 1e-12);
}

TEST_CASE("band projection truncates and is idempotent") {
  const GroupPtr T = make_torus_group(1);
  const BandFunction f = coeff_function(T, 3,
                                        {{{0, 0}, {1.0, 0.0}},
                                         {{2, 0}, {0.5, 0.0}},
                                         {{3, 0}, {0.25, 0.0}}});
  const BandFunction p = band_project(f, 2);
  REQUIRE(p.degree() == 2);
  REQUIRE(p.coefficient({2, 0}) == cdouble(0.5, 0.0));
  REQUIRE(p.coefficient({3, 0}) == cdouble(0.0, 0.0));  // outside the band now
  const BandFunction pp = band_project(p, 2);
  for (int j = -2; j <= 2; ++j) REQUIRE(pp.coefficient({j, 0}) == p.coefficient({j, 0}));
}

TEST_CASE("arithmetic embeds into the union band") {
  const GroupPtr T = make_torus_group(1);
  const BandFunction a = BandFunction::exponential(T, {1, 0});
  const BandFunction b = BandFunction::exponential(T, {3, 0});
  const BandFunction s = a + b;
  REQUIRE(s.degree() == 3);
  REQUIRE(s.coefficient({1, 0}) == cdouble(1.0, 0.0));
  REQUIRE(s.coefficient({3, 0}) == cdouble(1.0, 0.0));
  const BandFunction d = s - a;
  REQUIRE(std::abs(d.coefficient({1, 0})) < 1e-15);
  REQUIRE(d.coefficient({3, 0}) == cdouble(1.0, 0.0));
}
