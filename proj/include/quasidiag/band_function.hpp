#pragma once

//
// Module      : band_function
// Description : band-limited functions on a compact group model and the
//               C(G) operations the pipeline needs (convolution, translation,
//               pointwise product, band projection, norms)
//

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "quasidiag/group.hpp"

namespace qd {

/// Band-limited function.
///
/// Torus: coefficients c_j over the frequency box {-n..n}^d, stored row-major
/// with the first coordinate outer, f(t) = sum_j c_j e^{i j.t}.
/// Finite group: coefficients are the values of f on the elements (the group
/// algebra in the basis of indicator functions); the band is always "full".
class BandFunction {
 public:
  BandFunction() = default;

  static BandFunction zero(GroupPtr G, int degree) {
    BandFunction f;
    f.group_ = std::move(G);
    if (f.group_->is_finite()) {
      f.degree_ = 0;
      f.coeff_.assign(f.group_->order(), cdouble(0.0));
    } else {
      if (degree < 0) throw ValidationError("band", "negative degree");
      f.degree_ = degree;
      f.coeff_.assign(box_size(degree, f.group_->dimension()), cdouble(0.0));
    }
    return f;
  }

  static BandFunction constant(GroupPtr G, cdouble value) {
    if (G->is_finite()) {
      BandFunction f = zero(std::move(G), 0);
      std::fill(f.coeff_.begin(), f.coeff_.end(), value);
      return f;
    }
    BandFunction f = zero(std::move(G), 0);
    f.coeff_[0] = value;
    return f;
  }

  /// Torus character e^{i j.t}.
  static BandFunction exponential(GroupPtr G, std::array<int, 2> freq) {
    if (G->is_finite()) throw ValidationError("functions", "exponential requires a torus group");
    const int n = std::max(std::abs(freq[0]), std::abs(freq[1]));
    BandFunction f = zero(std::move(G), n);
    f.coeff_[f.offset(freq)] = cdouble(1.0);
    return f;
  }

  static BandFunction from_values(GroupPtr G, std::vector<cdouble> values) {
    if (!G->is_finite()) throw ValidationError("functions", "value lists require a finite group");
    if (static_cast<int>(values.size()) != G->order())
      throw ValidationError("functions", "value list length differs from group order");
    BandFunction f;
    f.group_ = std::move(G);
    f.degree_ = 0;
    f.coeff_ = std::move(values);
    return f;
  }

  static BandFunction from_coefficients(GroupPtr G, int degree, std::vector<cdouble> coeff) {
    if (G->is_finite()) throw ValidationError("functions", "coefficient lists require a torus group");
    if (coeff.size() != box_size(degree, G->dimension()))
      throw ValidationError("functions", "coefficient count does not match the band");
    BandFunction f;
    f.group_ = std::move(G);
    f.degree_ = degree;
    f.coeff_ = std::move(coeff);
    return f;
  }

  const GroupPtr& group() const { return group_; }
  int degree() const { return degree_; }
  const std::vector<cdouble>& coefficients() const { return coeff_; }
  std::vector<cdouble>& mutable_coefficients() { return coeff_; }

  /// Coefficient at frequency j; zero outside the stored band.
  cdouble coefficient(std::array<int, 2> j) const {
    if (group_->is_finite()) throw std::logic_error("coefficient lookup on a finite-group function");
    if (std::abs(j[0]) > degree_ || std::abs(j[1]) > degree_) return cdouble(0.0);
    return coeff_[offset(j)];
  }

  cdouble value_at(int element_index) const { return coeff_[element_index]; }

  cdouble evaluate(const GroupElement& g) const {
    if (group_->is_finite()) return coeff_[g.index];
    const int n = degree_, d = group_->dimension();
    cdouble acc(0.0);
    if (d == 1) {
      for (int j = -n; j <= n; ++j)
        acc += coeff_[j + n] * std::polar(1.0, j * g.angles[0]);
    } else {
      std::size_t idx = 0;
      for (int j0 = -n; j0 <= n; ++j0)
        for (int j1 = -n; j1 <= n; ++j1, ++idx)
          acc += coeff_[idx] * std::polar(1.0, j0 * g.angles[0] + j1 * g.angles[1]);
    }
    return acc;
  }

  /// Pointwise complex conjugate (the involution of C(G)).
  BandFunction conjugated() const {
    BandFunction out = *this;
    if (group_->is_finite()) {
      for (auto& v : out.coeff_) v = std::conj(v);
      return out;
    }
    const int n = degree_, d = group_->dimension();
    if (d == 1) {
      for (int j = -n; j <= n; ++j) out.coeff_[j + n] = std::conj(coeff_[n - j]);
    } else {
      for (int j0 = -n; j0 <= n; ++j0)
        for (int j1 = -n; j1 <= n; ++j1)
          out.coeff_[out.offset({j0, j1})] = std::conj(coeff_[offset({-j0, -j1})]);
    }
    return out;
  }

  BandFunction operator*(cdouble s) const {
    BandFunction out = *this;
    for (auto& c : out.coeff_) c *= s;
    return out;
  }

  BandFunction operator+(const BandFunction& o) const { return combined(o, cdouble(1.0)); }
  BandFunction operator-(const BandFunction& o) const { return combined(o, cdouble(-1.0)); }

  std::size_t offset(std::array<int, 2> j) const {
    const int n = degree_;
    if (group_->dimension() == 1) return static_cast<std::size_t>(j[0] + n);
    return static_cast<std::size_t>(j[0] + n) * (2 * n + 1) + static_cast<std::size_t>(j[1] + n);
  }

  static std::size_t box_size(int degree, int dims) {
    std::size_t w = static_cast<std::size_t>(2 * degree + 1);
    return dims == 1 ? w : w * w;
  }

 private:
  BandFunction combined(const BandFunction& o, cdouble sign) const {
    if (!group_->same_as(*o.group_)) throw std::logic_error("band arithmetic across different groups");
    if (group_->is_finite()) {
      BandFunction out = *this;
      for (std::size_t i = 0; i < out.coeff_.size(); ++i) out.coeff_[i] += sign * o.coeff_[i];
      return out;
    }
    const int n = std::max(degree_, o.degree_);
    BandFunction out = zero(group_, n);
    const int d = group_->dimension();
    const int n1max = d == 2 ? n : 0;
    for (int j0 = -n; j0 <= n; ++j0)
      for (int j1 = -n1max; j1 <= n1max; ++j1)
        out.coeff_[out.offset({j0, j1})] = coefficient({j0, j1}) + sign * o.coefficient({j0, j1});
    return out;
  }

  GroupPtr group_;
  int degree_ = 0;
  std::vector<cdouble> coeff_;
};

inline BandFunction operator*(cdouble s, const BandFunction& f) { return f * s; }

/// Convolution f*k against Haar measure. Torus: exact in coefficient space
/// ((f*k)^(j) = f^(j) k^(j)), result band is the intersection of the bands.
/// Finite group: the exact Haar sum (f*k)(g) = (1/|G|) sum_h f(h) k(h^{-1}g).
inline BandFunction convolve(const BandFunction& f, const BandFunction& k) {
  const GroupPtr& G = f.group();
  if (!G->same_as(*k.group())) throw std::logic_error("convolve across different groups");
  if (G->is_finite()) {
    const int m = G->order();
    BandFunction out = BandFunction::zero(G, 0);
    for (int g = 0; g < m; ++g) {
      cdouble acc(0.0);
      for (int h = 0; h < m; ++h) {
        const int hg = G->table()[G->inverse(G->element(h)).index][g];
        acc += f.value_at(h) * k.value_at(hg);
      }
      out.mutable_coefficients()[g] = acc / static_cast<double>(m);
    }
    return out;
  }
  const int n = std::min(f.degree(), k.degree());
  BandFunction out = BandFunction::zero(G, n);
  const int d = G->dimension();
  const int n1max = d == 2 ? n : 0;
  for (int j0 = -n; j0 <= n; ++j0)
    for (int j1 = -n1max; j1 <= n1max; ++j1)
      out.mutable_coefficients()[out.offset({j0, j1})] =
          f.coefficient({j0, j1}) * k.coefficient({j0, j1});
  return out;
}

/// Left translation (lambda_gamma f)(g) = f(gamma^{-1} g).
inline BandFunction translate(const GroupElement& gamma, const BandFunction& f) {
  const GroupPtr& G = f.group();
  if (G->is_finite()) {
    const int m = G->order();
    const GroupElement gi = G->inverse(gamma);
    BandFunction out = BandFunction::zero(G, 0);
    for (int g = 0; g < m; ++g)
      out.mutable_coefficients()[g] = f.value_at(G->table()[gi.index][g]);
    return out;
  }
  BandFunction out = f;
  const int n = f.degree(), d = G->dimension();
  const int n1max = d == 2 ? n : 0;
  for (int j0 = -n; j0 <= n; ++j0)
    for (int j1 = -n1max; j1 <= n1max; ++j1)
      out.mutable_coefficients()[out.offset({j0, j1})] =
          f.coefficient({j0, j1}) * std::polar(1.0, -(j0 * gamma.angles[0] + j1 * gamma.angles[1]));
  return out;
}

/// Pointwise product. Torus bands add (Minkowski sum of boxes).
inline BandFunction multiply_pointwise(const BandFunction& f, const BandFunction& g) {
  const GroupPtr& G = f.group();
  if (!G->same_as(*g.group())) throw std::logic_error("product across different groups");
  if (G->is_finite()) {
    BandFunction out = f;
    for (int i = 0; i < G->order(); ++i) out.mutable_coefficients()[i] *= g.value_at(i);
    return out;
  }
  const int n = f.degree() + g.degree(), d = G->dimension();
  BandFunction out = BandFunction::zero(G, n);
  const int pf = f.degree(), pg = g.degree();
  const int pf1 = d == 2 ? pf : 0, pg1 = d == 2 ? pg : 0;
  for (int a0 = -pf; a0 <= pf; ++a0)
    for (int a1 = -pf1; a1 <= pf1; ++a1) {
      const cdouble ca = f.coefficient({a0, a1});
      if (ca == cdouble(0.0)) continue;
      for (int b0 = -pg; b0 <= pg; ++b0)
        for (int b1 = -pg1; b1 <= pg1; ++b1)
          out.mutable_coefficients()[out.offset({a0 + b0, a1 + b1})] +=
              ca * g.coefficient({b0, b1});
    }
  return out;
}

/// Orthogonal projection onto the frequency box {-degree..degree}^d
/// (self-adjoint for the L^2 inner product). Identity on finite groups,
/// whose band is the full group algebra.
inline BandFunction band_project(const BandFunction& f, int degree) {
  const GroupPtr& G = f.group();
  if (G->is_finite()) return f;
  BandFunction out = BandFunction::zero(G, degree);
  const int n = std::min(degree, f.degree());
  const int d = G->dimension();
  const int n1max = d == 2 ? n : 0;
  for (int j0 = -n; j0 <= n; ++j0)
    for (int j1 = -n1max; j1 <= n1max; ++j1)
      out.mutable_coefficients()[out.offset({j0, j1})] = f.coefficient({j0, j1});
  return out;
}

/// Sup norm, measured on the oversampled lattice with
/// oversample*(degree+1) points per dimension (exact for finite groups).
inline double sup_norm(const BandFunction& f, int oversample = 16) {
  if (oversample < 4) throw std::invalid_argument("sup_norm oversample must be at least 4");
  const GroupPtr& G = f.group();
  double best = 0.0;
  if (G->is_finite()) {
    for (int g = 0; g < G->order(); ++g) best = std::max(best, std::abs(f.value_at(g)));
    return best;
  }
  const int L = oversample * (f.degree() + 1);
  if (G->dimension() == 1) {
    for (int j = 0; j < L; ++j)
      best = std::max(best, std::abs(f.evaluate(G->point(two_pi * j / L))));
  } else {
    for (int j0 = 0; j0 < L; ++j0)
      for (int j1 = 0; j1 < L; ++j1)
        best = std::max(best, std::abs(f.evaluate(G->point(two_pi * j0 / L, two_pi * j1 / L))));
  }
  return best;
}

/// L^2(Haar) inner product, linear in the first argument. Exact: Parseval
/// sum over the shared band (torus) or the uniform average (finite).
inline cdouble l2_inner(const BandFunction& f, const BandFunction& g) {
  const GroupPtr& G = f.group();
  if (!G->same_as(*g.group())) throw std::logic_error("inner product across different groups");
  cdouble acc(0.0);
  if (G->is_finite()) {
    for (int i = 0; i < G->order(); ++i) acc += f.value_at(i) * std::conj(g.value_at(i));
    return acc / static_cast<double>(G->order());
  }
  const int n = std::min(f.degree(), g.degree());
  const int d = G->dimension();
  const int n1max = d == 2 ? n : 0;
  for (int j0 = -n; j0 <= n; ++j0)
    for (int j1 = -n1max; j1 <= n1max; ++j1)
      acc += f.coefficient({j0, j1}) * std::conj(g.coefficient({j0, j1}));
  return acc;
}

/// Haar integral (mean value).
inline cdouble integral(const BandFunction& f) {
  if (f.group()->is_finite()) {
    cdouble acc(0.0);
    for (int i = 0; i < f.group()->order(); ++i) acc += f.value_at(i);
    return acc / static_cast<double>(f.group()->order());
  }
  return f.coefficient({0, 0});
}

}  // namespace qd
