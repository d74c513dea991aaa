#pragma once

//
// Module      : grid
// Description : sample grids with partition weights, the evaluation map
//               psi: W -> C^E in weighted coordinates, its orthonormal frame,
//               and the induced representation extended trivially off psi(W)
//

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "quasidiag/band_function.hpp"
#include "quasidiag/errors.hpp"
#include "quasidiag/group.hpp"
#include "quasidiag/linalg.hpp"

namespace qd {

/// Seeded RNG with an explicit engine and bit-to-double mapping, so grid
/// jitter is reproducible across standard libraries.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : eng_(seed) {}
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }  // [0,1)
  double symmetric() { return 2.0 * unit() - 1.0; }                        // [-1,1)
  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

struct GridProfile {
  bool perturbed = false;
  std::uint64_t seed = 0;
  double amplitude = 0.0;  // jitter as a fraction of the lattice spacing, <= 0.25
};

/// Finite sample set E with partition weights mu(P_e) > 0 summing to 1.
struct SampleGrid {
  GroupPtr group;
  std::vector<GroupElement> points;
  std::vector<double> weights;
  int size_per_dim = 0;
  GridProfile profile;
};

namespace detail {

/// Jittered circle lattice: points stay strictly ordered because the jitter
/// is capped at a quarter spacing; weights are the midpoint arcs.
inline void jittered_axis(int m, const GridProfile& p, DeterministicRng& rng,
                          std::vector<double>& angles, std::vector<double>& weights) {
  const double spacing = two_pi / m;
  angles.resize(m);
  for (int t = 0; t < m; ++t) {
    double jitter = p.perturbed ? p.amplitude * spacing * rng.symmetric() : 0.0;
    angles[t] = spacing * t + jitter;
  }
  weights.assign(m, 1.0 / m);
  if (!p.perturbed) return;
  for (int t = 0; t < m; ++t) {
    const double next = t + 1 < m ? angles[t + 1] : angles[0] + two_pi;
    const double prev = t > 0 ? angles[t - 1] : angles[m - 1] - two_pi;
    weights[t] = (next - prev) / 2.0 / two_pi;
  }
}

}  // namespace detail

/// Uniform or jittered grid. Finite groups always get the full group with
/// uniform weights — that grid already reproduces L^2(G) exactly.
inline SampleGrid build_grid(const GroupPtr& G, int size, const GridProfile& profile = {}) {
  SampleGrid grid;
  grid.group = G;
  grid.profile = profile;
  if (G->is_finite()) {
    const int m = G->order();
    grid.size_per_dim = m;
    grid.points.reserve(m);
    for (int i = 0; i < m; ++i) grid.points.push_back(G->element(i));
    grid.weights.assign(m, 1.0 / m);
    return grid;
  }
  if (size < 1) throw ValidationError("grid.size", "grid size must be at least 1");
  if (profile.amplitude < 0.0 || profile.amplitude > 0.25)
    throw ValidationError("grid.amplitude", "jitter amplitude must lie in [0, 0.25] of spacing");
  grid.size_per_dim = size;
  DeterministicRng rng(profile.seed);
  std::vector<double> a0, w0;
  detail::jittered_axis(size, profile, rng, a0, w0);
  if (G->dimension() == 1) {
    for (int t = 0; t < size; ++t) grid.points.push_back(G->point(a0[t]));
    grid.weights = w0;
    return grid;
  }
  std::vector<double> a1, w1;
  detail::jittered_axis(size, profile, rng, a1, w1);
  for (int t0 = 0; t0 < size; ++t0)
    for (int t1 = 0; t1 < size; ++t1) {
      grid.points.push_back(G->point(a0[t0], a1[t1]));
      grid.weights.push_back(w0[t0] * w1[t1]);
    }
  return grid;
}

/// Weighted inner product sum_e v(e) conj(w(e)) mu(P_e). Deliberately a plain
/// indexed loop in grid order: summation order is part of the contract.
inline cdouble grid_inner(const SampleGrid& grid, const std::vector<cdouble>& v,
                          const std::vector<cdouble>& w) {
  if (v.size() != grid.points.size() || w.size() != grid.points.size())
    throw std::invalid_argument("grid_inner length mismatch");
  cdouble acc(0.0);
  for (std::size_t i = 0; i < v.size(); ++i) acc += v[i] * std::conj(w[i]) * grid.weights[i];
  return acc;
}

/// The evaluation map of a band W into C^E, carried in weighted coordinates
/// (columns scaled by sqrt of the weights) so the grid inner product is the
/// standard one and multiplication operators stay diagonal.
class EvaluationMap {
 public:
  EvaluationMap(const SampleGrid& grid, int band_degree) : grid_(grid), band_(band_degree) {
    const GroupPtr& G = grid.group;
    const std::size_t E = grid.points.size();
    if (G->is_finite()) {
      dim_w_ = G->order();
      band_ = 0;
    } else {
      frequencies_.clear();
      const int n = band_degree;
      const int n1max = G->dimension() == 2 ? n : 0;
      for (int j0 = -n; j0 <= n; ++j0)
        for (int j1 = -n1max; j1 <= n1max; ++j1) frequencies_.push_back({j0, j1});
      dim_w_ = static_cast<int>(frequencies_.size());
    }
    if (static_cast<int>(E) < dim_w_) throw GridTooCoarse();

    psi_.resize(static_cast<Eigen::Index>(E), dim_w_);
    for (std::size_t e = 0; e < E; ++e)
      for (int j = 0; j < dim_w_; ++j) psi_(static_cast<Eigen::Index>(e), j) = basis_value(j, grid.points[e]);
    psi_w_ = psi_;
    for (std::size_t e = 0; e < E; ++e)
      psi_w_.row(static_cast<Eigen::Index>(e)) *= std::sqrt(grid.weights[e]);

    gram_ = psi_w_.adjoint() * psi_w_;
    const double min_eig = min_eigenvalue_hermitian(gram_);
    sigma_min_ = min_eig <= 0.0 ? 0.0 : std::sqrt(min_eig);
    if (sigma_min_ <= 1e-8) throw GridTooCoarse();
    gram_inv_ = gram_.inverse();
    ortho_ = psi_w_ * hermitian_inv_sqrt(gram_);
    proj_ = ortho_ * ortho_.adjoint();
  }

  const SampleGrid& grid() const { return grid_; }
  int band_degree() const { return band_; }
  int dim_w() const { return dim_w_; }
  double sigma_min() const { return sigma_min_; }
  const Matrix& raw_matrix() const { return psi_; }
  const Matrix& weighted_matrix() const { return psi_w_; }
  const Matrix& gram() const { return gram_; }
  const Matrix& gram_inverse() const { return gram_inv_; }
  const Matrix& frame() const { return ortho_; }
  const Matrix& projector() const { return proj_; }

  /// Basis function j evaluated at a point: exponential (torus, frequency
  /// order matches BandFunction storage) or sqrt(|G|) * indicator (finite).
  cdouble basis_value(int j, const GroupElement& x) const {
    const GroupPtr& G = grid_.group;
    if (G->is_finite())
      return x.index == j ? cdouble(std::sqrt(static_cast<double>(G->order()))) : cdouble(0.0);
    const auto& f = frequencies_[j];
    return std::polar(1.0, f[0] * x.angles[0] + f[1] * x.angles[1]);
  }

  /// Coefficients of f in the map's orthonormal basis of W.
  Vector basis_coefficients(const BandFunction& f) const {
    const GroupPtr& G = grid_.group;
    Vector c(dim_w_);
    if (G->is_finite()) {
      const double s = std::sqrt(static_cast<double>(G->order()));
      for (int x = 0; x < dim_w_; ++x) c(x) = f.value_at(x) / s;
      return c;
    }
    if (f.degree() > band_) throw std::logic_error("function exceeds the evaluation band");
    for (int j = 0; j < dim_w_; ++j) c(j) = f.coefficient(frequencies_[j]);
    return c;
  }

  /// lambda_gamma in basis coordinates: diagonal phases on torus characters,
  /// a permutation of the indicator basis on finite groups.
  Matrix basis_rep(const GroupElement& gamma) const {
    const GroupPtr& G = grid_.group;
    Matrix L = Matrix::Zero(dim_w_, dim_w_);
    if (G->is_finite()) {
      for (int x = 0; x < dim_w_; ++x) {
        const int gx = G->table()[gamma.index][x];
        L(gx, x) = cdouble(1.0);
      }
      return L;
    }
    for (int j = 0; j < dim_w_; ++j) {
      const auto& f = frequencies_[j];
      L(j, j) = std::polar(1.0, -(f[0] * gamma.angles[0] + f[1] * gamma.angles[1]));
    }
    return L;
  }

  /// Pointwise samples of f over E (unweighted values).
  std::vector<cdouble> samples(const BandFunction& f) const {
    std::vector<cdouble> v(grid_.points.size());
    for (std::size_t e = 0; e < v.size(); ++e) v[e] = f.evaluate(grid_.points[e]);
    return v;
  }

  /// Samples carried to weighted coordinates.
  Vector weighted_samples(const BandFunction& f) const {
    Vector v(static_cast<Eigen::Index>(grid_.points.size()));
    for (std::size_t e = 0; e < grid_.points.size(); ++e)
      v(static_cast<Eigen::Index>(e)) = f.evaluate(grid_.points[e]) * std::sqrt(grid_.weights[e]);
    return v;
  }

 private:
  SampleGrid grid_;
  int band_ = 0;
  int dim_w_ = 0;
  std::vector<std::array<int, 2>> frequencies_;
  Matrix psi_, psi_w_, gram_, gram_inv_, ortho_, proj_;
  double sigma_min_ = 0.0;
};

inline EvaluationMap evaluation_map(const SampleGrid& grid, int band_degree) {
  return EvaluationMap(grid, band_degree);
}

/// epsilon_dist: 4 dim(W) max |Gram - I|, an upper bound for the inner-product
/// distortion over the radius-2 ball of W by bilinear expansion.
inline double isometry_distortion(const EvaluationMap& em) {
  const Matrix dev = em.gram() - Matrix::Identity(em.dim_w(), em.dim_w());
  return 4.0 * em.dim_w() * dev.cwiseAbs().maxCoeff();
}

struct InducedRep {
  GroupElement gamma;
  Matrix matrix;       // pi(gamma) on C^E in weighted coordinates
  double distortion;   // epsilon_dist of the underlying map
};

/// pi(gamma) = psi lambda_gamma psi^{-1} on psi(W), identity on the
/// orthogonal complement.
inline InducedRep induced_representation(const EvaluationMap& em, const GroupElement& gamma) {
  const Eigen::Index E = em.weighted_matrix().rows();
  InducedRep rep;
  rep.gamma = gamma;
  rep.matrix = em.weighted_matrix() * em.basis_rep(gamma) * em.gram_inverse() *
                   em.weighted_matrix().adjoint() +
               (Matrix::Identity(E, E) - em.projector());
  rep.distortion = isometry_distortion(em);
  return rep;
}

/// How much of the sup norm the grid sees: sup_norm(f) - max_e |f(e)|,
/// relative to sup_norm(f). Zero when the grid preserves the sup exactly.
inline double sup_preservation_deficit(const SampleGrid& grid, const BandFunction& f,
                                       int oversample = 16) {
  const double sup = sup_norm(f, oversample);
  if (sup == 0.0) return 0.0;
  double seen = 0.0;
  for (const auto& p : grid.points) seen = std::max(seen, std::abs(f.evaluate(p)));
  return (sup - seen) / sup;
}

}  // namespace qd
