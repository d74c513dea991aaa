#pragma once

//
// Module      : ucp
// Description : the finite-dimensional u.c.p. maps f |-> U diag(psi(f*k)) U*
//               and the quantitative certificate for their multiplicativity,
//               equivariance, and norm defects
//

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "quasidiag/band_function.hpp"
#include "quasidiag/errors.hpp"
#include "quasidiag/grid.hpp"
#include "quasidiag/group.hpp"
#include "quasidiag/kernel.hpp"
#include "quasidiag/linalg.hpp"
#include "quasidiag/unitarize.hpp"

namespace qd {

/// The assembled pipeline for one (kernel, grid, strategy) choice.
class UcpMap {
 public:
  UcpMap(GroupPtr G, Kernel kernel, EvaluationMap em, GramData gram, UnitarizationData ud)
      : group_(std::move(G)),
        kernel_(std::move(kernel)),
        em_(std::move(em)),
        gram_(std::move(gram)),
        ud_(std::move(ud)) {
    v_inv_ = ud_.V.inverse();
    u_v_ = ud_.U.adjoint() * ud_.V;
    vi_u_ = v_inv_ * ud_.U;
  }

  const GroupPtr& group() const { return group_; }
  const Kernel& kernel() const { return kernel_; }
  const EvaluationMap& em() const { return em_; }
  const GramData& gram() const { return gram_; }
  const UnitarizationData& ud() const { return ud_; }
  Eigen::Index dimension() const { return ud_.U.rows(); }

  /// diag of the samples of f*k, the multiplication operator on C^E.
  Matrix multiplier(const BandFunction& f) const {
    return diag_of(em_.samples(convolve(f, kernel_.k)));
  }

  /// Psi(f) = U diag(psi(f*k)) U^*.
  Matrix assemble(const BandFunction& f) const {
    return ud_.U * multiplier(f) * ud_.U.adjoint();
  }

  /// The group acting next to the diagonal multipliers: the unitarized
  /// representation carried back through the polar unitary,
  /// rho(gamma) = U^† V pi(gamma) V^{-1} U. Its exact inverse is rho(gamma^{-1}).
  Matrix rho(const GroupElement& gamma) const {
    return u_v_ * induced_representation(em_, gamma).matrix * vi_u_;
  }

  double defect_mult(const BandFunction& f, const BandFunction& g) const {
    const Matrix lhs = assemble(multiply_pointwise(f, g));
    return operator_norm(lhs - assemble(f) * assemble(g));
  }

  double defect_norm(const BandFunction& f, int oversample = 16) const {
    return std::abs(operator_norm(assemble(f)) - sup_norm(f, oversample));
  }

  /// Equivariance defect for one gamma, compressed to the evaluated band:
  /// with D = diag psi(f*k), D' = diag psi(lambda_gamma(f*k)) and B the
  /// orthonormal frame of psi(W), this is ||B^† (D' - rho D rho^{-1}) B||.
  /// The comparison is restricted to psi(W) because off that subspace the
  /// representation is extended as the identity while multiplication
  /// operators are not, so the full-space difference carries an O(1)
  /// grid-aliasing term that says nothing about the action on W.
  double defect_equiv_at(const BandFunction& f, const GroupElement& gamma) const {
    return defect_equiv_with(f, gamma, rho(gamma), rho(group_->inverse(gamma)));
  }

  double defect_equiv(const BandFunction& f, const std::vector<GroupElement>& gammas) const {
    double worst = 0.0;
    for (const auto& g : gammas) worst = std::max(worst, defect_equiv_at(f, g));
    return worst;
  }

  /// Worst defect over a family and a gamma sample, computing each rho pair
  /// once (rho does not depend on f, and it dominates the cost).
  double defect_equiv_max(const std::vector<BandFunction>& fs,
                          const std::vector<GroupElement>& gammas) const {
    double worst = 0.0;
    for (const auto& g : gammas) {
      const Matrix r = rho(g);
      const Matrix r_inv = rho(group_->inverse(g));
      for (const auto& f : fs) worst = std::max(worst, defect_equiv_with(f, g, r, r_inv));
    }
    return worst;
  }

  /// Most negative eigenvalue of Psi(conj(f) f) over the probes; structurally
  /// this is a unitary conjugate of a non-negative diagonal, so anything
  /// materially below zero flags broken numerics.
  double positivity_probe(const std::vector<BandFunction>& probes) const {
    double worst = 0.0;
    for (const auto& f : probes) {
      const Matrix P = assemble(multiply_pointwise(f.conjugated(), f));
      worst = std::min(worst, min_eigenvalue_hermitian(P));
    }
    return worst;
  }

  double unitality_defect() const {
    const Matrix I = Matrix::Identity(dimension(), dimension());
    return operator_norm(assemble(BandFunction::constant(group_, cdouble(1.0))) - I);
  }

  double star_defect(const BandFunction& f) const {
    return operator_norm(assemble(f.conjugated()) - assemble(f).adjoint());
  }

 private:
  double defect_equiv_with(const BandFunction& f, const GroupElement& gamma, const Matrix& r,
                           const Matrix& r_inv) const {
    const BandFunction h = convolve(f, kernel_.k);
    const auto d_vals = em_.samples(h);
    const auto dp_vals = em_.samples(translate(gamma, h));
    const Eigen::Map<const Vector> d(d_vals.data(), static_cast<Eigen::Index>(d_vals.size()));
    Matrix X = -((r * d.asDiagonal()) * r_inv);
    for (std::size_t e = 0; e < dp_vals.size(); ++e) X(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(e)) += dp_vals[e];
    const Matrix& B = em_.frame();
    return operator_norm(B.adjoint() * X * B);
  }

  static Matrix diag_of(const std::vector<cdouble>& vals) {
    Matrix D = Matrix::Zero(static_cast<Eigen::Index>(vals.size()),
                            static_cast<Eigen::Index>(vals.size()));
    for (std::size_t e = 0; e < vals.size(); ++e)
      D(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(e)) = vals[e];
    return D;
  }

  GroupPtr group_;
  Kernel kernel_;
  EvaluationMap em_;
  GramData gram_;
  UnitarizationData ud_;
  Matrix v_inv_;
  Matrix u_v_;   // U^† V
  Matrix vi_u_;  // V^{-1} U
};

struct CertifyRequest {
  GroupPtr group;
  std::vector<BandFunction> family;  // F; normalized internally to sup <= 1
  double epsilon = 0.5;              // target for the grid acceptance loop
  Kernel kernel;
  int band = 0;  // evaluation band degree (torus); ignored for finite groups
  int grid_size = 0;  // starting grid size per dimension; 0 = smallest exact
  GridProfile grid_profile;
  bool grid_autorefine = true;  // false pins the grid at grid_size as given
  double tol_grid = 0.05;
  BasisStrategy strategy = BasisStrategy::cholesky;
  std::uint64_t seed = 42;
  int max_dim = 512;
  int gamma_random_samples = 64;
  std::string id;
};

struct UcpCertificate {
  std::string id;
  // measured quantities
  double eps_conv = 0.0;
  double eps_dist = 0.0;
  double vu_gap = 0.0;
  double eps_total = 0.0;
  double defect_mult = 0.0;
  double defect_equiv = 0.0;
  double defect_norm = 0.0;
  double deviation = 0.0;   // ||S - I||
  double sigma_min = 0.0;   // injectivity margin of the evaluation map
  double positivity = 0.0;  // most negative probe eigenvalue
  // bounds the measurements are held against
  double bound_mult = 0.0;   // 4 eps_total
  double bound_equiv = 0.0;  // eps_total + 2 eps_dist
  double bound_norm = 0.0;   // 3 eps_total + tol_grid
  double bound_vu = 0.0;     // 4 eps_dist
  bool pass = false;
  // provenance
  std::string kernel_kind;
  int kernel_degree = 0;
  double kernel_radius = 0.0;
  double kernel_band_error = 0.0;
  int band = 0;
  int grid_size = 0;
  int dim_e = 0;
  bool grid_perturbed = false;
  std::uint64_t grid_seed = 0;
  double grid_amplitude = 0.0;
  std::string strategy;
  std::uint64_t seed = 0;
  double tol_grid = 0.0;
  double epsilon_target = 0.0;
  int gamma_sample_count = 0;
  int family_size = 0;
  std::vector<double> normalization_factors;
  std::string equiv_caveat;
};

namespace detail {

inline std::vector<BandFunction> normalized_family(const std::vector<BandFunction>& F,
                                                   std::vector<double>& factors) {
  std::vector<BandFunction> out;
  out.reserve(F.size());
  factors.clear();
  for (const auto& f : F) {
    const double s = sup_norm(f);
    factors.push_back(s);
    out.push_back(s > 1.0 ? f * cdouble(1.0 / s) : f);
  }
  return out;
}

inline std::vector<BandFunction> with_products(const std::vector<BandFunction>& F) {
  std::vector<BandFunction> out = F;
  for (const auto& f : F)
    for (const auto& g : F) out.push_back(multiply_pointwise(f, g));
  return out;
}

inline std::vector<GroupElement> gamma_samples(const GroupPtr& G, const QuadratureScheme& quad,
                                               std::uint64_t seed, int extra) {
  std::vector<GroupElement> out = quad.nodes;
  DeterministicRng rng(seed);
  for (int i = 0; i < extra; ++i) {
    if (G->is_finite()) {
      out.push_back(G->element(static_cast<int>(rng.raw() % static_cast<std::uint64_t>(G->order()))));
    } else if (G->dimension() == 1) {
      out.push_back(G->point(two_pi * rng.unit()));
    } else {
      const double a = two_pi * rng.unit();
      out.push_back(G->point(a, two_pi * rng.unit()));
    }
  }
  return out;
}

}  // namespace detail

/// Certificate plus the assembled map, for callers that keep probing it.
struct CertifyResult {
  UcpCertificate certificate;
  std::shared_ptr<UcpMap> map;
  std::vector<BandFunction> family;        // normalized F
  std::vector<BandFunction> closed_family; // normalized F plus pairwise products
};

inline CertifyResult certify_detailed(const CertifyRequest& req) {
  const GroupPtr& G = req.group;
  if (!G) throw ValidationError("group", "certify needs a group");
  if (req.family.empty()) throw ValidationError("functions", "certify needs a nonempty family");
  if (req.epsilon <= 0.0 || req.epsilon >= 1.0)
    throw ValidationError("epsilon", "target must lie in (0,1)");

  std::vector<double> factors;
  const std::vector<BandFunction> F = detail::normalized_family(req.family, factors);
  const std::vector<BandFunction> F2 = detail::with_products(F);

  // Functions the grid must represent faithfully: the smoothed family and the
  // moduli squared entering the norm arguments.
  std::vector<BandFunction> smoothed;
  for (const auto& f : F2) smoothed.push_back(convolve(f, req.kernel.k));
  std::vector<BandFunction> preserve = smoothed;
  for (const auto& h : smoothed) preserve.push_back(multiply_pointwise(h.conjugated(), h));

  const int band = G->is_finite() ? 0 : req.band;

  // Grid acceptance loop: grow until the distortion fits inside the target
  // and the grid still sees the suprema of the test functions.
  int m = req.grid_size;
  if (m <= 0) m = G->is_finite() ? G->order() : 2 * band + 1;
  std::unique_ptr<EvaluationMap> em;
  SampleGrid grid;
  for (;;) {
    const int total = G->is_finite() ? G->order()
                                     : (G->dimension() == 2 ? m * m : m);
    if (total > req.max_dim) throw Unachievable();
    grid = build_grid(G, m, req.grid_profile);
    bool ok = true;
    try {
      em = std::make_unique<EvaluationMap>(grid, band);
    } catch (const GridTooCoarse&) {
      ok = false;
    }
    if (ok && req.grid_autorefine) {
      if (isometry_distortion(*em) > req.epsilon / 4.0) ok = false;
      if (ok)
        for (const auto& h : preserve)
          if (sup_preservation_deficit(grid, h) > req.tol_grid) {
            ok = false;
            break;
          }
    }
    if (ok || (!req.grid_autorefine && em)) break;
    if (!req.grid_autorefine) throw GridTooCoarse();
    m *= 2;
  }

  const GramData gram = averaged_gram(*em);
  const UnitarizationData ud = unitarization(gram, req.strategy);
  auto map = std::make_shared<UcpMap>(G, req.kernel, *em, gram, ud);

  UcpCertificate c;
  c.id = req.id;
  c.eps_conv = kernel_defect(req.kernel, F2);
  c.eps_dist = isometry_distortion(*em);
  c.vu_gap = ud.vu_gap;
  c.eps_total = std::max({c.eps_conv, c.eps_dist, c.vu_gap});
  c.deviation = gram.deviation;
  c.sigma_min = em->sigma_min();

  for (const auto& f : F)
    for (const auto& g : F) c.defect_mult = std::max(c.defect_mult, map->defect_mult(f, g));
  const auto gammas = detail::gamma_samples(G, gram.quadrature, req.seed, req.gamma_random_samples);
  c.defect_equiv = map->defect_equiv_max(F2, gammas);
  for (const auto& f : F2) c.defect_norm = std::max(c.defect_norm, map->defect_norm(f));
  c.positivity = map->positivity_probe(F2);

  c.bound_mult = 4.0 * c.eps_total;
  c.bound_equiv = c.eps_total + 2.0 * c.eps_dist;
  c.bound_norm = 3.0 * c.eps_total + req.tol_grid;
  c.bound_vu = 4.0 * c.eps_dist;
  const double slack = 1e-12;
  c.pass = c.defect_mult <= c.bound_mult + slack && c.defect_equiv <= c.bound_equiv + slack &&
           c.defect_norm <= c.bound_norm + slack && c.vu_gap <= c.bound_vu + slack;

  c.kernel_kind = req.kernel.kind;
  c.kernel_degree = req.kernel.degree;
  c.kernel_radius = req.kernel.radius;
  c.kernel_band_error = req.kernel.band_error;
  c.band = band;
  c.grid_size = m;
  c.dim_e = static_cast<int>(grid.points.size());
  c.grid_perturbed = req.grid_profile.perturbed;
  c.grid_seed = req.grid_profile.seed;
  c.grid_amplitude = req.grid_profile.amplitude;
  c.strategy = strategy_name(req.strategy);
  c.seed = req.seed;
  c.tol_grid = req.tol_grid;
  c.epsilon_target = req.epsilon;
  c.gamma_sample_count = static_cast<int>(gammas.size());
  c.family_size = static_cast<int>(F.size());
  c.normalization_factors = std::move(factors);
  c.equiv_caveat =
      "equivariance measured on sampled group elements (averaging nodes plus seeded draws), "
      "not proven for all of G";

  CertifyResult out;
  out.certificate = std::move(c);
  out.map = std::move(map);
  out.family = F;
  out.closed_family = F2;
  return out;
}

inline UcpCertificate certify(const CertifyRequest& req) {
  return certify_detailed(req).certificate;
}

}  // namespace qd
