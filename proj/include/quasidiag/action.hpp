#pragma once

//
// Module      : action
// Description : isometric actions on compact metric spaces (torus rotations,
//               finite spaces), orbit closures and their pullbacks into the
//               translation machinery, delta-dense orbit covers, and the
//               combined block-diagonal certificate
//

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "quasidiag/band_function.hpp"
#include "quasidiag/errors.hpp"
#include "quasidiag/group.hpp"
#include "quasidiag/kernel.hpp"
#include "quasidiag/ucp.hpp"

namespace qd {

/// One rotation angle, kept symbolic: rationality cannot be decided from a
/// floating-point value, so the scenario declares it.
struct RotationComponent {
  bool rational = true;
  long p = 0;
  long q = 1;          // rotation by 2*pi*p/q, gcd-reduced at parse time
  double turns = 0.0;  // irrational case: rotation by 2*pi*turns
  double angle() const {
    return rational ? two_pi * static_cast<double>(p) / static_cast<double>(q) : two_pi * turns;
  }
};

struct ActionGenerator {
  std::vector<RotationComponent> rotation;  // torus actions: one entry per dimension
  std::vector<int> permutation;             // finite spaces
};

struct IsometricActionDescriptor {
  std::string kind;  // "torus_rotation" | "finite_space"
  int dimension = 1;
  bool declared_minimal = false;
  std::vector<ActionGenerator> generators;
  // finite spaces
  int space_size = 0;
  std::vector<std::vector<double>> metric;

  bool on_torus() const { return kind == "torus_rotation"; }
};

/// Distance on X: geodesic circle distance, max over axes for d = 2.
inline double space_distance(const IsometricActionDescriptor& a, std::array<double, 2> x,
                             std::array<double, 2> y) {
  double best = 0.0;
  for (int d = 0; d < a.dimension; ++d) {
    const double t = reduce_angle(x[d] - y[d]);
    best = std::max(best, std::min(t, two_pi - t));
  }
  return best;
}

/// A function on X: band form when X is a torus, a value table when finite.
struct SpaceFunction {
  BandFunction torus_form;       // lives on a torus group model of X
  std::vector<cdouble> values;   // finite X
  bool on_torus = false;

  static SpaceFunction torus(BandFunction f) {
    SpaceFunction s;
    s.torus_form = std::move(f);
    s.on_torus = true;
    return s;
  }
  static SpaceFunction finite(std::vector<cdouble> v) {
    SpaceFunction s;
    s.values = std::move(v);
    return s;
  }

  double sup() const {
    if (on_torus) return sup_norm(torus_form);
    double best = 0.0;
    for (const auto& v : values) best = std::max(best, std::abs(v));
    return best;
  }

  SpaceFunction scaled(double s) const {
    SpaceFunction out = *this;
    if (on_torus) {
      out.torus_form = torus_form * cdouble(s);
    } else {
      for (auto& v : out.values) v *= s;
    }
    return out;
  }
};

inline SpaceFunction space_product(const SpaceFunction& f, const SpaceFunction& g) {
  if (f.on_torus != g.on_torus) throw std::logic_error("space product across different spaces");
  if (f.on_torus) return SpaceFunction::torus(multiply_pointwise(f.torus_form, g.torus_form));
  std::vector<cdouble> v(f.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f.values[i] * g.values[i];
  return SpaceFunction::finite(std::move(v));
}

/// Lipschitz bound used for the restriction error: per-coefficient frequency
/// mass on the torus, the exact two-point constant on finite spaces.
inline double lipschitz_bound(const IsometricActionDescriptor& a, const SpaceFunction& f) {
  if (f.on_torus) {
    const int n = f.torus_form.degree();
    const int d = f.torus_form.group()->dimension();
    const int n1max = d == 2 ? n : 0;
    double acc = 0.0;
    for (int j0 = -n; j0 <= n; ++j0)
      for (int j1 = -n1max; j1 <= n1max; ++j1)
        acc += std::abs(f.torus_form.coefficient({j0, j1})) * (std::abs(j0) + std::abs(j1));
    return acc;
  }
  double best = 0.0;
  for (int x = 0; x < a.space_size; ++x)
    for (int y = 0; y < a.space_size; ++y)
      if (a.metric[x][y] > 0.0)
        best = std::max(best, std::abs(f.values[x] - f.values[y]) / a.metric[x][y]);
  return best;
}

namespace detail {

inline long gcd_long(long a, long b) { return std::gcd(a, b); }

inline std::vector<int> compose_perm(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out(a.size());
  for (std::size_t x = 0; x < a.size(); ++x) out[x] = a[b[x]];
  return out;
}

}  // namespace detail

inline void validate_action(const IsometricActionDescriptor& a) {
  if (a.kind != "torus_rotation" && a.kind != "finite_space")
    throw ValidationError("action.kind", "unknown action kind: " + a.kind);
  if (a.generators.empty()) throw ValidationError("action.rotate", "action needs a generator");
  if (a.on_torus()) {
    if (a.dimension != 1 && a.dimension != 2)
      throw ValidationError("action.dimension", "torus dimension must be 1 or 2");
    for (const auto& g : a.generators)
      if (static_cast<int>(g.rotation.size()) != a.dimension)
        throw ValidationError("action.rotate", "generator dimension mismatch");
    return;
  }
  const int n = a.space_size;
  if (n < 1) throw ValidationError("action.file", "finite space needs at least one point");
  if (static_cast<int>(a.metric.size()) != n)
    throw ValidationError("action.file", "metric table size mismatch");
  for (int x = 0; x < n; ++x) {
    if (static_cast<int>(a.metric[x].size()) != n)
      throw ValidationError("action.file", "metric row length mismatch");
    if (a.metric[x][x] != 0.0) throw ValidationError("action.file", "metric diagonal must be zero");
    for (int y = 0; y < n; ++y) {
      if (a.metric[x][y] < 0.0) throw ValidationError("action.file", "metric must be non-negative");
      if (x != y && a.metric[x][y] == 0.0)
        throw ValidationError("action.file", "distinct points at distance zero");
      if (a.metric[x][y] != a.metric[y][x])
        throw ValidationError("action.file", "metric must be symmetric");
      for (int z = 0; z < n; ++z)
        if (a.metric[x][z] > a.metric[x][y] + a.metric[y][z] + 1e-12)
          throw ValidationError("action.file", "metric violates the triangle inequality");
    }
  }
  for (const auto& g : a.generators) {
    if (static_cast<int>(g.permutation.size()) != n)
      throw ValidationError("action.file", "permutation length mismatch");
    std::vector<bool> seen(n, false);
    for (int img : g.permutation) {
      if (img < 0 || img >= n || seen[img])
        throw ValidationError("action.file", "generator is not a permutation");
      seen[img] = true;
    }
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (a.metric[g.permutation[x]][g.permutation[y]] != a.metric[x][y])
          throw ValidationError("action.file", "generator does not preserve the metric");
  }
}

/// The closure group of the generated isometry group together with the orbit
/// map h(g) = g . basepoint.
struct OrbitClosureModel {
  GroupPtr closure;
  bool dense = false;  // closure acts with a dense orbit (torus translation)
  // torus X, full-torus closure: h(g) = basepoint + g
  // torus X, cyclic closure Z/L: h(k) = basepoint + k * step
  std::array<double, 2> basepoint_angles{0.0, 0.0};
  std::array<double, 2> step{0.0, 0.0};
  // finite X: h(g) = perms[g][basepoint_index]
  std::vector<std::vector<int>> perms;
  int basepoint_index = 0;

  std::array<double, 2> torus_point(const GroupElement& g) const {
    if (dense)
      return {reduce_angle(basepoint_angles[0] + g.angles[0]),
              reduce_angle(basepoint_angles[1] + g.angles[1])};
    return {reduce_angle(basepoint_angles[0] + g.index * step[0]),
            reduce_angle(basepoint_angles[1] + g.index * step[1])};
  }

  int finite_point(const GroupElement& g) const { return perms[g.index][basepoint_index]; }
};

inline constexpr int closure_order_cap = 360;

/// Torus rotations: a declared-irrational component (or the minimal flag)
/// closes up to the whole torus; otherwise the rational rotations generate a
/// finite cyclic subgroup. Finite spaces: close the generated permutation
/// group by word enumeration.
inline OrbitClosureModel orbit_closure(const IsometricActionDescriptor& a,
                                       std::array<double, 2> basepoint_angles = {0.0, 0.0},
                                       int basepoint_index = 0) {
  validate_action(a);
  OrbitClosureModel ocm;
  if (a.on_torus()) {
    ocm.basepoint_angles = basepoint_angles;
    bool any_irrational = a.declared_minimal;
    for (const auto& g : a.generators)
      for (const auto& c : g.rotation)
        if (!c.rational) any_irrational = true;
    if (any_irrational) {
      ocm.closure = make_torus_group(a.dimension);
      ocm.dense = true;
      return ocm;
    }
    if (a.dimension == 1) {
      long L = 1;
      for (const auto& g : a.generators) L = L / detail::gcd_long(L, g.rotation[0].q) * g.rotation[0].q;
      if (L > closure_order_cap) throw ClosureTooLarge();
      ocm.closure = make_cyclic_group(static_cast<int>(L));
      ocm.step = {two_pi / static_cast<double>(L), 0.0};
      return ocm;
    }
    // Two-dimensional rational rotations: a single generator closes to the
    // cyclic group of its order; joint closures of several generators need
    // lattice arithmetic that is out of scope here.
    if (a.generators.size() != 1)
      throw ValidationError("action.rotate",
                            "rational two-dimensional actions support a single generator");
    const auto& r = a.generators[0].rotation;
    const long L = r[0].q / detail::gcd_long(r[0].q, r[1].q) * r[1].q;
    if (L > closure_order_cap) throw ClosureTooLarge();
    ocm.closure = make_cyclic_group(static_cast<int>(L));
    ocm.step = {r[0].angle(), r[1].angle()};
    return ocm;
  }

  // Finite space: enumerate words in the generators.
  const int n = a.space_size;
  std::vector<std::vector<int>> elems;
  std::vector<int> ident(n);
  for (int i = 0; i < n; ++i) ident[i] = i;
  elems.push_back(ident);
  for (std::size_t head = 0; head < elems.size(); ++head) {
    for (const auto& g : a.generators) {
      const auto next = detail::compose_perm(elems[head], g.permutation);
      if (std::find(elems.begin(), elems.end(), next) == elems.end()) {
        elems.push_back(next);
        if (static_cast<int>(elems.size()) > closure_order_cap) throw ClosureTooLarge();
      }
    }
  }
  const int m = static_cast<int>(elems.size());
  std::vector<std::vector<int>> table(m, std::vector<int>(m));
  for (int aI = 0; aI < m; ++aI)
    for (int bI = 0; bI < m; ++bI) {
      const auto prod = detail::compose_perm(elems[aI], elems[bI]);
      const auto it = std::find(elems.begin(), elems.end(), prod);
      table[aI][bI] = static_cast<int>(it - elems.begin());
    }
  ocm.closure = make_finite_group(table);
  ocm.perms = std::move(elems);
  ocm.basepoint_index = basepoint_index;
  return ocm;
}

/// f |-> f o h, an equivariant unital *-homomorphism C(X) -> C(G).
inline BandFunction pullback(const OrbitClosureModel& ocm, const SpaceFunction& f) {
  const GroupPtr& G = ocm.closure;
  if (!G->is_finite()) {
    // h = translation by the basepoint: shift coefficient phases.
    const auto& b = ocm.basepoint_angles;
    return translate(G->point(reduce_angle(-b[0]), reduce_angle(-b[1])), f.torus_form);
  }
  std::vector<cdouble> vals(G->order());
  for (int k = 0; k < G->order(); ++k) {
    const GroupElement g = G->element(k);
    if (ocm.perms.empty()) {
      const auto x = ocm.torus_point(g);
      vals[k] = f.torus_form.evaluate(f.torus_form.group()->point(x[0], x[1]));
    } else {
      vals[k] = f.values[ocm.finite_point(g)];
    }
  }
  return BandFunction::from_values(G, std::move(vals));
}

struct OrbitCover {
  std::vector<std::array<double, 2>> torus_basepoints;
  std::vector<int> finite_basepoints;
  double delta = 0.0;
  double achieved_density = 0.0;
  std::vector<OrbitClosureModel> orbits;
};

namespace detail {

/// Probe points of X: a lattice on the torus, all points when finite.
inline std::vector<std::array<double, 2>> torus_probes(const IsometricActionDescriptor& a,
                                                       int resolution) {
  std::vector<std::array<double, 2>> out;
  if (a.dimension == 1) {
    for (int t = 0; t < resolution; ++t) out.push_back({two_pi * t / resolution, 0.0});
  } else {
    for (int t0 = 0; t0 < resolution; ++t0)
      for (int t1 = 0; t1 < resolution; ++t1)
        out.push_back({two_pi * t0 / resolution, two_pi * t1 / resolution});
  }
  return out;
}

inline double distance_to_orbit(const IsometricActionDescriptor& a, const OrbitClosureModel& ocm,
                                std::array<double, 2> probe) {
  if (ocm.dense) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < ocm.closure->order(); ++k)
    best = std::min(best, space_distance(a, probe, ocm.torus_point(ocm.closure->element(k))));
  return best;
}

}  // namespace detail

/// Greedy farthest-point basepoint selection until the probe set of X is
/// delta-covered by the union of orbit closures.
inline OrbitCover select_dense_orbits(const IsometricActionDescriptor& a, double delta,
                                      int probe_resolution = 256, int basepoint_cap = 64,
                                      std::array<double, 2> start = {0.0, 0.0},
                                      int start_index = 0) {
  validate_action(a);
  if (delta <= 0.0) throw ValidationError("action.delta", "delta must be positive");
  OrbitCover cover;
  cover.delta = delta;

  if (a.on_torus()) {
    const auto probes = detail::torus_probes(a, probe_resolution);
    std::array<double, 2> next = start;
    for (;;) {
      cover.torus_basepoints.push_back(next);
      cover.orbits.push_back(orbit_closure(a, next));
      double worst = 0.0;
      std::array<double, 2> worst_probe = {0.0, 0.0};
      for (const auto& p : probes) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& o : cover.orbits) d = std::min(d, detail::distance_to_orbit(a, o, p));
        if (d > worst) {
          worst = d;
          worst_probe = p;
        }
      }
      cover.achieved_density = worst;
      if (worst <= delta) return cover;
      if (static_cast<int>(cover.torus_basepoints.size()) >= basepoint_cap) throw CoverNotFound();
      next = worst_probe;
    }
  }

  // Finite X: orbits are computed point sets; probes are all points.
  int next = start_index;
  std::vector<double> dist(a.space_size, std::numeric_limits<double>::infinity());
  for (;;) {
    cover.finite_basepoints.push_back(next);
    cover.orbits.push_back(orbit_closure(a, {0.0, 0.0}, next));
    const auto& o = cover.orbits.back();
    for (int x = 0; x < a.space_size; ++x)
      for (int k = 0; k < o.closure->order(); ++k)
        dist[x] = std::min(dist[x], a.metric[x][o.finite_point(o.closure->element(k))]);
    double worst = 0.0;
    int worst_point = 0;
    for (int x = 0; x < a.space_size; ++x)
      if (dist[x] > worst) {
        worst = dist[x];
        worst_point = x;
      }
    cover.achieved_density = worst;
    if (worst <= delta) return cover;
    if (static_cast<int>(cover.finite_basepoints.size()) >= basepoint_cap) throw CoverNotFound();
    next = worst_point;
  }
}

struct ActionCertificate {
  UcpCertificate combined;
  OrbitCover cover;
  std::vector<UcpCertificate> blocks;
  double restriction_bound = 0.0;  // density * max Lipschitz bound over F
};

struct ActionCertifyOptions {
  double epsilon = 0.5;
  double delta = 0.5;
  int probe_resolution = 256;
  int basepoint_cap = 64;
  std::array<double, 2> basepoint{0.0, 0.0};  // greedy cover starting point
  int basepoint_index = 0;
  KernelSpec kernel;  // resolved per block group; finite blocks get the delta
  int grid_size = 0;
  GridProfile grid_profile;
  bool grid_autorefine = true;
  double tol_grid = 0.05;
  BasisStrategy strategy = BasisStrategy::cholesky;
  std::uint64_t seed = 42;
  int max_dim = 512;
  int gamma_random_samples = 64;
  std::string id;
};

/// Full action pipeline: cover X by orbit closures, certify the translation
/// action on each closure group with the pulled-back family, and combine as
/// a block diagonal. Operator norms of block diagonals are block maxima, so
/// combined defects are maxima of per-block defects; only the norm defect is
/// remeasured against sup over X, with the restriction error delta * Lip(f)
/// added to its bound.
inline ActionCertificate certify_action(const IsometricActionDescriptor& a,
                                        const std::vector<SpaceFunction>& F,
                                        const ActionCertifyOptions& opt) {
  validate_action(a);
  if (F.empty()) throw ValidationError("functions", "certify_action needs a nonempty family");

  // Normalize once on X.
  std::vector<SpaceFunction> family;
  std::vector<double> factors;
  double max_lip = 0.0;
  for (const auto& f : F) {
    const double s = f.sup();
    factors.push_back(s);
    family.push_back(s > 1.0 ? f.scaled(1.0 / s) : f);
    max_lip = std::max(max_lip, lipschitz_bound(a, family.back()));
  }

  ActionCertificate out;
  out.cover = select_dense_orbits(a, opt.delta, opt.probe_resolution, opt.basepoint_cap,
                                  opt.basepoint, opt.basepoint_index);

  std::vector<CertifyResult> results;
  for (std::size_t i = 0; i < out.cover.orbits.size(); ++i) {
    const auto& ocm = out.cover.orbits[i];
    CertifyRequest req;
    req.group = ocm.closure;
    for (const auto& f : family) req.family.push_back(pullback(ocm, f));
    req.epsilon = opt.epsilon;
    req.kernel = make_kernel(ocm.closure, opt.kernel);
    req.band = req.kernel.k.degree();
    req.grid_size = opt.grid_size;
    req.grid_profile = opt.grid_profile;
    req.grid_autorefine = opt.grid_autorefine;
    req.tol_grid = opt.tol_grid;
    req.strategy = opt.strategy;
    req.seed = opt.seed;
    req.max_dim = opt.max_dim;
    req.gamma_random_samples = opt.gamma_random_samples;
    req.id = opt.id + "/orbit" + std::to_string(i);
    results.push_back(certify_detailed(req));
    out.blocks.push_back(results.back().certificate);
  }

  // Combine: maxima across blocks, norm defect remeasured against sup_X.
  UcpCertificate c = out.blocks.front();
  c.id = opt.id;
  for (const auto& b : out.blocks) {
    c.eps_conv = std::max(c.eps_conv, b.eps_conv);
    c.eps_dist = std::max(c.eps_dist, b.eps_dist);
    c.vu_gap = std::max(c.vu_gap, b.vu_gap);
    c.deviation = std::max(c.deviation, b.deviation);
    c.sigma_min = std::min(c.sigma_min, b.sigma_min);
    c.defect_mult = std::max(c.defect_mult, b.defect_mult);
    c.defect_equiv = std::max(c.defect_equiv, b.defect_equiv);
    c.positivity = std::min(c.positivity, b.positivity);
  }
  c.dim_e = 0;
  for (const auto& b : out.blocks) c.dim_e += b.dim_e;
  c.eps_total = std::max({c.eps_conv, c.eps_dist, c.vu_gap});

  // Remeasure the norm defect against sup over X, on the same product-closed
  // family the per-block runs used (the pullback is a homomorphism, so block
  // closed families are exactly the pullbacks of these X-side products).
  std::vector<SpaceFunction> family2 = family;
  for (const auto& f : family)
    for (const auto& g : family) family2.push_back(space_product(f, g));
  c.defect_norm = 0.0;
  for (std::size_t fi = 0; fi < family2.size(); ++fi) {
    double block_norm = 0.0;
    for (const auto& r : results)
      block_norm = std::max(block_norm, operator_norm(r.map->assemble(r.closed_family[fi])));
    c.defect_norm = std::max(c.defect_norm, std::abs(block_norm - family2[fi].sup()));
  }

  out.restriction_bound = out.cover.achieved_density * max_lip;
  c.bound_mult = 4.0 * c.eps_total;
  c.bound_equiv = c.eps_total + 2.0 * c.eps_dist;
  c.bound_norm = 3.0 * c.eps_total + opt.tol_grid + out.restriction_bound;
  c.bound_vu = 4.0 * c.eps_dist;
  const double slack = 1e-12;
  c.pass = c.defect_mult <= c.bound_mult + slack && c.defect_equiv <= c.bound_equiv + slack &&
           c.defect_norm <= c.bound_norm + slack && c.vu_gap <= c.bound_vu + slack;
  c.normalization_factors = std::move(factors);
  c.family_size = static_cast<int>(family.size());
  out.combined = std::move(c);
  return out;
}

}  // namespace qd
