//
// Acceptance gate: one check per line, exit code = number of failed checks.
// Run from the repository root (scenario files are loaded by relative path).
//

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "quasidiag/report.hpp"

using namespace qd;

namespace {

int failures = 0;

void criterion(int n, const std::string& what, const std::function<std::string()>& body) {
  std::string reason;
  try {
    reason = body();
  } catch (const std::exception& e) {
    reason = std::string("exception: ") + e.what();
  }
  if (reason.empty()) {
    std::printf("criterion %d: PASS - %s\n", n, what.c_str());
  } else {
    std::printf("criterion %d: FAIL - %s (%s)\n", n, what.c_str(), reason.c_str());
    ++failures;
  }
  std::fflush(stdout);
}

std::string fail(const std::string& msg) { return msg; }

std::vector<BandFunction> standard_family(const GroupPtr& T) {
  return {BandFunction::constant(T, cdouble(1.0)), BandFunction::exponential(T, {1, 0}),
          BandFunction::exponential(T, {-1, 0})};
}

CertifyRequest fejer_request(const GroupPtr& T, int degree, int grid_size,
                             std::vector<BandFunction> family) {
  CertifyRequest req;
  req.group = T;
  req.kernel = fejer_kernel(T, degree);
  req.band = req.kernel.k.degree();
  req.grid_size = grid_size;
  req.family = std::move(family);
  req.epsilon = 0.9;
  return req;
}

std::string check_exact_finite(const GroupPtr& G, const std::vector<BandFunction>& family,
                               const std::string& label) {
  CertifyRequest req;
  req.group = G;
  req.kernel = delta_kernel(G);
  req.family = family;
  req.id = label;
  const CertifyResult r = certify_detailed(req);
  const UcpCertificate& c = r.certificate;
  if (c.defect_mult >= 1e-10) return fail(label + ": defect_mult " + std::to_string(c.defect_mult));
  if (c.defect_norm >= 1e-10) return fail(label + ": defect_norm " + std::to_string(c.defect_norm));
  std::vector<GroupElement> all;
  for (int g = 0; g < G->order(); ++g) all.push_back(G->element(g));
  std::vector<BandFunction> f2 = r.closed_family;
  const double equiv = r.map->defect_equiv_max(f2, all);
  if (equiv >= 1e-10) return fail(label + ": defect_equiv " + std::to_string(equiv));
  if (r.map->unitality_defect() > 1e-10) return fail(label + ": not unital");
  for (const auto& f : r.family)
    if (r.map->star_defect(f) > 1e-10) return fail(label + ": star defect");
  return "";
}

IsometricActionDescriptor rational_rotation(long p, long q) {
  IsometricActionDescriptor a;
  a.kind = "torus_rotation";
  a.dimension = 1;
  ActionGenerator g;
  RotationComponent r;
  r.rational = true;
  r.p = p;
  r.q = q;
  g.rotation.push_back(r);
  a.generators.push_back(g);
  return a;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

int main() {
  const GroupPtr T = make_torus_group(1);

  criterion(1, "fejer kernels: lattice positivity, unit mass, exact defect law", [&] {
    const std::vector<BandFunction> probe = {BandFunction::exponential(T, {1, 0})};
    for (int n = 1; n <= 64; ++n) {
      const Kernel k = fejer_kernel(T, n);
      const int L = 16 * (n + 1);
      double lattice_min = 0.0;
      for (int t = 0; t < L; ++t)
        lattice_min = std::min(lattice_min, k.k.evaluate(T->point(two_pi * t / L)).real());
      if (lattice_min < -1e-12) return fail("n=" + std::to_string(n) + " min " + fmt(lattice_min));
      if (std::abs(integral(k.k).real() - 1.0) > 1e-12)
        return fail("n=" + std::to_string(n) + " mass");
      const double defect = kernel_defect(k, probe);
      if (std::abs(defect - 1.0 / (n + 1)) > 1e-12)
        return fail("n=" + std::to_string(n) + " defect " + fmt(defect));
    }
    return std::string();
  });

  criterion(2, "built kernels: error inequality and normalization window", [&] {
    for (int band : {8, 16, 32}) {
      const Kernel k = build_kernel(T, two_pi / 2.0, band, 0.9);
      const KernelBuildTrace& tr = k.trace;
      const double rhs = 2.0 * tr.approx_error * tr.sqrt_sup + tr.approx_error * tr.approx_error;
      if (tr.product_gap > rhs + 1e-12)
        return fail("band " + std::to_string(band) + ": gap " + fmt(tr.product_gap) + " > " +
                    fmt(rhs));
      const double eps = k.band_error;
      const double lo = 1.0 / (1.0 + 3.0 * eps), hi = 1.0 / (1.0 - 3.0 * eps);
      if (tr.normalization_scale < lo || tr.normalization_scale > hi)
        return fail("band " + std::to_string(band) + ": scale " + fmt(tr.normalization_scale) +
                    " outside [" + fmt(lo) + ", " + fmt(hi) + "]");
    }
    return std::string();
  });

  criterion(3, "finite groups with the delta kernel are exact", [&] {
    const GroupPtr z4 = make_cyclic_group(4);
    std::string r = check_exact_finite(
        z4,
        {BandFunction::from_values(z4, {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}),
         BandFunction::from_values(z4, {{1, 0}, {0.5, 0.5}, {0, 0}, {-0.25, 0}})},
        "Z/4");
    if (!r.empty()) return r;
    const GroupPtr z6 = make_cyclic_group(6);
    r = check_exact_finite(
        z6,
        {BandFunction::from_values(z6, {{1, 0}, {0.5, 0.5}, {0, 0}, {-0.25, 0}, {0, -1}, {0.75, 0}}),
         BandFunction::from_values(z6, {{1, 0}, {-1, 0}, {1, 0}, {-1, 0}, {1, 0}, {-1, 0}})},
        "Z/6");
    if (!r.empty()) return r;
    const GroupPtr s3 = load_finite_group("scenarios/s3_table.txt");
    return check_exact_finite(
        s3,
        {BandFunction::from_values(s3, {{1, 0}, {0, 0}, {0, 0}, {0.5, 0}, {0, 0}, {-0.5, 0}}),
         BandFunction::from_values(s3, {{0, 1}, {1, 0}, {0, -1}, {0, 0}, {0.25, 0}, {0, 0.5}})},
        "S3");
  });

  criterion(4, "smoothing certificates obey their bounds; hand defect at degree three", [&] {
    for (int n : {4, 8, 16, 32}) {
      CertifyRequest req = fejer_request(T, n, 4 * n, standard_family(T));
      const UcpCertificate c = certify(req);
      if (!c.pass) return fail("n=" + std::to_string(n) + " did not pass");
      if (c.defect_mult > 4.0 * c.eps_total + 1e-12)
        return fail("n=" + std::to_string(n) + " mult " + fmt(c.defect_mult));
      if (c.defect_norm > 3.0 * c.eps_total + c.tol_grid + 1e-12)
        return fail("n=" + std::to_string(n) + " norm " + fmt(c.defect_norm));
      if (c.grid_size != 4 * n) return fail("n=" + std::to_string(n) + " grid moved");
    }
    CertifyRequest req =
        fejer_request(T, 3, 16, {BandFunction::exponential(T, {1, 0})});
    const CertifyResult r = certify_detailed(req);
    const double dm = r.map->defect_mult(r.family[0], r.family[0]);
    if (std::abs(dm - 1.0 / 16.0) > 1e-10) return fail("hand value: " + fmt(dm));
    return std::string();
  });

  criterion(5, "perturbed grids: polar gap bound and strategy independence", [&] {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      CertifyRequest req = fejer_request(T, 2, 32, standard_family(T));
      req.grid_profile.perturbed = true;
      req.grid_profile.seed = seed;
      req.grid_profile.amplitude = 0.1;
      req.grid_autorefine = false;
      req.strategy = BasisStrategy::sqrt;
      const CertifyResult rs = certify_detailed(req);
      req.strategy = BasisStrategy::cholesky;
      const CertifyResult rc = certify_detailed(req);
      const UcpCertificate &a = rs.certificate, &b = rc.certificate;
      if (a.vu_gap > 4.0 * a.eps_dist + 1e-12)
        return fail("seed " + std::to_string(seed) + ": vu_gap " + fmt(a.vu_gap) + " > 4*" +
                    fmt(a.eps_dist));
      if (std::abs(a.defect_mult - b.defect_mult) > 1e-9 ||
          std::abs(a.defect_equiv - b.defect_equiv) > 1e-9 ||
          std::abs(a.defect_norm - b.defect_norm) > 1e-9 ||
          std::abs(a.vu_gap - b.vu_gap) > 1e-9)
        return fail("seed " + std::to_string(seed) + ": strategies disagree");
      for (const CertifyResult* r : {&rs, &rc}) {
        const Matrix& U = r->map->ud().U;
        const Matrix I = Matrix::Identity(U.rows(), U.cols());
        if (operator_norm(U.adjoint() * U - I) > 1e-12)
          return fail("seed " + std::to_string(seed) + ": U not unitary");
      }
    }
    return std::string();
  });

  criterion(6, "averaging: deviation bound on perturbed grids, identity on uniform", [&] {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      GridProfile p;
      p.perturbed = true;
      p.seed = seed;
      p.amplitude = 0.1;
      const EvaluationMap em(build_grid(T, 32, p), 2);
      const GramData gd = averaged_gram(em);
      if (gd.deviation > 2.0 * isometry_distortion(em) + 1e-8)
        return fail("seed " + std::to_string(seed) + ": deviation " + fmt(gd.deviation));
    }
    for (int band : {2, 4}) {
      const EvaluationMap em(build_grid(T, 2 * band + 1), band);
      const GramData gd = averaged_gram(em);
      if (gd.deviation > 1e-10) return fail("uniform band " + std::to_string(band));
    }
    const GroupPtr z5 = make_cyclic_group(5);
    const GramData gf = averaged_gram(EvaluationMap(build_grid(z5, 0), 0));
    if (gf.deviation > 1e-10) return fail("finite averaging not exact");
    return std::string();
  });

  criterion(7, "actions: dense pullback equality, exact rational orbits, two-orbit covers", [&] {
    // Dense orbit vs plain translation, field by field.
    IsometricActionDescriptor irr;
    irr.kind = "torus_rotation";
    irr.dimension = 1;
    ActionGenerator gen;
    RotationComponent rot;
    rot.rational = false;
    rot.turns = 0.7071067811865475;
    gen.rotation.push_back(rot);
    irr.generators.push_back(gen);

    ActionCertifyOptions opt;
    opt.epsilon = 0.9;
    opt.kernel.type = "fejer";
    opt.kernel.degree = 8;
    opt.id = "irr";
    const std::vector<SpaceFunction> FX = {
        SpaceFunction::torus(BandFunction::exponential(T, {1, 0})),
        SpaceFunction::torus(BandFunction::constant(T, cdouble(1.0)))};
    const ActionCertificate ac = certify_action(irr, FX, opt);

    CertifyRequest treq = fejer_request(T, 8, 0, {BandFunction::exponential(T, {1, 0}),
                                                  BandFunction::constant(T, cdouble(1.0))});
    const UcpCertificate tc = certify(treq);
    if (std::abs(ac.combined.defect_mult - tc.defect_mult) > 1e-12 ||
        std::abs(ac.combined.defect_equiv - tc.defect_equiv) > 1e-12 ||
        std::abs(ac.combined.defect_norm - tc.defect_norm) > 1e-12 ||
        std::abs(ac.combined.eps_conv - tc.eps_conv) > 1e-12 ||
        std::abs(ac.combined.vu_gap - tc.vu_gap) > 1e-12)
      return fail("dense action and translation certificates differ");

    // Exact rational orbit.
    ActionCertifyOptions o5;
    o5.delta = 0.7;
    o5.id = "r5";
    const std::vector<SpaceFunction> F5 = {
        SpaceFunction::torus(BandFunction::exponential(T, {1, 0})),
        SpaceFunction::torus(BandFunction::exponential(T, {-1, 0}))};
    const ActionCertificate a5 = certify_action(rational_rotation(1, 5), F5, o5);
    if (a5.combined.defect_mult >= 1e-10 || a5.combined.defect_equiv >= 1e-10 ||
        a5.combined.defect_norm >= 1e-10)
      return fail("order-five orbit not exact");

    // Exact finite-space action.
    IsometricActionDescriptor s3a;
    s3a.kind = "finite_space";
    load_finite_space("scenarios/s3_space.txt", s3a);
    ActionCertifyOptions os3;
    os3.id = "s3";
    const std::vector<SpaceFunction> FS = {
        SpaceFunction::finite({cdouble(1.0), cdouble(0.5), cdouble(-0.25)}),
        SpaceFunction::finite({cdouble(0.0, 1.0), cdouble(1.0), cdouble(0.0)})};
    const ActionCertificate as3 = certify_action(s3a, FS, os3);
    if (as3.combined.defect_mult >= 1e-10 || as3.combined.defect_equiv >= 1e-10 ||
        as3.combined.defect_norm >= 1e-10)
      return fail("finite-space action not exact");

    // Two-orbit cover with the direct-sum oracle.
    const IsometricActionDescriptor q4 = rational_rotation(1, 4);
    ActionCertifyOptions o4;
    o4.delta = 0.5;
    o4.id = "r4";
    std::vector<SpaceFunction> F4 = {
        SpaceFunction::torus(BandFunction::exponential(T, {1, 0})),
        SpaceFunction::torus(BandFunction::constant(T, cdouble(0.5)))};
    const ActionCertificate a4 = certify_action(q4, F4, o4);
    if (a4.cover.achieved_density > 0.5) return fail("cover density " + fmt(a4.cover.achieved_density));
    if (a4.cover.torus_basepoints.size() != 2) return fail("cover basepoint count");
    if (std::abs(a4.cover.torus_basepoints[0][0]) > 1e-12 ||
        std::abs(a4.cover.torus_basepoints[1][0] - two_pi / 8.0) > 1e-9)
      return fail("cover basepoints misplaced");

    std::vector<SpaceFunction> family2 = F4;
    for (const auto& f : F4)
      for (const auto& g : F4) family2.push_back(space_product(f, g));
    std::vector<CertifyResult> blocks;
    for (const auto& ocm : a4.cover.orbits) {
      CertifyRequest req;
      req.group = ocm.closure;
      for (const auto& f : F4) req.family.push_back(pullback(ocm, f));
      req.kernel = make_kernel(ocm.closure, o4.kernel);
      req.band = req.kernel.k.degree();
      blocks.push_back(certify_detailed(req));
    }
    double norm_defect = 0.0;
    for (std::size_t fi = 0; fi < family2.size(); ++fi) {
      const Matrix A = blocks[0].map->assemble(blocks[0].closed_family[fi]);
      const Matrix B = blocks[1].map->assemble(blocks[1].closed_family[fi]);
      Matrix Z = Matrix::Zero(A.rows() + B.rows(), A.cols() + B.cols());
      Z.topLeftCorner(A.rows(), A.cols()) = A;
      Z.bottomRightCorner(B.rows(), B.cols()) = B;
      const double direct = operator_norm(Z);
      const double blockmax = std::max(operator_norm(A), operator_norm(B));
      if (std::abs(direct - blockmax) > 1e-12) return fail("direct sum norm is not the block max");
      norm_defect = std::max(norm_defect, std::abs(direct - family2[fi].sup()));
    }
    if (std::abs(norm_defect - a4.combined.defect_norm) > 1e-12)
      return fail("combined norm defect differs from the direct-sum value");
    return std::string();
  });

  criterion(8, "independent oracles: convolution, polar factor, grid inner product", [&] {
    // Convolution against the quadrature double sum.
    BandFunction f = BandFunction::zero(T, 3);
    f.mutable_coefficients() = {cdouble(0.0, 0.25), cdouble(-0.4, 0.0), cdouble(0.5, -0.3),
                                cdouble(0.7, 0.1),  cdouble(0.0, 0.0),  cdouble(0.3, 0.2),
                                cdouble(-0.1, 0.0)};
    const Kernel k = fejer_kernel(T, 4);
    const BandFunction conv = convolve(f, k.k);
    const int m = 2 * (f.degree() + k.k.degree()) + 3;
    for (int s = 0; s < 9; ++s) {
      const GroupElement x = T->point(0.41 + two_pi * s / 9.0);
      cdouble acc(0.0);
      for (int t = 0; t < m; ++t) {
        const GroupElement g = T->point(two_pi * t / m);
        acc += f.evaluate(g) * k.k.evaluate(T->multiply(T->inverse(g), x));
      }
      acc /= static_cast<double>(m);
      if (std::abs(conv.evaluate(x) - acc) > 1e-10) return fail("convolution oracle");
    }

    // Polar factor against the Newton iteration.
    Matrix M(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        M(i, j) = cdouble(std::sin(1.0 + i + 3 * j), std::cos(2.0 + 2 * i + j));
    GramData gd;
    gd.S = M.adjoint() * M + 0.5 * Matrix::Identity(4, 4);
    const UnitarizationData ud = unitarization(gd, BasisStrategy::cholesky);
    Matrix X = ud.V;
    for (int it = 0; it < 60; ++it) X = 0.5 * (X + X.inverse().adjoint());
    if (operator_norm(X - ud.U) > 1e-10) return fail("polar oracle");

    // Grid inner product against the direct loop, bit for bit.
    GridProfile p;
    p.perturbed = true;
    p.seed = 5;
    p.amplitude = 0.1;
    const SampleGrid grid = build_grid(T, 19, p);
    std::vector<cdouble> v(19), w(19);
    for (int i = 0; i < 19; ++i) {
      v[i] = cdouble(std::sin(i * 0.3), std::cos(i * 0.7));
      w[i] = cdouble(std::cos(i * 0.2), std::sin(i * 1.1));
    }
    cdouble naive(0.0);
    for (std::size_t e = 0; e < v.size(); ++e) naive += v[e] * std::conj(w[e]) * grid.weights[e];
    if (grid_inner(grid, v, w) != naive) return fail("grid inner product not bit-exact");
    return std::string();
  });

  criterion(9, "reports are deterministic byte for byte", [&] {
    for (const char* path :
         {"scenarios/torus_sweep.scn", "scenarios/perturbed_grid.scn",
          "scenarios/rational4_cover.scn"}) {
      const Scenario sc = load_scenario(path);
      const Report r1 = run(sc);
      const Report r2 = run(sc);
      if (!r1.errors.empty())
        return fail(std::string(path) + ": " + r1.errors[0].code + ": " + r1.errors[0].message);
      if (emit_json(r1) != emit_json(r2))
        return fail(std::string(path) + " JSON differs between runs");
    }
    return std::string();
  });

  if (failures == 0) std::printf("acceptance: all 9 criteria passed\n");
  else std::printf("acceptance: %d criteria FAILED\n", failures);
  return failures;
}
