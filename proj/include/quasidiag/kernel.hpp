#pragma once

//
// Module      : kernel
// Description : approximate-identity kernels: triangular bump -> square root
//               -> band projection -> square -> normalize, plus the Fejer
//               closed form on tori and the exact delta on finite groups
//

#include <cmath>
#include <string>
#include <vector>

#include "quasidiag/band_function.hpp"
#include "quasidiag/errors.hpp"
#include "quasidiag/group.hpp"

namespace qd {

inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

/// Non-negative L^1-normalized bump supported in the radius-r ball around the
/// identity. Torus: the triangular profile (2*pi/r^2)(r - |t|)_+ per
/// dimension, kept in closed form so positivity and total mass are exact.
/// Finite groups: the point mass at the identity scaled by the order.
struct Bump {
  GroupPtr group;
  double radius = 0.0;
  std::vector<cdouble> finite_values;  // finite groups only

  double evaluate(const GroupElement& g) const {
    if (group->is_finite()) return finite_values[g.index].real();
    double v = axis_value(g.angles[0]);
    if (group->dimension() == 2) v *= axis_value(g.angles[1]);
    return v;
  }

  double sqrt_evaluate(const GroupElement& g) const {
    if (group->is_finite()) return std::sqrt(std::max(0.0, finite_values[g.index].real()));
    double v = std::sqrt(axis_value(g.angles[0]));
    if (group->dimension() == 2) v *= std::sqrt(axis_value(g.angles[1]));
    return v;
  }

  /// Exact Fourier coefficient sinc^2(j r / 2) per dimension.
  double fourier_coefficient(std::array<int, 2> j) const {
    double c = sinc(j[0] * radius / 2.0);
    c *= c;
    if (group->dimension() == 2) {
      const double c1 = sinc(j[1] * radius / 2.0);
      c *= c1 * c1;
    }
    return c;
  }

  double sup_value() const {
    const double peak = two_pi / radius;
    return group->dimension() == 2 ? peak * peak : peak;
  }

  double axis_value(double theta) const {
    const double d = circle_distance(theta);
    return d >= radius ? 0.0 : (two_pi / (radius * radius)) * (radius - d);
  }

  double axis_sqrt(double theta) const { return std::sqrt(axis_value(theta)); }

 private:

  static double circle_distance(double theta) {
    const double t = reduce_angle(theta);
    return std::min(t, two_pi - t);
  }
};

/// Guard: the working lattice must resolve the bump (at least four lattice
/// steps across the radius), otherwise sampled positivity/mass checks are
/// meaningless.
inline Bump build_bump(const GroupPtr& G, double radius, int lattice_resolution = 1024) {
  Bump b;
  b.group = G;
  if (G->is_finite()) {
    const int m = G->order();
    b.finite_values.assign(m, cdouble(0.0));
    b.finite_values[G->identity().index] = cdouble(static_cast<double>(m));
    return b;
  }
  // Past pi the ball is the whole circle and the closed-form mass is no
  // longer exact, so the triangle profile is only offered up to radius pi.
  if (radius <= 0.0 || radius > two_pi / 2.0 + 1e-12)
    throw ValidationError("kernel.radius", "radius must lie in (0, pi]");
  const double spacing = two_pi / lattice_resolution;
  if (radius < 4.0 * spacing) throw RadiusTooSmall();
  b.radius = radius;
  return b;
}

/// Everything measured while constructing a Kernel. approx_error and
/// product_gap are sup estimates over the same sampling lattice the
/// projection used; normalization uses the exact coefficient-space mass.
struct KernelBuildTrace {
  std::vector<double> sqrt_samples;  // per-axis samples of sqrt(h) on the lattice
  BandFunction l;                    // band projection of sqrt(h)
  double approx_error = 0.0;         // sup |l - sqrt(h)|
  double product_gap = 0.0;          // sup |l l* - h|
  double normalization_scale = 1.0;  // 1 / integral(l l*)
  double sqrt_sup = 0.0;             // sup sqrt(h)
  bool closed_form = false;          // Fejer / delta fast paths
};

struct Kernel {
  BandFunction k;
  double band_error = 0.0;  // measured epsilon_i (= product_gap for built kernels)
  KernelBuildTrace trace;
  std::string kind;  // "fejer" | "built" | "delta"
  int degree = 0;
  double radius = 0.0;
};

/// Exact identity of convolution on a finite group: order * delta_e.
inline Kernel delta_kernel(const GroupPtr& G) {
  if (!G->is_finite()) throw ValidationError("kernel.type", "delta kernel requires a finite group");
  std::vector<cdouble> v(G->order(), cdouble(0.0));
  v[G->identity().index] = cdouble(static_cast<double>(G->order()));
  Kernel out;
  out.k = BandFunction::from_values(G, std::move(v));
  out.band_error = 0.0;
  out.trace.closed_form = true;
  out.trace.normalization_scale = 1.0;
  out.kind = "delta";
  return out;
}

/// Fejer kernel on T^d: coefficients prod_d (1 - |j_d|/(n+1)); non-negative,
/// mass one, band {-n..n}^d, all exact in coefficient space.
inline Kernel fejer_kernel(const GroupPtr& G, int n) {
  if (G->is_finite()) throw ValidationError("kernel.type", "fejer kernel requires a torus group");
  if (n < 0) throw ValidationError("kernel.degree", "fejer degree must be non-negative");
  BandFunction k = BandFunction::zero(G, n);
  const int d = G->dimension();
  const int n1max = d == 2 ? n : 0;
  for (int j0 = -n; j0 <= n; ++j0)
    for (int j1 = -n1max; j1 <= n1max; ++j1) {
      double c = 1.0 - std::abs(j0) / static_cast<double>(n + 1);
      if (d == 2) c *= 1.0 - std::abs(j1) / static_cast<double>(n + 1);
      k.mutable_coefficients()[k.offset({j0, j1})] = cdouble(c);
    }
  Kernel out;
  out.k = std::move(k);
  out.band_error = 0.0;
  out.trace.closed_form = true;
  out.trace.normalization_scale = 1.0;
  out.kind = "fejer";
  out.degree = n;
  return out;
}

/// Square-root / band-project / square / normalize construction. The measured
/// band_error is the lattice sup |l l* - h|; if it misses target_eps the band
/// was too small for the requested radius.
inline Kernel build_kernel(const GroupPtr& G, double radius, int band_degree, double target_eps,
                           int oversample = 16) {
  if (target_eps <= 0.0 || target_eps >= 1.0)
    throw ValidationError("kernel.target_eps", "target must lie in (0,1)");
  if (G->is_finite()) return delta_kernel(G);
  if (band_degree < 0) throw ValidationError("kernel.band", "band degree must be non-negative");
  if (oversample < 4) throw std::invalid_argument("build_kernel oversample must be at least 4");

  const int m_lat = oversample * (band_degree + 1);
  const Bump bump = build_bump(G, radius, m_lat);
  const int d = G->dimension();

  // Per-axis discrete analysis of sqrt(h): the 2-d bump is a product, so its
  // square root factorizes and the lattice projection factorizes with it.
  std::vector<double> axis_samples(m_lat);
  for (int t = 0; t < m_lat; ++t) axis_samples[t] = bump.axis_sqrt(two_pi * t / m_lat);
  std::vector<cdouble> axis_coeff(2 * band_degree + 1);
  for (int j = -band_degree; j <= band_degree; ++j) {
    cdouble acc(0.0);
    for (int t = 0; t < m_lat; ++t)
      acc += axis_samples[t] * std::polar(1.0, -j * two_pi * t / m_lat);
    axis_coeff[j + band_degree] = acc / static_cast<double>(m_lat);
  }

  BandFunction l = BandFunction::zero(G, band_degree);
  if (d == 1) {
    l.mutable_coefficients() = axis_coeff;
  } else {
    for (int j0 = -band_degree; j0 <= band_degree; ++j0)
      for (int j1 = -band_degree; j1 <= band_degree; ++j1)
        l.mutable_coefficients()[l.offset({j0, j1})] =
            axis_coeff[j0 + band_degree] * axis_coeff[j1 + band_degree];
  }

  // Honest error measurement on the sampling lattice.
  double approx_error = 0.0, product_gap = 0.0;
  const int inner = d == 2 ? m_lat : 1;
  for (int t0 = 0; t0 < m_lat; ++t0)
    for (int t1 = 0; t1 < inner; ++t1) {
      const GroupElement x =
          d == 1 ? G->point(two_pi * t0 / m_lat)
                 : G->point(two_pi * t0 / m_lat, two_pi * t1 / m_lat);
      const cdouble lv = l.evaluate(x);
      approx_error = std::max(approx_error, std::abs(lv - bump.sqrt_evaluate(x)));
      product_gap = std::max(product_gap, std::abs(std::norm(lv) - bump.evaluate(x)));
    }
  if (product_gap > target_eps) throw BandTooSmall();

  // Exact mass of l l* by Parseval, then L^1-normalize.
  double mass = 0.0;
  for (const auto& c : l.coefficients()) mass += std::norm(c);
  BandFunction k = multiply_pointwise(l, l.conjugated()) * cdouble(1.0 / mass);

  // k = |l|^2 / mass is non-negative by construction; a lattice minimum below
  // tolerance can only mean broken numerics, so refuse to return it.
  double min_val = 0.0;
  for (int t0 = 0; t0 < m_lat; ++t0)
    for (int t1 = 0; t1 < inner; ++t1) {
      const GroupElement x =
          d == 1 ? G->point(two_pi * t0 / m_lat)
                 : G->point(two_pi * t0 / m_lat, two_pi * t1 / m_lat);
      min_val = std::min(min_val, k.evaluate(x).real());
    }
  if (min_val < -1e-9) throw NegativityViolation();

  Kernel out;
  out.k = std::move(k);
  out.band_error = product_gap;
  out.trace.sqrt_samples = std::move(axis_samples);
  out.trace.l = std::move(l);
  out.trace.approx_error = approx_error;
  out.trace.product_gap = product_gap;
  out.trace.normalization_scale = 1.0 / mass;
  out.trace.sqrt_sup = std::sqrt(bump.sup_value());
  out.kind = "built";
  out.degree = band_degree;
  out.radius = radius;
  return out;
}

/// Uniform-approximation defect max_{f in F} sup |f*k - f|.
inline double kernel_defect(const Kernel& k, const std::vector<BandFunction>& F,
                            int oversample = 16) {
  if (F.empty()) throw ValidationError("functions", "kernel_defect needs a nonempty family");
  double worst = 0.0;
  for (const auto& f : F) worst = std::max(worst, sup_norm(convolve(f, k.k) - f, oversample));
  return worst;
}

/// Declarative kernel choice, resolved against a concrete group. Finite
/// groups always get the exact delta: it is the optimal kernel there and the
/// torus constructions do not apply.
struct KernelSpec {
  std::string type = "fejer";  // "fejer" | "built" | "delta"
  int degree = 8;              // fejer degree / built band degree
  double radius = two_pi / 2.0;
  double target_eps = 0.5;  // built only
};

inline Kernel make_kernel(const GroupPtr& G, const KernelSpec& spec) {
  if (G->is_finite()) return delta_kernel(G);
  if (spec.type == "delta")
    throw ValidationError("kernel.type", "delta kernel requires a finite group");
  if (spec.type == "fejer") return fejer_kernel(G, spec.degree);
  if (spec.type == "built") return build_kernel(G, spec.radius, spec.degree, spec.target_eps);
  throw ValidationError("kernel.type", "unknown kernel type: " + spec.type);
}

}  // namespace qd
