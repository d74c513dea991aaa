#pragma once

//
// Module      : report
// Description : scenario orchestration and report emission. JSON is the
//               determinism surface (no wall times inside); CSV and the
//               human table carry timing for sweep plots.
//

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "quasidiag/action.hpp"
#include "quasidiag/scenario.hpp"
#include "quasidiag/ucp.hpp"
#include "quasidiag/version.hpp"

namespace qd {

struct SweepRow {
  int degree = 0;
  int m = 0;
  double eps_conv = 0.0;
  double eps_dist = 0.0;
  double vu_gap = 0.0;
  double defect_mult = 0.0;
  double defect_equiv = 0.0;
  double defect_norm = 0.0;
  bool pass = false;
  double wall_ms = 0.0;
};

struct ReportError {
  std::string code;
  std::string message;
};

struct ActionSummary {
  bool present = false;
  double delta = 0.0;
  double achieved_density = 0.0;
  double restriction_bound = 0.0;
  int basepoint_count = 0;
  std::vector<int> block_dims;
};

struct Report {
  std::string version = version_string;
  std::string input_hash;
  std::vector<UcpCertificate> certificates;
  std::vector<SweepRow> sweep;
  std::vector<ReportError> errors;
  ActionSummary action;
  double wall_ms = 0.0;
};

inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline BandFunction resolve_function(const GroupPtr& G, const FunctionSpec& fs) {
  if (fs.kind == "const") return BandFunction::constant(G, fs.constant);
  if (fs.kind == "exp") {
    if (!G->is_finite()) {
      if (G->dimension() == 1 && fs.freq_dims == 2)
        throw ValidationError("functions", "two frequencies on a one-dimensional torus");
      return BandFunction::exponential(G, fs.freq);
    }
    // Characters exist canonically on cyclic groups: k -> e^{2 pi i j k / m}.
    const int m = G->order();
    bool cyclic_layout = true;
    for (int a = 0; a < m && cyclic_layout; ++a)
      for (int b = 0; b < m && cyclic_layout; ++b)
        if (G->table()[a][b] != (a + b) % m) cyclic_layout = false;
    if (!cyclic_layout)
      throw ValidationError("functions", "exp requires a torus or cyclic group");
    std::vector<cdouble> v(m);
    for (int k = 0; k < m; ++k) v[k] = std::polar(1.0, two_pi * fs.freq[0] * k / m);
    return BandFunction::from_values(G, std::move(v));
  }
  if (fs.kind == "coeffs") {
    if (G->is_finite()) throw ValidationError("functions", "coeffs requires a torus group");
    int degree = 0;
    for (const auto& [j, c] : fs.coeffs)
      degree = std::max({degree, std::abs(j[0]), std::abs(j[1])});
    BandFunction f = BandFunction::zero(G, degree);
    for (const auto& [j, c] : fs.coeffs) {
      if (G->dimension() == 1 && j[1] != 0)
        throw ValidationError("functions", "second frequency on a one-dimensional torus");
      f.mutable_coefficients()[f.offset(j)] += c;
    }
    return f;
  }
  if (fs.kind == "values") {
    if (!G->is_finite()) throw ValidationError("functions", "values requires a finite group");
    return BandFunction::from_values(G, fs.values);
  }
  throw ValidationError("functions", "unknown function kind: " + fs.kind);
}

inline SpaceFunction resolve_space_function(const IsometricActionDescriptor& a,
                                            const GroupPtr& x_model, const FunctionSpec& fs) {
  if (a.on_torus()) {
    FunctionSpec torus_fs = fs;
    return SpaceFunction::torus(resolve_function(x_model, torus_fs));
  }
  if (fs.kind == "const")
    return SpaceFunction::finite(std::vector<cdouble>(a.space_size, fs.constant));
  if (fs.kind == "values") {
    if (static_cast<int>(fs.values.size()) != a.space_size)
      throw ValidationError("functions", "value list length differs from the space size");
    return SpaceFunction::finite(fs.values);
  }
  throw ValidationError("functions", "finite spaces take const or values functions");
}

inline SweepRow row_from(const UcpCertificate& c, int degree, int m, double wall_ms) {
  SweepRow r;
  r.degree = degree;
  r.m = m;
  r.eps_conv = c.eps_conv;
  r.eps_dist = c.eps_dist;
  r.vu_gap = c.vu_gap;
  r.defect_mult = c.defect_mult;
  r.defect_equiv = c.defect_equiv;
  r.defect_norm = c.defect_norm;
  r.pass = c.pass;
  r.wall_ms = wall_ms;
  return r;
}

class StopWatch {
 public:
  StopWatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

inline Report run(const Scenario& sc) {
  Report rep;
  rep.input_hash = fnv1a_hex(sc.raw_text);
  const detail::StopWatch total;
  try {
    if (sc.target == "translation") {
      GroupPtr G;
      if (sc.group_kind == "torus") G = make_torus_group(sc.group_dimension);
      else if (sc.group_kind == "cyclic") G = make_cyclic_group(sc.group_order);
      else G = load_finite_group(sc.group_table_path);

      CertifyRequest req;
      req.group = G;
      for (const auto& fs : sc.functions) req.family.push_back(detail::resolve_function(G, fs));
      req.epsilon = sc.epsilon;
      req.kernel = make_kernel(G, sc.kernel);
      req.band = req.kernel.k.degree();
      req.grid_size = sc.grid_size;
      req.grid_profile = sc.grid_profile;
      req.grid_autorefine = sc.grid_autorefine;
      req.tol_grid = sc.tol_grid;
      req.strategy = sc.strategy;
      req.seed = sc.seed;
      req.max_dim = sc.max_dim;
      req.id = sc.id;
      rep.certificates.push_back(certify(req));

      for (int n : sc.sweep) {
        const detail::StopWatch w;
        CertifyRequest sreq = req;
        KernelSpec ks = sc.kernel;
        ks.degree = n;
        sreq.kernel = make_kernel(G, ks);
        sreq.band = sreq.kernel.k.degree();
        sreq.grid_size = G->is_finite() ? 0 : sc.sweep_m_factor * std::max(n, 1);
        sreq.id = sc.id + "/sweep" + std::to_string(n);
        const UcpCertificate c = certify(sreq);
        rep.sweep.push_back(detail::row_from(c, n, c.grid_size, w.ms()));
      }
    } else {
      Scenario local = sc;
      if (!local.action_file.empty()) load_finite_space(local.action_file, local.action);

      GroupPtr x_model;
      if (local.action.on_torus()) x_model = make_torus_group(local.action.dimension);
      std::vector<SpaceFunction> F;
      for (const auto& fs : local.functions)
        F.push_back(detail::resolve_space_function(local.action, x_model, fs));

      ActionCertifyOptions opt;
      opt.epsilon = local.epsilon;
      opt.delta = local.delta;
      opt.probe_resolution = local.probe_resolution;
      opt.basepoint = local.basepoint;
      opt.kernel = local.kernel;
      opt.grid_size = local.grid_size;
      opt.grid_profile = local.grid_profile;
      opt.grid_autorefine = local.grid_autorefine;
      opt.tol_grid = local.tol_grid;
      opt.strategy = local.strategy;
      opt.seed = local.seed;
      opt.max_dim = local.max_dim;
      opt.id = local.id;
      const ActionCertificate ac = certify_action(local.action, F, opt);
      rep.certificates.push_back(ac.combined);
      for (const auto& b : ac.blocks) rep.certificates.push_back(b);
      rep.action.present = true;
      rep.action.delta = ac.cover.delta;
      rep.action.achieved_density = ac.cover.achieved_density;
      rep.action.restriction_bound = ac.restriction_bound;
      rep.action.basepoint_count = static_cast<int>(
          ac.cover.orbits.size());
      for (const auto& b : ac.blocks) rep.action.block_dims.push_back(b.dim_e);
    }
  } catch (const Error& e) {
    rep.errors.push_back({e.code(), e.what()});
  } catch (const std::exception& e) {
    rep.errors.push_back({"internal", e.what()});
  }
  rep.wall_ms = total.ms();
  return rep;
}

/// 0: every certificate and sweep row passed; 1: some check failed; 2: the
/// run ended in an error.
inline int exit_code(const Report& rep) {
  if (!rep.errors.empty()) return 2;
  for (const auto& c : rep.certificates)
    if (!c.pass) return 1;
  for (const auto& r : rep.sweep)
    if (!r.pass) return 1;
  return 0;
}

namespace detail {

inline nlohmann::ordered_json certificate_json(const UcpCertificate& c) {
  nlohmann::ordered_json j;
  j["id"] = c.id;
  j["pass"] = c.pass;
  j["eps_conv"] = c.eps_conv;
  j["eps_dist"] = c.eps_dist;
  j["vu_gap"] = c.vu_gap;
  j["eps_total"] = c.eps_total;
  j["defect_mult"] = c.defect_mult;
  j["defect_equiv"] = c.defect_equiv;
  j["defect_norm"] = c.defect_norm;
  j["bound_mult"] = c.bound_mult;
  j["bound_equiv"] = c.bound_equiv;
  j["bound_norm"] = c.bound_norm;
  j["bound_vu"] = c.bound_vu;
  j["deviation"] = c.deviation;
  j["sigma_min"] = c.sigma_min;
  j["positivity"] = c.positivity;
  j["kernel"] = {{"kind", c.kernel_kind},
                 {"degree", c.kernel_degree},
                 {"radius", c.kernel_radius},
                 {"band_error", c.kernel_band_error}};
  j["band"] = c.band;
  j["grid"] = {{"size", c.grid_size},
               {"dim_e", c.dim_e},
               {"perturbed", c.grid_perturbed},
               {"seed", c.grid_seed},
               {"amplitude", c.grid_amplitude}};
  j["strategy"] = c.strategy;
  j["seed"] = c.seed;
  j["tol_grid"] = c.tol_grid;
  j["epsilon_target"] = c.epsilon_target;
  j["gamma_samples"] = c.gamma_sample_count;
  j["family_size"] = c.family_size;
  j["normalization_factors"] = c.normalization_factors;
  j["equiv_caveat"] = c.equiv_caveat;
  return j;
}

inline std::string format_double(double v, const char* fmt = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace detail

inline std::string emit_json(const Report& rep) {
  nlohmann::ordered_json j;
  j["version"] = rep.version;
  j["input_hash"] = rep.input_hash;
  j["certificates"] = nlohmann::ordered_json::array();
  for (const auto& c : rep.certificates) j["certificates"].push_back(detail::certificate_json(c));
  j["sweep"] = nlohmann::ordered_json::array();
  for (const auto& r : rep.sweep) {
    nlohmann::ordered_json row;
    row["degree"] = r.degree;
    row["m"] = r.m;
    row["eps_conv"] = r.eps_conv;
    row["eps_dist"] = r.eps_dist;
    row["vu_gap"] = r.vu_gap;
    row["defect_mult"] = r.defect_mult;
    row["defect_equiv"] = r.defect_equiv;
    row["defect_norm"] = r.defect_norm;
    row["pass"] = r.pass;
    j["sweep"].push_back(row);
  }
  j["errors"] = nlohmann::ordered_json::array();
  for (const auto& e : rep.errors) j["errors"].push_back({{"code", e.code}, {"message", e.message}});
  if (rep.action.present) {
    j["action"] = {{"delta", rep.action.delta},
                   {"achieved_density", rep.action.achieved_density},
                   {"restriction_bound", rep.action.restriction_bound},
                   {"basepoints", rep.action.basepoint_count},
                   {"block_dims", rep.action.block_dims}};
  }
  return j.dump(2) + "\n";
}

inline std::string emit_csv(const Report& rep) {
  std::ostringstream out;
  out << "degree,m,eps_conv,eps_dist,vu_gap,defect_mult,defect_equiv,defect_norm,pass,wall_ms\n";
  for (const auto& r : rep.sweep) {
    out << r.degree << ',' << r.m << ',' << detail::format_double(r.eps_conv) << ','
        << detail::format_double(r.eps_dist) << ',' << detail::format_double(r.vu_gap) << ','
        << detail::format_double(r.defect_mult) << ',' << detail::format_double(r.defect_equiv)
        << ',' << detail::format_double(r.defect_norm) << ',' << (r.pass ? "true" : "false") << ','
        << detail::format_double(r.wall_ms, "%.3f") << "\n";
  }
  return out.str();
}

inline std::string emit_human(const Report& rep) {
  std::ostringstream out;
  out << "quasidiag " << rep.version << "  (" << rep.input_hash << ")\n";
  for (const auto& c : rep.certificates) {
    out << "\ncertificate " << c.id << ": " << (c.pass ? "PASS" : "FAIL") << "\n";
    out << "  kernel " << c.kernel_kind << " degree " << c.kernel_degree << ", band " << c.band
        << ", grid " << (c.grid_perturbed ? "perturbed" : "uniform") << " m=" << c.grid_size
        << " (|E|=" << c.dim_e << "), strategy " << c.strategy << "\n";
    out << "  eps_conv=" << detail::format_double(c.eps_conv, "%.6g")
        << "  eps_dist=" << detail::format_double(c.eps_dist, "%.6g")
        << "  vu_gap=" << detail::format_double(c.vu_gap, "%.6g")
        << "  eps_total=" << detail::format_double(c.eps_total, "%.6g") << "\n";
    out << "  defect_mult=" << detail::format_double(c.defect_mult, "%.6g") << " (bound "
        << detail::format_double(c.bound_mult, "%.6g") << ")\n";
    out << "  defect_equiv=" << detail::format_double(c.defect_equiv, "%.6g") << " (bound "
        << detail::format_double(c.bound_equiv, "%.6g") << ")\n";
    out << "  defect_norm=" << detail::format_double(c.defect_norm, "%.6g") << " (bound "
        << detail::format_double(c.bound_norm, "%.6g") << ")\n";
    out << "  ||V-U||=" << detail::format_double(c.vu_gap, "%.6g") << " (bound "
        << detail::format_double(c.bound_vu, "%.6g") << "), ||S-I||="
        << detail::format_double(c.deviation, "%.6g") << "\n";
  }
  if (rep.action.present) {
    out << "\naction cover: " << rep.action.basepoint_count
        << " basepoint(s), achieved density "
        << detail::format_double(rep.action.achieved_density, "%.6g") << " (delta "
        << detail::format_double(rep.action.delta, "%.6g") << "), restriction bound "
        << detail::format_double(rep.action.restriction_bound, "%.6g") << "\n";
  }
  if (!rep.sweep.empty()) {
    out << "\n  degree      m     eps_conv     eps_dist       vu_gap  defect_mult defect_equiv"
           "  defect_norm  pass   wall_ms\n";
    for (const auto& r : rep.sweep) {
      out << std::setw(8) << r.degree << std::setw(7) << r.m;
      for (double v : {r.eps_conv, r.eps_dist, r.vu_gap, r.defect_mult, r.defect_equiv,
                       r.defect_norm})
        out << std::setw(13) << detail::format_double(v, "%.5g");
      out << std::setw(6) << (r.pass ? "yes" : "NO") << std::setw(10)
          << detail::format_double(r.wall_ms, "%.1f") << "\n";
    }
  }
  for (const auto& e : rep.errors) out << "\nerror [" << e.code << "] " << e.message << "\n";
  out << "\nresult: "
      << (exit_code(rep) == 0 ? "all checks passed"
                              : exit_code(rep) == 1 ? "some checks FAILED" : "ERROR")
      << "  (wall " << detail::format_double(rep.wall_ms, "%.1f") << " ms)\n";
  return out.str();
}

inline std::string emit(const Report& rep, const std::string& format) {
  if (format == "json") return emit_json(rep);
  if (format == "csv") return emit_csv(rep);
  if (format == "human") return emit_human(rep);
  throw ValidationError("format", "unknown report format: " + format);
}

}  // namespace qd
