#pragma once

//
// Module      : scenario
// Description : line-oriented scenario files ([section], key = value, '#'
//               comments) describing a translation or action certification
//               run, plus the finite-space table loader
//

#include <array>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "quasidiag/action.hpp"
#include "quasidiag/errors.hpp"
#include "quasidiag/group.hpp"
#include "quasidiag/kernel.hpp"
#include "quasidiag/unitarize.hpp"

namespace qd {

/// A function request, resolved against the concrete group/space at run time.
struct FunctionSpec {
  std::string kind;  // "const" | "exp" | "coeffs" | "values"
  cdouble constant{1.0, 0.0};
  std::array<int, 2> freq{0, 0};
  int freq_dims = 1;
  std::vector<std::pair<std::array<int, 2>, cdouble>> coeffs;
  std::vector<cdouble> values;
};

struct Scenario {
  std::string id = "scenario";
  std::string target = "translation";  // "translation" | "action"
  // translation group
  std::string group_kind = "torus";  // "torus" | "cyclic" | "table"
  int group_dimension = 1;
  int group_order = 0;
  std::string group_table_path;
  // shared knobs
  double epsilon = 0.5;
  BasisStrategy strategy = BasisStrategy::cholesky;
  std::uint64_t seed = 42;
  int max_dim = 512;
  double tol_grid = 0.05;
  std::vector<int> sweep;
  int sweep_m_factor = 4;
  KernelSpec kernel;
  int grid_size = 0;
  GridProfile grid_profile;
  bool grid_autorefine = true;
  std::vector<FunctionSpec> functions;
  // action target
  IsometricActionDescriptor action;
  std::array<double, 2> basepoint{0.0, 0.0};
  double delta = 0.5;
  int probe_resolution = 256;
  std::string action_file;

  std::string raw_text;  // exact input bytes, hashed into reports
};

namespace detail {

inline std::string trimmed(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trimmed(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trimmed(cur));
  return out;
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline double parse_real(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ParseError(line, "trailing characters in number: " + s);
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (...) {
    throw ParseError(line, "expected a number, got: " + s);
  }
}

inline long parse_int(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw ParseError(line, "trailing characters in integer: " + s);
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (...) {
    throw ParseError(line, "expected an integer, got: " + s);
  }
}

inline bool parse_bool(const std::string& s, int line) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ParseError(line, "expected a boolean, got: " + s);
}

/// "name(arg1, arg2)" -> {name, args}; bare "name" has no args.
inline std::pair<std::string, std::vector<std::string>> parse_call(const std::string& s,
                                                                   int line) {
  const auto open = s.find('(');
  if (open == std::string::npos) return {trimmed(s), {}};
  if (s.back() != ')') throw ParseError(line, "unbalanced parentheses: " + s);
  const std::string name = trimmed(s.substr(0, open));
  const std::string inner = s.substr(open + 1, s.size() - open - 2);
  if (trimmed(inner).empty()) return {name, {}};
  return {name, split(inner, ',')};
}

/// Complex entry "re" or "re:im".
inline cdouble parse_complex(const std::string& s, int line) {
  const auto parts = split(s, ':');
  if (parts.size() == 1) return cdouble(parse_real(parts[0], line), 0.0);
  if (parts.size() == 2) return cdouble(parse_real(parts[0], line), parse_real(parts[1], line));
  throw ParseError(line, "expected re or re:im, got: " + s);
}

inline FunctionSpec parse_function(const std::string& value, int line) {
  FunctionSpec fs;
  auto [name, args] = parse_call(value, line);
  if (name == "const") {
    fs.kind = "const";
    if (args.size() == 1) fs.constant = parse_complex(args[0], line);
    else if (!args.empty()) throw ParseError(line, "const takes at most one argument");
    return fs;
  }
  if (name == "exp") {
    fs.kind = "exp";
    if (args.empty() || args.size() > 2) throw ParseError(line, "exp takes one or two frequencies");
    fs.freq[0] = static_cast<int>(parse_int(args[0], line));
    if (args.size() == 2) {
      fs.freq[1] = static_cast<int>(parse_int(args[1], line));
      fs.freq_dims = 2;
    }
    return fs;
  }
  if (name == "coeffs") {
    fs.kind = "coeffs";
    // entries "j:re[:im]" or "j1,j2:re[:im]" separated by ';'
    for (const auto& entry : split(value.substr(value.find('(') + 1,
                                                value.rfind(')') - value.find('(') - 1),
                                   ';')) {
      if (entry.empty()) continue;
      const auto colon = entry.find(':');
      if (colon == std::string::npos) throw ParseError(line, "coeffs entry needs j:value");
      const auto freq_str = trimmed(entry.substr(0, colon));
      std::array<int, 2> j{0, 0};
      const auto freq_parts = split(freq_str, ',');
      j[0] = static_cast<int>(parse_int(freq_parts[0], line));
      if (freq_parts.size() == 2) j[1] = static_cast<int>(parse_int(freq_parts[1], line));
      else if (freq_parts.size() > 2) throw ParseError(line, "too many frequency components");
      fs.coeffs.push_back({j, parse_complex(trimmed(entry.substr(colon + 1)), line)});
    }
    if (fs.coeffs.empty()) throw ParseError(line, "coeffs needs at least one entry");
    return fs;
  }
  if (name == "values") {
    fs.kind = "values";
    for (const auto& a : args) fs.values.push_back(parse_complex(a, line));
    if (fs.values.empty()) throw ParseError(line, "values needs at least one entry");
    return fs;
  }
  throw ParseError(line, "unknown function spec: " + name);
}

inline RotationComponent parse_rotation(const std::string& tok, int line) {
  auto [name, args] = parse_call(tok, line);
  RotationComponent rc;
  if (name == "rational") {
    if (args.size() != 2) throw ParseError(line, "rational takes (p, q)");
    rc.rational = true;
    rc.p = parse_int(args[0], line);
    rc.q = parse_int(args[1], line);
    if (rc.q <= 0) throw ValidationError("action.rotate", "rational denominator must be positive");
    const long g = std::gcd(std::abs(rc.p), rc.q);
    if (g > 1) {
      rc.p /= g;
      rc.q /= g;
    }
    rc.p %= rc.q;
    if (rc.p < 0) rc.p += rc.q;
    return rc;
  }
  if (name == "turns") {
    if (args.size() != 1) throw ParseError(line, "turns takes one value");
    rc.rational = false;
    rc.turns = parse_real(args[0], line);
    return rc;
  }
  throw ParseError(line, "unknown rotation spec: " + name);
}

}  // namespace detail

/// Finite-space table file: first line the point count n, then n rows of n
/// distances, then one permutation line per generator.
inline void load_finite_space(const std::string& path, IsometricActionDescriptor& a) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open finite-space file: " + path);
  std::string line;
  int lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = detail::trimmed(line);
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next_line()) throw ParseError(lineno, "finite-space file is empty");
  const int n = static_cast<int>(detail::parse_int(line, lineno));
  if (n < 1) throw ParseError(lineno, "point count must be positive");
  a.space_size = n;
  a.metric.assign(n, std::vector<double>(n, 0.0));
  for (int r = 0; r < n; ++r) {
    if (!next_line()) throw ParseError(lineno, "missing metric row");
    const auto toks = detail::split_ws(line);
    if (static_cast<int>(toks.size()) != n) throw ParseError(lineno, "metric row needs n entries");
    for (int c = 0; c < n; ++c) a.metric[r][c] = detail::parse_real(toks[c], lineno);
  }
  a.generators.clear();
  while (next_line()) {
    const auto toks = detail::split_ws(line);
    if (static_cast<int>(toks.size()) != n)
      throw ParseError(lineno, "permutation line needs n entries");
    ActionGenerator g;
    for (const auto& t : toks) g.permutation.push_back(static_cast<int>(detail::parse_int(t, lineno)));
    a.generators.push_back(std::move(g));
  }
  if (a.generators.empty()) throw ParseError(lineno, "finite-space file needs a generator line");
}

inline Scenario parse_scenario(const std::string& text) {
  Scenario sc;
  sc.raw_text = text;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  bool saw_epsilon = false;

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trimmed(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(lineno, "unterminated section header");
      section = detail::trimmed(line.substr(1, line.size() - 2));
      if (section != "scenario" && section != "kernel" && section != "grid" &&
          section != "functions" && section != "action")
        throw ParseError(lineno, "unknown section: [" + section + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    const std::string key = detail::trimmed(line.substr(0, eq));
    const std::string value = detail::trimmed(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError(lineno, "empty key or value");

    if (section == "scenario") {
      if (key == "id") {
        sc.id = value;
      } else if (key == "target") {
        if (value != "translation" && value != "action")
          throw ParseError(lineno, "unknown target: " + value);
        sc.target = value;
      } else if (key == "group") {
        auto [name, args] = detail::parse_call(value, lineno);
        if (name == "torus") {
          sc.group_kind = "torus";
          sc.group_dimension = args.empty() ? 1 : static_cast<int>(detail::parse_int(args[0], lineno));
        } else if (name == "cyclic") {
          if (args.size() != 1) throw ParseError(lineno, "cyclic takes the order");
          sc.group_kind = "cyclic";
          sc.group_order = static_cast<int>(detail::parse_int(args[0], lineno));
        } else if (name == "table") {
          if (args.size() != 1) throw ParseError(lineno, "table takes a path");
          sc.group_kind = "table";
          sc.group_table_path = args[0];
        } else {
          throw ParseError(lineno, "unknown group: " + name);
        }
      } else if (key == "epsilon") {
        sc.epsilon = detail::parse_real(value, lineno);
        saw_epsilon = true;
      } else if (key == "strategy") {
        if (value == "sqrt") sc.strategy = BasisStrategy::sqrt;
        else if (value == "cholesky") sc.strategy = BasisStrategy::cholesky;
        else throw ParseError(lineno, "unknown strategy: " + value);
      } else if (key == "seed") {
        sc.seed = static_cast<std::uint64_t>(detail::parse_int(value, lineno));
      } else if (key == "max_dim") {
        sc.max_dim = static_cast<int>(detail::parse_int(value, lineno));
      } else if (key == "tol_grid") {
        sc.tol_grid = detail::parse_real(value, lineno);
      } else if (key == "sweep") {
        for (const auto& t : detail::split_ws(value))
          sc.sweep.push_back(static_cast<int>(detail::parse_int(t, lineno)));
      } else if (key == "sweep_m_factor") {
        sc.sweep_m_factor = static_cast<int>(detail::parse_int(value, lineno));
      } else {
        throw ParseError(lineno, "unknown key in [scenario]: " + key);
      }
    } else if (section == "kernel") {
      if (key == "type") {
        if (value != "fejer" && value != "built" && value != "delta")
          throw ParseError(lineno, "unknown kernel type: " + value);
        sc.kernel.type = value;
      } else if (key == "degree" || key == "band") {
        sc.kernel.degree = static_cast<int>(detail::parse_int(value, lineno));
      } else if (key == "radius") {
        sc.kernel.radius = detail::parse_real(value, lineno);
      } else if (key == "target_eps") {
        sc.kernel.target_eps = detail::parse_real(value, lineno);
      } else {
        throw ParseError(lineno, "unknown key in [kernel]: " + key);
      }
    } else if (section == "grid") {
      if (key == "profile") {
        if (value == "uniform") sc.grid_profile.perturbed = false;
        else if (value == "perturbed") sc.grid_profile.perturbed = true;
        else throw ParseError(lineno, "unknown grid profile: " + value);
      } else if (key == "size") {
        sc.grid_size = static_cast<int>(detail::parse_int(value, lineno));
      } else if (key == "seed") {
        sc.grid_profile.seed = static_cast<std::uint64_t>(detail::parse_int(value, lineno));
      } else if (key == "amplitude") {
        sc.grid_profile.amplitude = detail::parse_real(value, lineno);
      } else if (key == "autorefine") {
        sc.grid_autorefine = detail::parse_bool(value, lineno);
      } else {
        throw ParseError(lineno, "unknown key in [grid]: " + key);
      }
    } else if (section == "functions") {
      if (key != "f") throw ParseError(lineno, "unknown key in [functions]: " + key);
      sc.functions.push_back(detail::parse_function(value, lineno));
    } else if (section == "action") {
      if (key == "kind") {
        if (value != "torus_rotation" && value != "finite_space")
          throw ParseError(lineno, "unknown action kind: " + value);
        sc.action.kind = value;
      } else if (key == "dimension") {
        sc.action.dimension = static_cast<int>(detail::parse_int(value, lineno));
      } else if (key == "rotate") {
        ActionGenerator g;
        for (const auto& t : detail::split_ws(value))
          g.rotation.push_back(detail::parse_rotation(t, lineno));
        sc.action.generators.push_back(std::move(g));
      } else if (key == "minimal") {
        sc.action.declared_minimal = detail::parse_bool(value, lineno);
      } else if (key == "basepoint") {
        const auto toks = detail::split_ws(value);
        if (toks.empty() || toks.size() > 2)
          throw ParseError(lineno, "basepoint takes one or two angles");
        sc.basepoint[0] = detail::parse_real(toks[0], lineno);
        if (toks.size() == 2) sc.basepoint[1] = detail::parse_real(toks[1], lineno);
      } else if (key == "delta") {
        sc.delta = detail::parse_real(value, lineno);
      } else if (key == "probe_resolution") {
        sc.probe_resolution = static_cast<int>(detail::parse_int(value, lineno));
      } else if (key == "file") {
        sc.action_file = value;
        sc.action.kind = sc.action.kind.empty() ? "finite_space" : sc.action.kind;
      } else {
        throw ParseError(lineno, "unknown key in [action]: " + key);
      }
    } else {
      throw ParseError(lineno, "key outside any section: " + key);
    }
  }

  // Field-level validation (syntax was fine, values must make sense).
  if (sc.epsilon <= 0.0 || sc.epsilon >= 1.0) throw ValidationError("epsilon");
  (void)saw_epsilon;
  if (sc.functions.empty()) throw ValidationError("functions", "scenario provides no functions");
  if (sc.tol_grid < 0.0 || sc.tol_grid >= 1.0) throw ValidationError("tol_grid");
  if (sc.max_dim < 1) throw ValidationError("max_dim");
  if (sc.grid_profile.amplitude < 0.0 || sc.grid_profile.amplitude > 0.25)
    throw ValidationError("grid.amplitude");
  if (sc.target == "translation") {
    if (sc.group_kind == "torus" && sc.group_dimension != 1 && sc.group_dimension != 2)
      throw ValidationError("group", "torus dimension must be 1 or 2");
    if (sc.group_kind == "cyclic" && sc.group_order < 1)
      throw ValidationError("group", "cyclic order must be positive");
  } else {
    if (sc.action.kind.empty()) throw ValidationError("action.kind", "action target needs [action]");
    if (sc.delta <= 0.0) throw ValidationError("action.delta");
    if (sc.probe_resolution < 8) throw ValidationError("action.probe_resolution");
  }
  if (sc.kernel.type == "built" &&
      (sc.kernel.target_eps <= 0.0 || sc.kernel.target_eps >= 1.0))
    throw ValidationError("kernel.target_eps");
  for (int n : sc.sweep)
    if (n < 0) throw ValidationError("sweep", "sweep degrees must be non-negative");
  if (!sc.sweep.empty() && sc.sweep_m_factor < 1) throw ValidationError("sweep_m_factor");
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace qd
