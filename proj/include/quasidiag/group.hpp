#pragma once

//
// Module      : group
// Description : compact group models (finite by multiplication table, torus T^d)
//               with exact Haar quadrature
//

#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "quasidiag/errors.hpp"

namespace qd {

using cdouble = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Reduce an angle into [0, 2*pi).
inline double reduce_angle(double a) {
  a = std::fmod(a, two_pi);
  if (a < 0.0) a += two_pi;
  if (a >= two_pi) a -= two_pi;
  return a;
}

enum class GroupKind { finite, torus };

/// Element of a compact group model. Finite elements are table indices,
/// torus elements are angle tuples (second slot unused when d = 1).
struct GroupElement {
  int index = 0;
  std::array<double, 2> angles{0.0, 0.0};
};

class CompactGroupModel;
using GroupPtr = std::shared_ptr<const CompactGroupModel>;

/// Immutable group model. Finite groups carry a full multiplication table
/// with element 0 as the identity; the torus carries only its dimension.
class CompactGroupModel {
 public:
  static CompactGroupModel finite(std::vector<std::vector<int>> table) {
    CompactGroupModel g;
    g.kind_ = GroupKind::finite;
    g.table_ = std::move(table);
    g.validate_table();
    g.order_ = static_cast<int>(g.table_.size());
    g.build_inverses();
    return g;
  }

  static CompactGroupModel torus(int dimension) {
    if (dimension < 1 || dimension > 2)
      throw ValidationError("group", "torus dimension must be 1 or 2");
    CompactGroupModel g;
    g.kind_ = GroupKind::torus;
    g.dimension_ = dimension;
    return g;
  }

  GroupKind kind() const { return kind_; }
  bool is_finite() const { return kind_ == GroupKind::finite; }
  int order() const { return order_; }
  int dimension() const { return dimension_; }
  const std::vector<std::vector<int>>& table() const { return table_; }

  GroupElement identity() const { return GroupElement{}; }

  GroupElement element(int index) const {
    GroupElement e;
    e.index = index;
    return e;
  }

  GroupElement point(double a0, double a1 = 0.0) const {
    GroupElement e;
    e.angles = {reduce_angle(a0), dimension_ == 2 ? reduce_angle(a1) : 0.0};
    return e;
  }

  GroupElement multiply(const GroupElement& a, const GroupElement& b) const {
    if (kind_ == GroupKind::finite) return element(table_[a.index][b.index]);
    return point(a.angles[0] + b.angles[0], a.angles[1] + b.angles[1]);
  }

  GroupElement inverse(const GroupElement& a) const {
    if (kind_ == GroupKind::finite) return element(inverse_[a.index]);
    return point(-a.angles[0], -a.angles[1]);
  }

  /// Structural equality: used to guard mixed-group arithmetic.
  bool same_as(const CompactGroupModel& o) const {
    if (kind_ != o.kind_) return false;
    if (kind_ == GroupKind::torus) return dimension_ == o.dimension_;
    return table_ == o.table_;
  }

 private:
  void validate_table() {
    const int m = static_cast<int>(table_.size());
    if (m == 0) throw NotAGroup("empty table");
    for (const auto& row : table_) {
      if (static_cast<int>(row.size()) != m) throw NotAGroup("table not square");
      for (int v : row)
        if (v < 0 || v >= m) throw NotAGroup("entry out of range");
    }
    for (int b = 0; b < m; ++b)
      if (table_[0][b] != b || table_[b][0] != b) throw NotAGroup("identity (element 0)");
    // Latin-square property gives cancellation; with associativity and the
    // identity it yields inverses, so no separate inverse axiom is checked.
    std::vector<char> seen(m);
    for (int a = 0; a < m; ++a) {
      std::fill(seen.begin(), seen.end(), 0);
      for (int b = 0; b < m; ++b) seen[table_[a][b]] = 1;
      for (int v = 0; v < m; ++v)
        if (!seen[v]) throw NotAGroup("row cancellation");
      std::fill(seen.begin(), seen.end(), 0);
      for (int b = 0; b < m; ++b) seen[table_[b][a]] = 1;
      for (int v = 0; v < m; ++v)
        if (!seen[v]) throw NotAGroup("column cancellation");
    }
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c)
          if (table_[table_[a][b]][c] != table_[a][table_[b][c]])
            throw NotAGroup("associativity");
  }

  void build_inverses() {
    const int m = order_;
    inverse_.assign(m, 0);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        if (table_[a][b] == 0) {
          inverse_[a] = b;
          break;
        }
  }

  GroupKind kind_ = GroupKind::torus;
  int order_ = 0;
  int dimension_ = 1;
  std::vector<std::vector<int>> table_;
  std::vector<int> inverse_;
};

inline GroupPtr make_finite_group(std::vector<std::vector<int>> table) {
  return std::make_shared<const CompactGroupModel>(CompactGroupModel::finite(std::move(table)));
}

inline GroupPtr make_torus_group(int dimension) {
  return std::make_shared<const CompactGroupModel>(CompactGroupModel::torus(dimension));
}

/// Cyclic group Z/m with the natural addition table.
inline GroupPtr make_cyclic_group(int m) {
  if (m < 1) throw ValidationError("group", "cyclic order must be positive");
  std::vector<std::vector<int>> t(m, std::vector<int>(m));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) t[a][b] = (a + b) % m;
  return make_finite_group(std::move(t));
}

/// Plain-text multiplication table: first line the order m, then m lines of
/// m space-separated element indices.
inline GroupPtr load_finite_group(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open group table file: " + path);
  int m = 0;
  if (!(in >> m) || m <= 0) throw ParseError("group table file: bad order line");
  std::vector<std::vector<int>> t(m, std::vector<int>(m));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (!(in >> t[a][b])) throw ParseError("group table file: truncated table");
  return make_finite_group(std::move(t));
}

/// Nodes and weights for integration against Haar measure. Finite groups get
/// the exact uniform sum over all elements (resolution ignored); the torus
/// gets the uniform lattice with `resolution` points per dimension, which
/// integrates trigonometric polynomials of degree < resolution exactly.
struct QuadratureScheme {
  std::vector<GroupElement> nodes;
  std::vector<double> weights;
  int resolution = 0;
};

inline QuadratureScheme haar_quadrature(const CompactGroupModel& G, int resolution) {
  QuadratureScheme q;
  if (G.is_finite()) {
    const int m = G.order();
    q.resolution = m;
    q.nodes.reserve(m);
    q.weights.assign(m, 1.0 / m);
    for (int a = 0; a < m; ++a) q.nodes.push_back(G.element(a));
    return q;
  }
  if (resolution < 1) throw ValidationError("quadrature", "resolution must be positive");
  q.resolution = resolution;
  const int d = G.dimension();
  if (d == 1) {
    q.nodes.reserve(resolution);
    q.weights.assign(resolution, 1.0 / resolution);
    for (int j = 0; j < resolution; ++j) q.nodes.push_back(G.point(two_pi * j / resolution));
  } else {
    const int n2 = resolution * resolution;
    q.nodes.reserve(n2);
    q.weights.assign(n2, 1.0 / n2);
    for (int j0 = 0; j0 < resolution; ++j0)
      for (int j1 = 0; j1 < resolution; ++j1)
        q.nodes.push_back(G.point(two_pi * j0 / resolution, two_pi * j1 / resolution));
  }
  return q;
}

}  // namespace qd
