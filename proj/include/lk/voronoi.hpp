#pragma once

// Bravais lattices and periodic Voronoi cells by half-space clipping.

#include "lk/core.hpp"

#include <Eigen/LU>

#include <array>
#include <cmath>
#include <numbers>
#include <optional>

namespace lk {

using Shift = Eigen::Vector3i;

[[nodiscard]] inline bool lex_less(const Shift& a, const Shift& b) {
  return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
}

[[nodiscard]] inline bool lex_positive(const Shift& a) { return lex_less(Shift::Zero(), a); }

/// Basis vectors are the columns. Planar lattices use the xy plane and keep
/// e_z as the third column so the matrix stays invertible.
class Lattice {
 public:
  Lattice() = default;

  Lattice(int dim, const std::vector<Vec3>& vectors) : dim_(dim) {
    if (dim != 2 && dim != 3) throw ValidationError("lattice dimension must be 2 or 3");
    if (static_cast<int>(vectors.size()) != dim) throw ValidationError("basis needs one vector per dimension");
    basis_ = Eigen::Matrix3d::Identity();
    for (int i = 0; i < dim; ++i) {
      basis_.col(i) = vectors[static_cast<std::size_t>(i)];
      if (dim == 2 && vectors[static_cast<std::size_t>(i)].z() != 0.0) {
        throw ValidationError("planar basis vectors must lie in the xy plane");
      }
    }
    double scale = 1.0;
    for (int i = 0; i < dim; ++i) scale *= basis_.col(i).norm();
    if (!(std::abs(basis_.determinant()) > 1e-9 * scale)) throw ValidationError("degenerate lattice basis");
    inverse_ = basis_.inverse();
  }

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] const Eigen::Matrix3d& basis() const { return basis_; }
  [[nodiscard]] Vec3 vector(int i) const { return basis_.col(i); }
  [[nodiscard]] Vec3 to_fractional(const Vec3& p) const { return inverse_ * p; }
  [[nodiscard]] Vec3 to_cartesian(const Vec3& f) const { return basis_ * f; }
  [[nodiscard]] Vec3 translation(const Shift& s) const { return basis_ * s.cast<double>(); }

  /// Mean basis vector length; the scale for geometric tolerances.
  [[nodiscard]] double scale() const {
    double sum = 0.0;
    for (int i = 0; i < dim_; ++i) sum += basis_.col(i).norm();
    return sum / dim_;
  }

 private:
  int dim_ = 3;
  Eigen::Matrix3d basis_ = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d inverse_ = Eigen::Matrix3d::Identity();
};

/// sq, hex, cP, hP, oF, cF, cI.
inline Lattice lattice_preset(std::string_view name) {
  const double r3 = std::sqrt(3.0) / 2.0;
  if (name == "sq") return {2, {{1, 0, 0}, {0, 1, 0}}};
  if (name == "hex") return {2, {{1, 0, 0}, {0.5, r3, 0}}};
  if (name == "cP") return {3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  if (name == "hP") return {3, {{1, 0, 0}, {0.5, r3, 0}, {0, 0, 1}}};
  if (name == "cI") return {3, {{-0.5, 0.5, 0.5}, {0.5, -0.5, 0.5}, {0.5, 0.5, -0.5}}};
  if (name == "cF") return {3, {{0, 0.5, 0.5}, {0.5, 0, 0.5}, {0.5, 0.5, 0}}};
  if (name == "oF") {
    const double a = 1.0;
    const double b = 1.2;
    const double c = 1.5;
    return {3, {{0, b / 2, c / 2}, {a / 2, 0, c / 2}, {a / 2, b / 2, 0}}};
  }
  throw ValidationError("unknown lattice preset '" + std::string(name) + "'");
}

inline const std::vector<std::string>& lattice_preset_names() {
  static const std::vector<std::string> names = {"sq", "hex", "cP", "hP", "oF", "cF", "cI"};
  return names;
}

/// Generator image (generator index, lattice shift).
struct SiteRef {
  int generator = 0;
  Shift shift = Shift::Zero();

  friend bool operator==(const SiteRef& a, const SiteRef& b) {
    return a.generator == b.generator && a.shift == b.shift;
  }
};

/// Boundary piece of a Voronoi cell: a polygon for N=3, a segment for N=2,
/// with the site on its far side.
struct CellFacet {
  std::vector<Vec3> points;
  SiteRef neighbor;
};

struct VoronoiCell {
  int generator = 0;
  Vec3 site = Vec3::Zero();
  std::vector<CellFacet> facets;  // N=2: consecutive boundary segments in counterclockwise order
};

namespace detail {

constexpr int kBoxLabel = -1;

inline void drop_near_duplicates(std::vector<Vec3>& pts, double tol) {
  std::vector<Vec3> out;
  for (const auto& p : pts) {
    if (out.empty() || (out.back() - p).norm() > tol) out.push_back(p);
  }
  while (out.size() > 1 && (out.front() - out.back()).norm() <= tol) out.pop_back();
  pts = std::move(out);
}

/// Removes vertices where the polygon runs straight on.
inline void drop_collinear(std::vector<Vec3>& pts, double tol) {
  bool changed = true;
  while (changed && pts.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& a = pts[(i + pts.size() - 1) % pts.size()];
      const auto& b = pts[i];
      const auto& c = pts[(i + 1) % pts.size()];
      const Vec3 ac = c - a;
      const double len = ac.norm();
      if (len > 0 && (b - a).cross(ac).norm() / len <= tol) {
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
}

/// Polygon ordered counterclockwise about normal.
inline std::vector<Vec3> order_about(std::vector<Vec3> pts, const Vec3& normal) {
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  Eigen::Index axis = 0;
  normal.cwiseAbs().minCoeff(&axis);
  Vec3 helper = Vec3::Zero();
  helper[axis] = 1.0;
  const Vec3 u = normal.cross(helper).normalized();
  const Vec3 w = normal.normalized().cross(u);
  std::sort(pts.begin(), pts.end(), [&](const Vec3& a, const Vec3& b) {
    return std::atan2((a - c).dot(w), (a - c).dot(u)) < std::atan2((b - c).dot(w), (b - c).dot(u));
  });
  return pts;
}

struct PolyFace {
  std::vector<Vec3> points;
  SiteRef label;
};

/// Convex polyhedron clipped by half-spaces n.x <= c. Each face keeps the
/// site whose bisector produced it.
class ConvexPolyhedron {
 public:
  ConvexPolyhedron(const Vec3& center, double half, double tol) : tol_(tol) {
    for (int axis = 0; axis < 3; ++axis) {
      for (const double sign : {-1.0, 1.0}) {
        Vec3 n = Vec3::Zero();
        n[axis] = sign;
        const int u = (axis + 1) % 3;
        const int v = (axis + 2) % 3;
        std::vector<Vec3> pts;
        for (const auto& [a, b] : {std::pair{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}) {
          Vec3 p = center;
          p[axis] += sign * half;
          p[u] += a * half;
          p[v] += b * half;
          pts.push_back(p);
        }
        faces_.push_back({order_about(pts, n), SiteRef{kBoxLabel, Shift::Zero()}});
      }
    }
  }

  void clip(const Vec3& n, double c, const SiteRef& label) {
    std::vector<PolyFace> kept;
    std::vector<Vec3> cut;
    bool touched = false;
    for (const auto& face : faces_) {
      std::vector<Vec3> out;
      const auto& pts = face.points;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& a = pts[i];
        const auto& b = pts[(i + 1) % pts.size()];
        const double da = n.dot(a) - c;
        const double db = n.dot(b) - c;
        if (da <= tol_) {
          out.push_back(a);
          if (da >= -tol_) cut.push_back(a);
        }
        if ((da < -tol_ && db > tol_) || (da > tol_ && db < -tol_)) {
          const Vec3 x = a + (b - a) * (da / (da - db));
          out.push_back(x);
          cut.push_back(x);
        }
        if (da > tol_) touched = true;
      }
      drop_near_duplicates(out, tol_);
      if (out.size() >= 3) kept.push_back({std::move(out), face.label});
    }
    if (!touched) return;
    std::vector<Vec3> unique;
    for (const auto& p : cut) {
      if (std::none_of(unique.begin(), unique.end(), [&](const Vec3& q) { return (p - q).norm() <= tol_; })) {
        unique.push_back(p);
      }
    }
    if (unique.size() >= 3) {
      auto cap = order_about(unique, n);
      drop_collinear(cap, tol_);
      if (cap.size() >= 3) kept.push_back({std::move(cap), label});
    }
    faces_ = std::move(kept);
  }

  [[nodiscard]] const std::vector<PolyFace>& faces() const { return faces_; }

 private:
  double tol_;
  std::vector<PolyFace> faces_;
};

struct PolyEdge {
  Vec3 start;
  SiteRef label;
};

/// Convex polygon in the xy plane, stored as labelled directed edges.
class ConvexPolygon {
 public:
  ConvexPolygon(const Vec3& center, double half, double tol) : tol_(tol) {
    for (const auto& [a, b] : {std::pair{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}) {
      edges_.push_back({center + Vec3(a * half, b * half, 0.0), SiteRef{kBoxLabel, Shift::Zero()}});
    }
  }

  void clip(const Vec3& n, double c, const SiteRef& label) {
    std::vector<PolyEdge> out;
    const auto m = edges_.size();
    for (std::size_t i = 0; i < m; ++i) {
      const auto& a = edges_[i];
      const auto& b = edges_[(i + 1) % m];
      const double da = n.dot(a.start) - c;
      const double db = n.dot(b.start) - c;
      const Vec3 x = a.start + (b.start - a.start) * (da / (da - db));
      if (da <= tol_) {
        if (db > tol_) {
          if (da >= -tol_) {
            out.push_back({a.start, label});
          } else {
            out.push_back({a.start, a.label});
            out.push_back({x, label});
          }
        } else {
          out.push_back(a);
        }
      } else if (db < -tol_) {
        out.push_back({x, a.label});
      }
    }
    std::vector<PolyEdge> clean;
    for (const auto& e : out) {
      if (!clean.empty() && (clean.back().start - e.start).norm() <= tol_) {
        clean.back().label = e.label;
        continue;
      }
      clean.push_back(e);
    }
    while (clean.size() > 1 && (clean.front().start - clean.back().start).norm() <= tol_) clean.pop_back();
    edges_ = std::move(clean);
  }

  [[nodiscard]] const std::vector<PolyEdge>& edges() const { return edges_; }

 private:
  double tol_;
  std::vector<PolyEdge> edges_;
};

}  // namespace detail

/// Generators reduced into the fundamental domain [0,1)^N in fractional
/// coordinates. Throws on coincident generators.
inline std::vector<Vec3> reduce_generators(const Lattice& lattice, const std::vector<Vec3>& generators) {
  if (generators.empty()) throw ValidationError("at least one generator is required");
  std::vector<Vec3> out;
  for (const auto& g : generators) {
    if (!g.allFinite()) throw ValidationError("generator is not finite");
    if (lattice.dim() == 2 && g.z() != 0.0) throw ValidationError("planar generators must have z = 0");
    Vec3 f = lattice.to_fractional(g);
    for (int i = 0; i < lattice.dim(); ++i) {
      f[i] -= std::floor(f[i] + 1e-9);
      if (std::abs(f[i]) < 1e-9) f[i] = 0.0;
    }
    const Vec3 p = lattice.to_cartesian(f);
    for (const auto& q : out) {
      Vec3 d = lattice.to_fractional(p - q);
      for (int i = 0; i < lattice.dim(); ++i) d[i] -= std::round(d[i]);
      if (lattice.to_cartesian(d).norm() < 1e-7 * lattice.scale()) throw ValidationError("coincident generators");
    }
    out.push_back(p);
  }
  return out;
}

/// Voronoi cell of every generator against all generator images with
/// shifts in [-reach, reach]^N.
inline std::vector<VoronoiCell> voronoi_cells(const Lattice& lattice, const std::vector<Vec3>& generators,
                                              int reach = 2) {
  const auto sites = reduce_generators(lattice, generators);
  const int n = lattice.dim();
  const double scale = lattice.scale();
  const double tol = 1e-9 * scale;
  double half = 0.0;
  for (int i = 0; i < n; ++i) half += lattice.vector(i).norm();
  half *= 2.0;

  struct Image {
    Vec3 point;
    SiteRef ref;
  };
  std::vector<Image> images;
  const int lo = -reach;
  const int hi = reach;
  for (int x = lo; x <= hi; ++x) {
    for (int y = lo; y <= hi; ++y) {
      for (int z = (n == 3 ? lo : 0); z <= (n == 3 ? hi : 0); ++z) {
        const Shift s(x, y, z);
        for (std::size_t k = 0; k < sites.size(); ++k) {
          images.push_back({sites[k] + lattice.translation(s), SiteRef{static_cast<int>(k), s}});
        }
      }
    }
  }

  std::vector<VoronoiCell> cells(sites.size());
  for (std::size_t j = 0; j < sites.size(); ++j) {
    const Vec3 g = sites[j];
    auto order = images;
    std::erase_if(order, [&](const Image& im) { return im.ref == SiteRef{static_cast<int>(j), Shift::Zero()}; });
    std::stable_sort(order.begin(), order.end(), [&](const Image& a, const Image& b) {
      return (a.point - g).squaredNorm() < (b.point - g).squaredNorm();
    });
    VoronoiCell& cell = cells[j];
    cell.generator = static_cast<int>(j);
    cell.site = g;
    if (n == 3) {
      detail::ConvexPolyhedron poly(g, half, tol);
      for (const auto& im : order) {
        const Vec3 normal = im.point - g;
        poly.clip(normal, 0.5 * (im.point.squaredNorm() - g.squaredNorm()), im.ref);
      }
      for (auto face : poly.faces()) {
        if (face.label.generator == detail::kBoxLabel) throw GeometryError("Voronoi cell not closed; increase reach");
        detail::drop_collinear(face.points, tol * 10);
        cell.facets.push_back({std::move(face.points), face.label});
      }
    } else {
      detail::ConvexPolygon poly(g, half, tol);
      for (const auto& im : order) {
        const Vec3 normal = im.point - g;
        poly.clip(normal, 0.5 * (im.point.squaredNorm() - g.squaredNorm()), im.ref);
      }
      const auto& edges = poly.edges();
      // Merge consecutive collinear edges with the same neighbour.
      std::vector<detail::PolyEdge> merged;
      for (const auto& e : edges) {
        if (!merged.empty() && merged.back().label == e.label) continue;
        merged.push_back(e);
      }
      if (merged.size() > 1 && merged.front().label == merged.back().label) merged.erase(merged.begin());
      for (std::size_t i = 0; i < merged.size(); ++i) {
        const auto& e = merged[i];
        if (e.label.generator == detail::kBoxLabel) throw GeometryError("Voronoi cell not closed; increase reach");
        cell.facets.push_back({{e.start, merged[(i + 1) % merged.size()].start}, e.label});
      }
    }
  }
  return cells;
}

}  // namespace lk
