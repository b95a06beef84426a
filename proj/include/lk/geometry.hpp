#pragma once

// Geometric realization of strands: inset face paths joined by helical
// blends around edges, tube sweeps, OBJ export, and Gauss linking numbers.

#include "lk/lkm.hpp"
#include "lk/strands.hpp"

#include <cstdio>
#include <fstream>
#include <numbers>

namespace lk {

struct RealizationParams {
  double inset = 0.25;             // fraction toward the face centroid
  int helix_samples = 8;           // per quarter turn
  double tube_radius = 0.0;        // 0 selects 0.03 x mean edge length
  int tube_sides = 12;
  double edge_blend_length = 0.3;  // fraction of the edge
  double two_sided_offset = 0.08;  // normal offset for paired faces, x mean edge length

  void validate() const {
    if (!(inset > 0.0 && inset < 1.0)) throw ValidationError("inset must lie in (0,1)");
    if (helix_samples < 1) throw ValidationError("helix_samples must be positive");
    if (!(tube_radius >= 0.0)) throw ValidationError("tube_radius must be positive");
    if (tube_sides < 3) throw ValidationError("tube_sides must be at least 3");
    if (!(edge_blend_length > 0.0 && edge_blend_length < 0.5)) {
      throw ValidationError("edge_blend_length must lie in (0,0.5)");
    }
    if (!(two_sided_offset >= 0.0)) throw ValidationError("two_sided_offset must be non-negative");
  }
};

struct StrandCurve {
  int id = 0;
  bool closed = true;
  int color = 0;
  std::vector<Vec3> points;  // closed curves do not repeat the first point
};

struct StrandGeometry {
  std::vector<StrandCurve> components;
  double mean_edge_length = 0.0;
};

namespace detail {

inline Vec3 newell_normal(const std::vector<Vec3>& pts) {
  Vec3 n = Vec3::Zero();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec3& a = pts[i];
    const Vec3& b = pts[(i + 1) % pts.size()];
    n += Vec3((a.y() - b.y()) * (a.z() + b.z()), (a.z() - b.z()) * (a.x() + b.x()), (a.x() - b.x()) * (a.y() + b.y()));
  }
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

/// Station of a slot around its edge in cylindrical coordinates about the
/// low -> high axis: axial(u) = a0 + a1 u, radius, angle.
struct Station {
  double a0 = 0.0;
  double a1 = 0.0;
  double radius = 0.0;
  double angle = 0.0;
};

struct EdgeFrame {
  Vec3 low;
  Vec3 axis;  // high - low
  Vec3 u;
  Vec3 w;
};

inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * std::numbers::pi);
  return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
}

inline void push_distinct(std::vector<Vec3>& out, const Vec3& p, double tol) {
  if (out.empty() || (out.back() - p).norm() > tol) out.push_back(p);
}

}  // namespace detail

/// Builds one polyline per strand component. Within a face the strand runs
/// on the boundary inset toward the centroid (faces paired with an opposite
/// twin are also pushed off along their normal); across an edge it turns
/// about the low -> high axis through the twist's angle, counterclockwise
/// for positive twists.
inline StrandGeometry realize(const LabeledMesh& mesh, const StrandSet& strands, const RealizationParams& params = {}) {
  params.validate();
  const auto& cx = mesh.complex();
  const auto& labels = mesh.labels();
  const auto& verts = mesh.vertices();
  const auto& faces = mesh.faces();

  StrandGeometry out;
  double total = 0.0;
  for (const auto& e : mesh.edges()) total += (verts[e.b.index()] - verts[e.a.index()]).norm();
  out.mean_edge_length = mesh.edge_count() > 0 ? total / static_cast<double>(mesh.edge_count()) : 1.0;
  const double tol = 1e-12 * std::max(1.0, out.mean_edge_length);

  std::map<std::vector<std::int32_t>, int> vertex_sets;
  for (const auto& f : faces) {
    std::vector<std::int32_t> key;
    for (const auto v : f) key.push_back(v.value);
    std::sort(key.begin(), key.end());
    ++vertex_sets[key];
  }
  std::vector<Vec3> centroid(faces.size());
  std::vector<Vec3> offset(faces.size(), Vec3::Zero());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    std::vector<Vec3> pts;
    for (const auto v : faces[f]) pts.push_back(verts[v.index()]);
    Vec3 c = Vec3::Zero();
    for (const auto& p : pts) c += p;
    centroid[f] = c / static_cast<double>(pts.size());
    std::vector<std::int32_t> key;
    for (const auto v : faces[f]) key.push_back(v.value);
    std::sort(key.begin(), key.end());
    if (vertex_sets[key] > 1) offset[f] = params.two_sided_offset * out.mean_edge_length * detail::newell_normal(pts);
  }

  std::vector<detail::EdgeFrame> frames(mesh.edge_count());
  for (std::size_t e = 0; e < mesh.edge_count(); ++e) {
    const auto key = mesh.edge_key(EdgeIndex{e});
    const Vec3 lo = verts[key.a.index()];
    const Vec3 axis = verts[key.b.index()] - lo;
    const auto [u, w] = detail::perpendicular_frame(axis.normalized());
    frames[e] = {lo, axis, u, w};
  }
  std::vector<detail::Station> stations(mesh.slot_count());
  for (std::size_t s = 0; s < mesh.slot_count(); ++s) {
    const auto& rec = cx.slot(SlotId{s});
    const auto& fr = frames[rec.edge.index()];
    // P(u) = (1 - inset)(low + u axis) + inset centroid + offset.
    const Vec3 fixed = params.inset * (centroid[rec.face.index()] - fr.low) + offset[rec.face.index()];
    const double len2 = fr.axis.squaredNorm();
    const Vec3 perp = fixed - (fixed.dot(fr.axis) / len2) * fr.axis;
    if (perp.norm() <= 1e-9 * std::sqrt(len2)) {
      throw GeometryError("degenerate face geometry: face " + std::to_string(rec.face.value));
    }
    stations[s] = {fixed.dot(fr.axis) / len2, 1.0 - params.inset, perp.norm(),
                   std::atan2(perp.dot(fr.w), perp.dot(fr.u))};
  }

  const auto point = [&](const detail::EdgeFrame& fr, double axial, double radius, double angle) -> Vec3 {
    return fr.low + axial * fr.axis + radius * (std::cos(angle) * fr.u + std::sin(angle) * fr.w);
  };

  // Polyline of a forward passage, low end to high end.
  const auto passage_points = [&](SlotId s) {
    const auto& rec = cx.slot(s);
    const auto e = rec.edge.index();
    const auto& fr = frames[e];
    const auto t = labels.twist[e];
    const auto k = static_cast<std::int64_t>(cx.degree(rec.edge));
    const SlotId target = cx.rotate(s, t);
    const auto& a = stations[s.index()];
    const auto& b = stations[target.index()];
    const double base = mod(t, k) == 0 ? 0.0 : detail::wrap_angle(b.angle - a.angle);
    const double turn = base + 2.0 * std::numbers::pi * static_cast<double>(floor_div(t, k));

    const double half = 0.5 * params.edge_blend_length;
    const double u0 = 0.5 - half;
    const double u1 = 0.5 + half;
    const int n = std::max(2, static_cast<int>(std::ceil(std::abs(turn) / (0.5 * std::numbers::pi) *
                                                         params.helix_samples)));
    std::vector<Vec3> pts;
    pts.push_back(point(fr, a.a0, a.radius, a.angle));
    for (int i = 0; i <= n; ++i) {
      const double lambda = static_cast<double>(i) / n;
      const double u = u0 + lambda * (u1 - u0);
      const double axial = (1.0 - lambda) * (a.a0 + a.a1 * u) + lambda * (b.a0 + b.a1 * u);
      const double radius = (1.0 - lambda) * a.radius + lambda * b.radius;
      pts.push_back(point(fr, axial, radius, a.angle + lambda * turn));
    }
    pts.push_back(point(fr, b.a0 + b.a1, b.radius, b.angle));
    return pts;
  };

  for (std::size_t c = 0; c < strands.components.size(); ++c) {
    const auto& comp = strands.components[c];
    StrandCurve curve;
    curve.id = static_cast<int>(c);
    curve.color = static_cast<int>(c);
    curve.closed = comp.closed();
    for (const auto& p : comp.passages) {
      auto pts = passage_points(p.slot);
      if (!p.forward) std::reverse(pts.begin(), pts.end());
      for (const auto& q : pts) detail::push_distinct(curve.points, q, tol);
    }
    if (curve.closed && curve.points.size() > 1 && (curve.points.front() - curve.points.back()).norm() <= tol) {
      curve.points.pop_back();
    }
    out.components.push_back(std::move(curve));
  }
  return out;
}

inline StrandGeometry realize(const LabeledMesh& mesh, const RealizationParams& params = {}) {
  return realize(mesh, trace(mesh), params);
}

namespace detail {

/// Squared distance between segments p0p1 and q0q1.
inline double segment_distance2(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
  const Vec3 d1 = p1 - p0;
  const Vec3 d2 = q1 - q0;
  const Vec3 r = p0 - q0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0;
  double t = 0.0;
  if (a <= 0.0 && e <= 0.0) return r.squaredNorm();
  if (a <= 0.0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 0.0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return (p0 + s * d1 - (q0 + t * d2)).squaredNorm();
}

inline std::size_t segment_count(const std::vector<Vec3>& pts, bool closed) {
  if (pts.size() < 2) return 0;
  return closed ? pts.size() : pts.size() - 1;
}

inline double curve_distance(const std::vector<Vec3>& a, bool ca, const std::vector<Vec3>& b, bool cb) {
  double best = std::numeric_limits<double>::infinity();
  const auto na = segment_count(a, ca);
  const auto nb = segment_count(b, cb);
  for (std::size_t i = 0; i < na; ++i) {
    const Vec3& p0 = a[i];
    const Vec3& p1 = a[(i + 1) % a.size()];
    for (std::size_t j = 0; j < nb; ++j) {
      best = std::min(best, segment_distance2(p0, p1, b[j], b[(j + 1) % b.size()]));
    }
  }
  return std::sqrt(best);
}

inline double diameter(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  Vec3 lo = a.front();
  Vec3 hi = a.front();
  for (const auto* pts : {&a, &b}) {
    for (const auto& p : *pts) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }
  return (hi - lo).norm();
}

/// Signed solid angle subtended by segment pair (a1a2, b1b2), as in the
/// quadrilateral construction of the discrete Gauss integral.
inline double pair_solid_angle(const Vec3& a1, const Vec3& a2, const Vec3& b1, const Vec3& b2) {
  const Vec3 r13 = b1 - a1;
  const Vec3 r14 = b2 - a1;
  const Vec3 r23 = b1 - a2;
  const Vec3 r24 = b2 - a2;
  std::array<Vec3, 4> n{r13.cross(r14), r14.cross(r24), r24.cross(r23), r23.cross(r13)};
  for (auto& v : n) {
    const double len = v.norm();
    if (len <= 1e-300) return 0.0;
    v /= len;
  }
  double omega = 0.0;
  for (int i = 0; i < 4; ++i) omega += std::asin(std::clamp(n[i].dot(n[(i + 1) % 4]), -1.0, 1.0));
  // Coplanar pairs subtend no solid angle; rounding must not pick a sign.
  const Vec3 da = a2 - a1;
  const Vec3 db = b2 - b1;
  const double orient = db.cross(da).dot(r13);
  const double scale = db.norm() * da.norm() * r13.norm();
  if (std::abs(orient) <= 1e-12 * scale) return 0.0;
  return orient > 0.0 ? omega : -omega;
}

}  // namespace detail

/// Gauss linking number of two closed polylines (first point not repeated),
/// positive for right-handed linking.
inline int linking_number(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.size() < 3 || b.size() < 3) throw PreconditionError("linking number needs closed polylines");
  const double diam = detail::diameter(a, b);
  if (detail::curve_distance(a, true, b, true) <= 1e-6 * diam) {
    throw GeometryError("curves touch or intersect within tolerance");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Vec3& a1 = a[i];
    const Vec3& a2 = a[(i + 1) % a.size()];
    for (std::size_t j = 0; j < b.size(); ++j) {
      sum += detail::pair_solid_angle(a1, a2, b[j], b[(j + 1) % b.size()]);
    }
  }
  const double lk = sum / (4.0 * std::numbers::pi);
  const double rounded = std::round(lk);
  if (std::abs(lk - rounded) >= 1e-6) {
    throw GeometryError("Gauss sum " + std::to_string(lk) + " is not within 1e-6 of an integer");
  }
  return static_cast<int>(rounded);
}

/// Pairwise linking numbers of the closed components. Open components get
/// zero rows and a warning.
inline std::vector<std::vector<int>> linking_matrix(const StrandGeometry& g, std::vector<std::string>* warnings = nullptr) {
  const auto n = g.components.size();
  std::vector<std::vector<int>> m(n, std::vector<int>(n, 0));
  for (const auto& c : g.components) {
    if (!c.closed) {
      const auto msg = "component " + std::to_string(c.id) + " is open; skipped in the linking matrix";
      log::warn(msg);
      if (warnings != nullptr) warnings->push_back(msg);
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (g.components[i].closed && g.components[j].closed) pairs.emplace_back(i, j);
    }
  }
  std::vector<int> values(pairs.size(), 0);
  parallel_for(pairs.size(), [&](std::size_t k) {
    values[k] = linking_number(g.components[pairs[k].first].points, g.components[pairs[k].second].points);
  });
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    m[pairs[k].first][pairs[k].second] = values[k];
    m[pairs[k].second][pairs[k].first] = values[k];
  }
  return m;
}

/// Smallest distance between points of distinct components.
inline double min_separation(const StrandGeometry& g) {
  const auto n = g.components.size();
  if (n < 2) throw PreconditionError("min_separation needs at least two components");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  std::vector<double> values(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t k) {
    const auto& a = g.components[pairs[k].first];
    const auto& b = g.components[pairs[k].second];
    values[k] = detail::curve_distance(a.points, a.closed, b.points, b.closed);
  });
  return *std::min_element(values.begin(), values.end());
}

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  /// V - E + F.
  [[nodiscard]] long euler_characteristic() const {
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& t : triangles) {
      for (int i = 0; i < 3; ++i) {
        const auto a = t[static_cast<std::size_t>(i)];
        const auto b = t[static_cast<std::size_t>((i + 1) % 3)];
        edges.emplace(std::min(a, b), std::max(a, b));
      }
    }
    return static_cast<long>(vertices.size()) - static_cast<long>(edges.size()) +
           static_cast<long>(triangles.size());
  }

  /// Every edge is used by exactly two triangles in opposite directions.
  [[nodiscard]] bool watertight() const {
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> directed;
    for (const auto& t : triangles) {
      for (int i = 0; i < 3; ++i) ++directed[{t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>((i + 1) % 3)]}];
    }
    for (const auto& [e, n] : directed) {
      if (n != 1) return false;
      const auto it = directed.find({e.second, e.first});
      if (it == directed.end() || it->second != 1) return false;
    }
    return true;
  }
};

/// Tube radius actually used: the requested one (or 0.03 x mean edge
/// length), reduced below half the strand separation when needed.
inline double effective_tube_radius(const StrandGeometry& g, const RealizationParams& params,
                                    std::vector<std::string>* warnings = nullptr) {
  double r = params.tube_radius > 0.0 ? params.tube_radius : 0.03 * g.mean_edge_length;
  if (g.components.size() >= 2) {
    const double sep = min_separation(g);
    if (!(sep > 2.0 * r)) {
      const double shrunk = 0.45 * sep;
      const auto msg = "tube radius reduced from " + std::to_string(r) + " to " + std::to_string(shrunk) +
                       " to keep strands apart";
      log::warn(msg);
      if (warnings != nullptr) warnings->push_back(msg);
      r = shrunk;
    }
  }
  if (!(r > 0.0)) throw GeometryError("strands touch; no positive tube radius separates them");
  return r;
}

/// Circular sweep with rotation-minimizing frames (double reflection).
/// Closed curves give a torus; the frame seam is removed by spreading the
/// closing rotation uniformly. Open curves are capped at both ends.
inline TriangleMesh tube(const StrandCurve& curve, double radius, int sides) {
  const auto& p = curve.points;
  const std::size_t n = p.size();
  if (n < 2 || (curve.closed && n < 3)) throw PreconditionError("tube needs a polyline with segments");
  const std::size_t segs = curve.closed ? n : n - 1;
  for (std::size_t i = 0; i < segs; ++i) {
    if ((p[(i + 1) % n] - p[i]).norm() <= 0.0) throw GeometryError("polyline repeats a point");
  }
  // Tangent at each point: average of adjacent segment directions.
  std::vector<Vec3> tangent(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 t = Vec3::Zero();
    if (curve.closed || i + 1 < n) t += (p[(i + 1) % n] - p[i]).normalized();
    if (curve.closed || i > 0) t += (p[i] - p[(i + n - 1) % n]).normalized();
    if (t.norm() < 1e-12) t = (p[(i + 1) % n] - p[i]).normalized();
    tangent[i] = t.normalized();
  }
  std::vector<Vec3> normal(n);
  normal[0] = detail::perpendicular_frame(tangent[0]).first;
  const auto step = [&](const Vec3& x0, const Vec3& t0, const Vec3& r0, const Vec3& x1, const Vec3& t1) {
    const Vec3 v1 = x1 - x0;
    const double c1 = v1.squaredNorm();
    const Vec3 rl = r0 - (2.0 / c1) * v1.dot(r0) * v1;
    const Vec3 tl = t0 - (2.0 / c1) * v1.dot(t0) * v1;
    const Vec3 v2 = t1 - tl;
    const double c2 = v2.squaredNorm();
    Vec3 r1 = c2 > 1e-24 ? Vec3(rl - (2.0 / c2) * v2.dot(rl) * v2) : rl;
    r1 -= r1.dot(t1) * t1;
    return Vec3(r1.normalized());
  };
  for (std::size_t i = 1; i < n; ++i) normal[i] = step(p[i - 1], tangent[i - 1], normal[i - 1], p[i], tangent[i]);

  std::vector<double> correction(n, 0.0);
  if (curve.closed) {
    const Vec3 back = step(p[n - 1], tangent[n - 1], normal[n - 1], p[0], tangent[0]);
    const Vec3 b0 = tangent[0].cross(normal[0]);
    const double mismatch = std::atan2(back.dot(b0), back.dot(normal[0]));
    for (std::size_t i = 0; i < n; ++i) correction[i] = -mismatch * static_cast<double>(i) / static_cast<double>(n);
  }

  TriangleMesh m;
  const auto ring = static_cast<std::uint32_t>(sides);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 binormal = tangent[i].cross(normal[i]);
    for (int k = 0; k < sides; ++k) {
      const double ang = 2.0 * std::numbers::pi * k / sides + correction[i];
      m.vertices.push_back(p[i] + radius * (std::cos(ang) * normal[i] + std::sin(ang) * binormal));
    }
  }
  const auto idx = [&](std::size_t i, std::uint32_t k) {
    return static_cast<std::uint32_t>((i % n) * ring + k % ring);
  };
  for (std::size_t i = 0; i < segs; ++i) {
    for (std::uint32_t k = 0; k < ring; ++k) {
      const auto a = idx(i, k);
      const auto b = idx(i, k + 1);
      const auto c = idx(i + 1, k + 1);
      const auto d = idx(i + 1, k);
      m.triangles.push_back({a, b, c});
      m.triangles.push_back({a, c, d});
    }
  }
  if (!curve.closed) {
    const auto start = static_cast<std::uint32_t>(m.vertices.size());
    m.vertices.push_back(p.front());
    m.vertices.push_back(p.back());
    for (std::uint32_t k = 0; k < ring; ++k) {
      m.triangles.push_back({start, idx(0, k + 1), idx(0, k)});
      m.triangles.push_back({start + 1, idx(n - 1, k), idx(n - 1, k + 1)});
    }
  }
  return m;
}

/// Deterministic colour for a component id (golden-ratio hue walk).
inline Vec3 palette_color(int id) {
  const double h = std::fmod(0.13 + 0.6180339887498949 * id, 1.0) * 6.0;
  const double s = 0.65;
  const double v = 0.9;
  const int i = static_cast<int>(std::floor(h)) % 6;
  const double f = h - std::floor(h);
  const double p = v * (1 - s);
  const double q = v * (1 - s * f);
  const double t = v * (1 - s * (1 - f));
  switch (i) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

namespace detail {

inline std::string fmt6(double x) {
  if (std::abs(x) < 5e-7) x = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

inline std::string fmt_vec(const Vec3& v) { return fmt6(v.x()) + " " + fmt6(v.y()) + " " + fmt6(v.z()); }

}  // namespace detail

struct ObjText {
  std::string obj;
  std::string mtl;
};

/// OBJ text with one group and material per component: tube triangles when
/// tubes are given, otherwise `l` polylines.
inline ObjText obj_text(const StrandGeometry& g, const std::vector<TriangleMesh>* tubes,
                        const std::string& mtl_name) {
  std::string obj = "mtllib " + mtl_name + "\n";
  std::string mtl;
  std::size_t base = 1;
  for (std::size_t c = 0; c < g.components.size(); ++c) {
    const auto& curve = g.components[c];
    const auto name = "strand_" + std::to_string(curve.id);
    mtl += "newmtl " + name + "\nKd " + detail::fmt_vec(palette_color(curve.color)) + "\n\n";
    obj += "g " + name + "\nusemtl " + name + "\n";
    if (tubes != nullptr) {
      const auto& t = (*tubes)[c];
      for (const auto& v : t.vertices) obj += "v " + detail::fmt_vec(v) + "\n";
      for (const auto& f : t.triangles) {
        obj += "f " + std::to_string(base + f[0]) + " " + std::to_string(base + f[1]) + " " +
               std::to_string(base + f[2]) + "\n";
      }
      base += t.vertices.size();
    } else {
      for (const auto& v : curve.points) obj += "v " + detail::fmt_vec(v) + "\n";
      obj += "l";
      for (std::size_t i = 0; i < curve.points.size(); ++i) obj += " " + std::to_string(base + i);
      if (curve.closed) obj += " " + std::to_string(base);
      obj += "\n";
      base += curve.points.size();
    }
  }
  return {obj, mtl};
}

/// Writes path (.obj) and a sibling .mtl.
inline void export_obj(const StrandGeometry& g, const std::vector<TriangleMesh>* tubes, const std::string& path) {
  const auto slash = path.find_last_of('/');
  const auto dir = slash == std::string::npos ? std::string{} : path.substr(0, slash + 1);
  auto stem = slash == std::string::npos ? path : path.substr(slash + 1);
  if (const auto dot = stem.rfind('.'); dot != std::string::npos) stem = stem.substr(0, dot);
  const auto text = obj_text(g, tubes, stem + ".mtl");
  write_text_file(path, text.obj);
  write_text_file(dir + stem + ".mtl", text.mtl);
}

/// {"components":[{"id","closed","color","points"}]} with points rounded to
/// six decimals.
inline ordered_json geometry_json(const StrandGeometry& g) {
  ordered_json doc;
  auto comps = ordered_json::array();
  for (const auto& c : g.components) {
    ordered_json entry;
    entry["id"] = c.id;
    entry["closed"] = c.closed;
    entry["color"] = c.color;
    auto pts = ordered_json::array();
    for (const auto& p : c.points) {
      auto q = ordered_json::array();
      for (int i = 0; i < 3; ++i) q.push_back(std::round(p[i] * 1e6) / 1e6 + 0.0);
      pts.push_back(std::move(q));
    }
    entry["points"] = std::move(pts);
    comps.push_back(std::move(entry));
  }
  doc["components"] = std::move(comps);
  return doc;
}

inline ordered_json matrix_json(const std::vector<std::vector<int>>& m) {
  auto out = ordered_json::array();
  for (const auto& row : m) out.push_back(row);
  return out;
}

}  // namespace lk
