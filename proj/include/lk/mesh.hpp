#pragma once

#include "lk/core.hpp"
#include "lk/topology.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

namespace lk {

/// Unordered edge stored with a < b; a -> b is the edge's reference axis.
struct EdgeKey {
  VertexId a;
  VertexId b;

  static EdgeKey of(VertexId u, VertexId v) { return u < v ? EdgeKey{u, v} : EdgeKey{v, u}; }
  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

inline std::string to_string(const EdgeKey& e) {
  return "[" + std::to_string(e.a.value) + "," + std::to_string(e.b.value) + "]";
}

using TwistAssignment = std::map<EdgeKey, std::int64_t>;

/// The occurrence-th appearance of an edge on a face boundary.
struct NullSide {
  FaceId face;
  EdgeKey edge;
  int occurrence = 0;

  friend auto operator<=>(const NullSide&, const NullSide&) = default;
};

/// Read-only view of one slot.
struct SlotView {
  FaceId face;
  int position = 0;
  EdgeKey edge;
  int direction = 1;  // +1 when the face walks the edge a -> b
  int radial_index = 0;
  bool null = false;
};

namespace detail {

/// Reference point that places a slot around its edge: the face centroid,
/// or for an edge the face visits several times, the centroid of the
/// boundary run between this occurrence and the next.
inline Vec3 slot_reference_point(std::span<const Vec3> vertices, const std::vector<VertexId>& face, int k) {
  const int n = static_cast<int>(face.size());
  const auto key = EdgeKey::of(face[k], face[(k + 1) % n]);
  int next = -1;
  for (int step = 1; step < n; ++step) {
    const int j = (k + step) % n;
    if (EdgeKey::of(face[j], face[(j + 1) % n]) == key) {
      next = j;
      break;
    }
  }
  Vec3 sum = Vec3::Zero();
  if (next < 0) {
    for (const auto v : face) sum += vertices[v.index()];
    return sum / static_cast<double>(n);
  }
  int count = 0;
  for (int j = (k + 1) % n;; j = (j + 1) % n) {
    sum += vertices[face[j].index()];
    ++count;
    if (j == next) break;
  }
  return sum / static_cast<double>(count);
}

/// Unit vectors (u, w) spanning the plane perpendicular to axis, with
/// u x w = axis.
inline std::pair<Vec3, Vec3> perpendicular_frame(const Vec3& axis) {
  Eigen::Index smallest = 0;
  axis.cwiseAbs().minCoeff(&smallest);
  Vec3 helper = Vec3::Zero();
  helper[smallest] = 1.0;
  const Vec3 u = (helper - helper.dot(axis) * axis).normalized();
  return {u, axis.cross(u)};
}

}  // namespace detail

/// Counterclockwise (right-handed about low -> high) angle of each reference
/// point around the segment. Throws GeometryError naming `what` when a point
/// lies on the axis.
inline std::vector<double> radial_angles(const Vec3& low, const Vec3& high, std::span<const Vec3> points,
                                         const std::function<std::string(std::size_t)>& what) {
  const Vec3 d = high - low;
  const double len = d.norm();
  if (!(len > 0.0)) throw GeometryError("zero-length edge");
  const Vec3 axis = d / len;
  const auto [u, w] = detail::perpendicular_frame(axis);
  const Vec3 mid = 0.5 * (low + high);
  std::vector<double> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3 r = points[i] - mid;
    const Vec3 perp = r - r.dot(axis) * axis;
    if (perp.norm() <= 1e-9 * len) throw GeometryError("degenerate face geometry: " + what(i));
    double ang = std::atan2(perp.dot(w), perp.dot(u));
    if (ang < 0) ang += 2.0 * std::numbers::pi;
    out.push_back(ang);
  }
  return out;
}

/// Sorts slot ids by angle (ties by id) and rotates the cycle so the
/// smallest id comes first, which makes the order independent of the frame.
inline std::vector<SlotId> cyclic_order(std::vector<SlotId> ids, const std::vector<double>& angles) {
  std::vector<std::size_t> idx(ids.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
    if (std::abs(angles[x] - angles[y]) > 1e-12) return angles[x] < angles[y];
    return ids[x] < ids[y];
  });
  std::vector<SlotId> sorted;
  sorted.reserve(ids.size());
  for (auto i : idx) sorted.push_back(ids[i]);
  const auto first = std::min_element(sorted.begin(), sorted.end());
  std::rotate(sorted.begin(), first, sorted.end());
  return sorted;
}

/// Immutable mesh combinatorics shared between label revisions.
struct MeshScaffold {
  std::vector<Vec3> vertices;
  std::vector<std::vector<VertexId>> faces;
  std::vector<EdgeKey> edges;  // sorted; position is the EdgeIndex
  SlotComplex complex;

  [[nodiscard]] std::optional<EdgeIndex> find_edge(EdgeKey key) const {
    const auto it = std::lower_bound(edges.begin(), edges.end(), key);
    if (it == edges.end() || *it != key) return std::nullopt;
    return EdgeIndex{static_cast<std::size_t>(it - edges.begin())};
  }
};

/// Vertices, faces as vertex cycles, the edge table with radial orders, and
/// the twist and null labels. Copies share the scaffold; all `with_*`
/// members return a relabelled copy.
class LabeledMesh {
 public:
  LabeledMesh() = default;

  /// Validates faces, builds the edge table and radial orders. Throws
  /// ValidationError on bad input, naming the offending face.
  static LabeledMesh build(std::vector<Vec3> vertices, std::vector<std::vector<VertexId>> faces) {
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      if (!vertices[v].allFinite()) throw ValidationError("vertex " + std::to_string(v) + " is not finite");
    }
    for (std::size_t f = 0; f < faces.size(); ++f) {
      const auto& face = faces[f];
      const auto name = "face " + std::to_string(f);
      if (face.size() < 3) throw ValidationError(name + " has fewer than 3 vertices");
      for (std::size_t k = 0; k < face.size(); ++k) {
        const auto v = face[k];
        if (!v.valid() || v.index() >= vertices.size()) {
          throw ValidationError(name + " references unknown vertex " + std::to_string(v.value));
        }
        if (v == face[(k + 1) % face.size()]) throw ValidationError(name + " repeats a vertex consecutively");
      }
    }

    auto scaffold = std::make_shared<MeshScaffold>();
    scaffold->vertices = std::move(vertices);
    scaffold->faces = std::move(faces);

    std::vector<SlotRecord> slots;
    std::vector<EdgeKey> slot_keys;
    for (std::size_t f = 0; f < scaffold->faces.size(); ++f) {
      const auto& face = scaffold->faces[f];
      for (std::size_t k = 0; k < face.size(); ++k) {
        const auto u = face[k];
        const auto v = face[(k + 1) % face.size()];
        SlotRecord rec;
        rec.face = FaceId{f};
        rec.position = static_cast<int>(k);
        rec.forward = u < v;
        slots.push_back(rec);
        slot_keys.push_back(EdgeKey::of(u, v));
      }
    }
    std::set<EdgeKey> unique(slot_keys.begin(), slot_keys.end());
    scaffold->edges.assign(unique.begin(), unique.end());

    std::vector<std::vector<SlotId>> incident(scaffold->edges.size());
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const auto e = *scaffold->find_edge(slot_keys[s]);
      slots[s].edge = e;
      incident[e.index()].push_back(SlotId{s});
    }

    std::vector<std::vector<SlotId>> radial(scaffold->edges.size());
    for (std::size_t e = 0; e < scaffold->edges.size(); ++e) {
      const auto key = scaffold->edges[e];
      const auto& ids = incident[e];
      std::vector<Vec3> refs;
      for (const auto s : ids) {
        const auto& rec = slots[s.index()];
        refs.push_back(detail::slot_reference_point(scaffold->vertices, scaffold->faces[rec.face.index()],
                                                    rec.position));
      }
      std::vector<double> angles;
      try {
        angles = radial_angles(scaffold->vertices[key.a.index()], scaffold->vertices[key.b.index()], refs,
                               [&](std::size_t i) {
                                 return "face " + std::to_string(slots[ids[i].index()].face.value) + " at edge " +
                                        to_string(key);
                               });
      } catch (const GeometryError& err) {
        throw ValidationError(err.what());
      }
      radial[e] = cyclic_order(ids, angles);
    }
    scaffold->complex = SlotComplex(std::move(slots), std::move(radial));

    LabeledMesh mesh;
    mesh.labels_ = Labels::zero(scaffold->complex);
    mesh.scaffold_ = std::move(scaffold);
    return mesh;
  }

  [[nodiscard]] const MeshScaffold& scaffold() const { return *scaffold_; }
  [[nodiscard]] const SlotComplex& complex() const { return scaffold_->complex; }
  [[nodiscard]] const Labels& labels() const { return labels_; }

  [[nodiscard]] std::span<const Vec3> vertices() const { return scaffold_->vertices; }
  [[nodiscard]] const std::vector<std::vector<VertexId>>& faces() const { return scaffold_->faces; }
  [[nodiscard]] std::span<const EdgeKey> edges() const { return scaffold_->edges; }
  [[nodiscard]] std::size_t vertex_count() const { return scaffold_->vertices.size(); }
  [[nodiscard]] std::size_t face_count() const { return scaffold_->faces.size(); }
  [[nodiscard]] std::size_t edge_count() const { return scaffold_->edges.size(); }
  [[nodiscard]] std::size_t slot_count() const { return complex().slot_count(); }

  [[nodiscard]] std::optional<EdgeIndex> find_edge(EdgeKey key) const { return scaffold_->find_edge(key); }
  [[nodiscard]] EdgeIndex edge_index(EdgeKey key) const {
    auto e = find_edge(key);
    if (!e) throw ValidationError("no edge " + to_string(key));
    return *e;
  }
  [[nodiscard]] const EdgeKey& edge_key(EdgeIndex e) const { return scaffold_->edges[e.index()]; }
  [[nodiscard]] int degree(EdgeIndex e) const { return complex().degree(e); }
  [[nodiscard]] int degree(EdgeKey key) const { return degree(edge_index(key)); }
  [[nodiscard]] std::int64_t twist(EdgeIndex e) const { return labels_.twist[e.index()]; }
  [[nodiscard]] std::int64_t twist(EdgeKey key) const { return twist(edge_index(key)); }
  [[nodiscard]] bool is_null(SlotId s) const { return labels_.null[s.index()] != 0; }

  [[nodiscard]] SlotView slot(SlotId s) const {
    const auto& rec = complex().slot(s);
    return {rec.face, rec.position, edge_key(rec.edge), rec.forward ? 1 : -1, rec.radial_index, is_null(s)};
  }

  /// Non-zero twists keyed by edge.
  [[nodiscard]] TwistAssignment twists() const {
    TwistAssignment out;
    for (std::size_t e = 0; e < edge_count(); ++e) {
      if (labels_.twist[e] != 0) out[scaffold_->edges[e]] = labels_.twist[e];
    }
    return out;
  }

  /// Slot of the given face-side. Throws ValidationError if absent.
  [[nodiscard]] SlotId slot_of(const NullSide& side) const {
    if (!side.face.valid() || side.face.index() >= face_count()) {
      throw ValidationError("null side references unknown face " + std::to_string(side.face.value));
    }
    const auto& face = faces()[side.face.index()];
    int seen = 0;
    for (std::size_t k = 0; k < face.size(); ++k) {
      if (EdgeKey::of(face[k], face[(k + 1) % face.size()]) == side.edge) {
        if (seen == side.occurrence) return complex().face_slot(side.face, static_cast<int>(k));
        ++seen;
      }
    }
    throw ValidationError("face " + std::to_string(side.face.value) + " has no occurrence " +
                          std::to_string(side.occurrence) + " of edge " + to_string(side.edge));
  }

  [[nodiscard]] NullSide side_of(SlotId s) const {
    const auto& rec = complex().slot(s);
    const auto key = edge_key(rec.edge);
    const auto& face = faces()[rec.face.index()];
    int occurrence = 0;
    for (int k = 0; k < rec.position; ++k) {
      if (EdgeKey::of(face[k], face[(k + 1) % face.size()]) == key) ++occurrence;
    }
    return {rec.face, key, occurrence};
  }

  [[nodiscard]] std::vector<NullSide> null_sides() const {
    std::vector<NullSide> out;
    for (std::size_t s = 0; s < slot_count(); ++s) {
      if (labels_.null[s] != 0) out.push_back(side_of(SlotId{s}));
    }
    return out;
  }

  [[nodiscard]] LabeledMesh with_twist(EdgeKey key, std::int64_t t) const {
    LabeledMesh out = *this;
    out.labels_.twist[edge_index(key).index()] = t;
    return out;
  }

  /// Sets the listed edges; other edges keep their labels.
  [[nodiscard]] LabeledMesh with_twists(const TwistAssignment& assignment) const {
    LabeledMesh out = *this;
    for (const auto& [key, t] : assignment) out.labels_.twist[edge_index(key).index()] = t;
    return out;
  }

  [[nodiscard]] LabeledMesh with_all_twists(std::int64_t t) const {
    LabeledMesh out = *this;
    std::fill(out.labels_.twist.begin(), out.labels_.twist.end(), t);
    return out;
  }

  [[nodiscard]] LabeledMesh with_twist_vector(std::vector<std::int64_t> per_edge) const {
    if (per_edge.size() != edge_count()) throw PreconditionError("twist vector length mismatch");
    LabeledMesh out = *this;
    out.labels_.twist = std::move(per_edge);
    return out;
  }

  [[nodiscard]] LabeledMesh with_null(SlotId s, bool flag = true) const {
    LabeledMesh out = *this;
    out.labels_.null[s.index()] = flag ? 1 : 0;
    return out;
  }

  [[nodiscard]] LabeledMesh with_null(const NullSide& side) const { return with_null(slot_of(side)); }

  [[nodiscard]] LabeledMesh without_nulls() const {
    LabeledMesh out = *this;
    std::fill(out.labels_.null.begin(), out.labels_.null.end(), 0);
    return out;
  }

  /// Same combinatorics and labels over new vertex positions.
  [[nodiscard]] LabeledMesh with_positions(std::vector<Vec3> positions) const {
    auto out = build(std::move(positions), faces());
    out.labels_ = labels_;
    return out;
  }

  /// Label warnings: twists on boundary edges act as the identity.
  [[nodiscard]] std::vector<std::string> label_warnings() const {
    std::vector<std::string> out;
    for (std::size_t e = 0; e < edge_count(); ++e) {
      if (complex().degree(EdgeIndex{e}) == 1 && labels_.twist[e] != 0) {
        out.push_back("twist " + std::to_string(labels_.twist[e]) + " on boundary edge " +
                      to_string(scaffold_->edges[e]) + " acts as identity");
      }
    }
    return out;
  }

 private:
  std::shared_ptr<const MeshScaffold> scaffold_;
  Labels labels_;
};

/// Slots of an edge in radial order.
inline std::vector<SlotId> radial_order(const LabeledMesh& mesh, EdgeKey edge) {
  const auto span = mesh.complex().radial(mesh.edge_index(edge));
  return {span.begin(), span.end()};
}

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  std::map<int, int> edge_degree_histogram;
  int edge_connected_components = 0;
  int vertex_connected_components = 0;

  [[nodiscard]] bool ok() const { return errors.empty(); }
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

  std::size_t count() {
    std::size_t n = 0;
    for (std::size_t i = 0; i < parent_.size(); ++i) n += find(i) == i ? 1 : 0;
    return n;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Degree histogram, face components through shared edges and through
/// shared vertices, and label warnings. Parts that touch only at vertices
/// cannot be joined by strands, so that case is flagged.
inline ValidationReport connectivity_report(const LabeledMesh& mesh) {
  ValidationReport report;
  const auto& cx = mesh.complex();
  for (std::size_t e = 0; e < mesh.edge_count(); ++e) ++report.edge_degree_histogram[cx.degree(EdgeIndex{e})];

  detail::DisjointSets by_edge(mesh.face_count());
  for (std::size_t e = 0; e < mesh.edge_count(); ++e) {
    const auto order = cx.radial(EdgeIndex{e});
    for (std::size_t i = 1; i < order.size(); ++i) {
      by_edge.unite(cx.slot(order[0]).face.index(), cx.slot(order[i]).face.index());
    }
  }
  detail::DisjointSets by_vertex(mesh.face_count());
  std::vector<int> first_face(mesh.vertex_count(), -1);
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    for (const auto v : mesh.faces()[f]) {
      auto& ff = first_face[v.index()];
      if (ff < 0) {
        ff = static_cast<int>(f);
      } else {
        by_vertex.unite(static_cast<std::size_t>(ff), f);
      }
    }
  }
  report.edge_connected_components = static_cast<int>(by_edge.count());
  report.vertex_connected_components = static_cast<int>(by_vertex.count());
  if (report.edge_connected_components > report.vertex_connected_components) {
    report.warnings.push_back("vertex-hinged parts: " + std::to_string(report.edge_connected_components) +
                              " edge-connected components but " +
                              std::to_string(report.vertex_connected_components) +
                              " vertex-connected; strands cannot join parts that share only vertices");
  }
  for (auto& w : mesh.label_warnings()) report.warnings.push_back(std::move(w));
  return report;
}

struct DualLink {
  FaceId a;
  FaceId b;
  EdgeIndex edge;
};

/// Faces as nodes. A degree-2 edge gives one link; a degree-K edge (K > 2)
/// links each consecutive radial pair, cyclically.
struct DualGraph {
  std::size_t node_count = 0;
  std::vector<DualLink> links;
};

inline DualGraph dual_graph(const LabeledMesh& mesh) {
  DualGraph g;
  g.node_count = mesh.face_count();
  const auto& cx = mesh.complex();
  for (std::size_t e = 0; e < mesh.edge_count(); ++e) {
    const auto order = cx.radial(EdgeIndex{e});
    const auto k = order.size();
    if (k < 2) continue;
    const std::size_t links = k == 2 ? 1 : k;
    for (std::size_t i = 0; i < links; ++i) {
      g.links.push_back({cx.slot(order[i]).face, cx.slot(order[(i + 1) % k]).face, EdgeIndex{e}});
    }
  }
  return g;
}

}  // namespace lk
