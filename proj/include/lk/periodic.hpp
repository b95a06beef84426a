#pragma once

// Periodic scaffolds: a fundamental-domain cell complex whose vertex
// references carry lattice shifts, quotient strand tracing with closure
// offsets, and finite tiling.

#include "lk/lkm.hpp"
#include "lk/strands.hpp"
#include "lk/voronoi.hpp"

#include <numeric>

namespace lk {

/// Vertex class placed at vertex_position(vertex) + lattice * shift.
struct PeriodicRef {
  VertexId vertex;
  Shift shift = Shift::Zero();
};

/// Edge orbit under translation: from lo at shift 0 to hi at delta. lo < hi,
/// or lo == hi with delta lexicographically positive.
struct PeriodicEdgeKey {
  VertexId lo;
  VertexId hi;
  Shift delta = Shift::Zero();

  friend bool operator==(const PeriodicEdgeKey& a, const PeriodicEdgeKey& b) {
    return a.lo == b.lo && a.hi == b.hi && a.delta == b.delta;
  }
  friend bool operator<(const PeriodicEdgeKey& a, const PeriodicEdgeKey& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    if (a.hi != b.hi) return a.hi < b.hi;
    return lex_less(a.delta, b.delta);
  }
};

/// The two Voronoi cells a facet separates: (inner.generator, frame) and
/// (outer.generator, frame + outer.shift).
struct FaceCells {
  SiteRef inner;
  SiteRef outer;
};

class PeriodicMesh {
 public:
  PeriodicMesh() = default;

  static PeriodicMesh build(Lattice lattice, std::vector<Vec3> vertices, std::vector<std::vector<PeriodicRef>> faces,
                            std::vector<std::optional<FaceCells>> cells = {}) {
    PeriodicMesh pm;
    pm.lattice_ = std::move(lattice);
    const int n = pm.lattice_.dim();
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      if (!vertices[v].allFinite()) throw ValidationError("vertex " + std::to_string(v) + " is not finite");
    }
    if (cells.empty()) cells.resize(faces.size());
    if (cells.size() != faces.size()) throw PreconditionError("face cell list length mismatch");

    std::vector<SlotRecord> slots;
    std::vector<PeriodicEdgeKey> slot_keys;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      const auto& face = faces[f];
      const auto name = "face " + std::to_string(f);
      if (face.size() < 3) throw ValidationError(name + " has fewer than 3 vertices");
      for (std::size_t k = 0; k < face.size(); ++k) {
        const auto& a = face[k];
        const auto& b = face[(k + 1) % face.size()];
        if (!a.vertex.valid() || a.vertex.index() >= vertices.size()) {
          throw ValidationError(name + " references unknown vertex " + std::to_string(a.vertex.value));
        }
        if (n == 2 && a.shift.z() != 0) throw ValidationError(name + " has a z shift in a planar lattice");
        const Shift d = b.shift - a.shift;
        if (a.vertex == b.vertex && d.isZero()) throw ValidationError(name + " repeats a vertex consecutively");
        SlotRecord rec;
        rec.face = FaceId{f};
        rec.position = static_cast<int>(k);
        rec.forward = a.vertex < b.vertex || (a.vertex == b.vertex && lex_positive(d));
        slots.push_back(rec);
        pm.slot_lo_.push_back(rec.forward ? a.shift : b.shift);
        slot_keys.push_back(rec.forward ? PeriodicEdgeKey{a.vertex, b.vertex, d}
                                        : PeriodicEdgeKey{b.vertex, a.vertex, Shift(-d)});
      }
    }
    pm.vertices_ = std::move(vertices);
    pm.faces_ = std::move(faces);
    pm.cells_ = std::move(cells);

    pm.edges_ = slot_keys;
    std::sort(pm.edges_.begin(), pm.edges_.end());
    pm.edges_.erase(std::unique(pm.edges_.begin(), pm.edges_.end()), pm.edges_.end());

    std::vector<std::vector<SlotId>> incident(pm.edges_.size());
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const auto e = pm.find_edge(slot_keys[s]);
      slots[s].edge = EdgeIndex{e};
      incident[e].push_back(SlotId{s});
    }

    std::vector<std::vector<SlotId>> radial(pm.edges_.size());
    for (std::size_t e = 0; e < pm.edges_.size(); ++e) {
      const auto& key = pm.edges_[e];
      const Vec3 lo = pm.position({key.lo, Shift::Zero()});
      const Vec3 hi = pm.position({key.hi, key.delta});
      std::vector<Vec3> refs;
      for (const auto s : incident[e]) {
        const auto& rec = slots[s.index()];
        const auto& face = pm.faces_[rec.face.index()];
        // Face corners in the frame where this slot's edge starts at shift 0.
        std::vector<Vec3> local;
        for (const auto& r : face) local.push_back(pm.position({r.vertex, Shift(r.shift - pm.slot_lo_[s.index()])}));
        refs.push_back(slot_reference_point(local, face, rec.position));
      }
      std::vector<double> angles;
      try {
        angles = radial_angles(lo, hi, refs, [&](std::size_t i) {
          return "face " + std::to_string(slots[incident[e][i].index()].face.value) + " at edge class " +
                 std::to_string(e);
        });
      } catch (const GeometryError& err) {
        throw ValidationError(err.what());
      }
      radial[e] = cyclic_order(incident[e], angles);
    }
    pm.complex_ = SlotComplex(std::move(slots), std::move(radial));
    pm.labels_ = Labels::zero(pm.complex_);
    return pm;
  }

  [[nodiscard]] const Lattice& lattice() const { return lattice_; }
  [[nodiscard]] int dim() const { return lattice_.dim(); }
  [[nodiscard]] const std::vector<Vec3>& vertices() const { return vertices_; }
  [[nodiscard]] const std::vector<std::vector<PeriodicRef>>& faces() const { return faces_; }
  [[nodiscard]] const std::vector<std::optional<FaceCells>>& face_cells() const { return cells_; }
  [[nodiscard]] const std::vector<PeriodicEdgeKey>& edges() const { return edges_; }
  [[nodiscard]] std::size_t edge_count() const { return edges_.size(); }
  [[nodiscard]] std::size_t face_count() const { return faces_.size(); }
  [[nodiscard]] std::size_t slot_count() const { return complex_.slot_count(); }
  [[nodiscard]] const SlotComplex& complex() const { return complex_; }
  [[nodiscard]] const Labels& labels() const { return labels_; }
  [[nodiscard]] int degree(EdgeIndex e) const { return complex_.degree(e); }
  [[nodiscard]] const Shift& slot_lo_shift(SlotId s) const { return slot_lo_[s.index()]; }

  [[nodiscard]] Vec3 position(const PeriodicRef& r) const {
    return vertices_[r.vertex.index()] + lattice_.translation(r.shift);
  }

  [[nodiscard]] PeriodicMesh with_class_twists(const std::vector<std::int64_t>& twists) const {
    if (twists.size() != edge_count()) {
      throw ValidationError("class twist vector has " + std::to_string(twists.size()) + " entries; " +
                            std::to_string(edge_count()) + " edge classes");
    }
    PeriodicMesh out = *this;
    out.labels_.twist = twists;
    return out;
  }

  [[nodiscard]] PeriodicMesh with_uniform_twist(std::int64_t t) const {
    return with_class_twists(std::vector<std::int64_t>(edge_count(), t));
  }

  [[nodiscard]] PeriodicMesh with_null(SlotId s, bool flag = true) const {
    PeriodicMesh out = *this;
    out.labels_.null[s.index()] = flag ? 1 : 0;
    return out;
  }

 private:
  [[nodiscard]] std::size_t find_edge(const PeriodicEdgeKey& key) const {
    return static_cast<std::size_t>(std::lower_bound(edges_.begin(), edges_.end(), key) - edges_.begin());
  }

  static Vec3 slot_reference_point(const std::vector<Vec3>& local, const std::vector<PeriodicRef>& face, int k) {
    const int n = static_cast<int>(face.size());
    const auto same_edge = [&](int i, int j) {
      const auto& a = face[i];
      const auto& b = face[(i + 1) % n];
      const auto& c = face[j];
      const auto& d = face[(j + 1) % n];
      const Shift dab = b.shift - a.shift;
      const Shift dcd = d.shift - c.shift;
      return (a.vertex == c.vertex && b.vertex == d.vertex && dab == dcd) ||
             (a.vertex == d.vertex && b.vertex == c.vertex && dab == Shift(-dcd));
    };
    int next = -1;
    for (int step = 1; step < n; ++step) {
      const int j = (k + step) % n;
      if (same_edge(k, j)) {
        next = j;
        break;
      }
    }
    Vec3 sum = Vec3::Zero();
    if (next < 0) {
      for (const auto& p : local) sum += p;
      return sum / static_cast<double>(n);
    }
    int count = 0;
    for (int j = (k + 1) % n;; j = (j + 1) % n) {
      sum += local[static_cast<std::size_t>(j)];
      ++count;
      if (j == next) break;
    }
    return sum / static_cast<double>(count);
  }

  Lattice lattice_;
  std::vector<Vec3> vertices_;
  std::vector<std::vector<PeriodicRef>> faces_;
  std::vector<std::optional<FaceCells>> cells_;
  std::vector<PeriodicEdgeKey> edges_;
  std::vector<Shift> slot_lo_;
  SlotComplex complex_;
  Labels labels_;
};

namespace detail {

/// Vertex classes modulo the lattice, matched within tol.
class VertexPool {
 public:
  VertexPool(const Lattice& lattice, double tol) : lattice_(lattice), tol_(tol) {}

  PeriodicRef insert(const Vec3& p) {
    const Vec3 f = lattice_.to_fractional(p);
    for (std::size_t i = 0; i < frac_.size(); ++i) {
      const Vec3 d = f - frac_[i];
      Vec3 n = d;
      for (int a = 0; a < lattice_.dim(); ++a) n[a] = std::round(d[a]);
      if (lattice_.to_cartesian(d - n).norm() <= tol_) {
        return {VertexId{i}, n.cast<int>()};
      }
    }
    Vec3 r = f;
    Shift s = Shift::Zero();
    for (int a = 0; a < lattice_.dim(); ++a) {
      const double fl = std::floor(f[a] + 1e-7);
      s[a] = static_cast<int>(fl);
      r[a] = f[a] - fl;
      if (std::abs(r[a]) < 1e-9) r[a] = 0.0;
    }
    frac_.push_back(r);
    return {VertexId{frac_.size() - 1}, s};
  }

  [[nodiscard]] const std::vector<Vec3>& fractional() const { return frac_; }

 private:
  const Lattice& lattice_;
  double tol_;
  std::vector<Vec3> frac_;
};

/// Inserts onto each polygon edge every pooled vertex image lying strictly
/// inside it, so facets that meet along an edge share all its vertices.
inline std::vector<Vec3> split_at_pool(const Lattice& lattice, const std::vector<Vec3>& pool_frac,
                                       const std::vector<Vec3>& polygon, double tol) {
  std::vector<Vec3> out;
  const int dim = lattice.dim();
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Vec3& p = polygon[i];
    const Vec3& q = polygon[(i + 1) % polygon.size()];
    out.push_back(p);
    const Vec3 pq = q - p;
    const double len2 = pq.squaredNorm();
    const Vec3 fp = lattice.to_fractional(p);
    const Vec3 fq = lattice.to_fractional(q);
    std::vector<std::pair<double, Vec3>> inner;
    for (const auto& r : pool_frac) {
      std::array<int, 3> lo{0, 0, 0};
      std::array<int, 3> hi{0, 0, 0};
      for (int a = 0; a < dim; ++a) {
        lo[a] = static_cast<int>(std::floor(std::min(fp[a], fq[a]) - r[a] - 1e-6));
        hi[a] = static_cast<int>(std::ceil(std::max(fp[a], fq[a]) - r[a] + 1e-6));
      }
      for (int x = lo[0]; x <= hi[0]; ++x) {
        for (int y = lo[1]; y <= hi[1]; ++y) {
          for (int z = lo[2]; z <= hi[2]; ++z) {
            const Vec3 c = lattice.to_cartesian(r + Vec3(x, y, z));
            const double lambda = (c - p).dot(pq) / len2;
            const double margin = tol / std::sqrt(len2);
            if (lambda <= margin || lambda >= 1.0 - margin) continue;
            if ((p + lambda * pq - c).norm() > tol) continue;
            inner.emplace_back(lambda, c);
          }
        }
      }
    }
    std::sort(inner.begin(), inner.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [lambda, c] : inner) {
      if ((out.back() - c).norm() > tol) out.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

/// Wigner-Seitz cell of the lattice as an ordinary mesh: the polyhedron for
/// N=3, a single polygon face for N=2.
inline LabeledMesh wigner_seitz(const Lattice& lattice) {
  const auto cells = voronoi_cells(lattice, {Vec3::Zero()});
  const double tol = 1e-7 * lattice.scale();
  std::vector<Vec3> vertices;
  const auto vid = [&](const Vec3& p) {
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if ((vertices[i] - p).norm() <= tol) return VertexId{i};
    }
    vertices.push_back(p);
    return VertexId{vertices.size() - 1};
  };
  std::vector<std::vector<VertexId>> faces;
  if (lattice.dim() == 3) {
    for (const auto& facet : cells[0].facets) {
      std::vector<VertexId> face;
      for (const auto& p : facet.points) face.push_back(vid(p));
      faces.push_back(std::move(face));
    }
  } else {
    std::vector<VertexId> face;
    for (const auto& facet : cells[0].facets) face.push_back(vid(facet.points[0]));
    faces.push_back(std::move(face));
  }
  return LabeledMesh::build(std::move(vertices), std::move(faces));
}

/// Voronoi cell complex of the periodic point set. N=3: every facet once per
/// translation class, as a face shared by the two cells it separates. N=2:
/// each tile polygon is a face and neighbouring tiles share edges.
inline PeriodicMesh periodic_scaffold(const Lattice& lattice, const std::vector<Vec3>& generators) {
  const auto cells = voronoi_cells(lattice, generators);
  const double tol = 1e-7 * lattice.scale();

  struct RawFace {
    std::vector<Vec3> points;
    std::optional<FaceCells> cells;
  };
  std::vector<RawFace> raw;
  for (const auto& cell : cells) {
    const SiteRef inner{cell.generator, Shift::Zero()};
    if (lattice.dim() == 3) {
      for (const auto& facet : cell.facets) {
        const auto& nb = facet.neighbor;
        if (cell.generator < nb.generator || (cell.generator == nb.generator && lex_positive(nb.shift))) {
          raw.push_back({facet.points, FaceCells{inner, nb}});
        }
      }
    } else {
      std::vector<Vec3> poly;
      for (const auto& facet : cell.facets) poly.push_back(facet.points[0]);
      raw.push_back({std::move(poly), FaceCells{inner, inner}});
    }
  }

  detail::VertexPool pool(lattice, tol);
  for (const auto& cell : cells) {
    for (const auto& facet : cell.facets) {
      for (const auto& p : facet.points) pool.insert(p);
    }
  }
  const auto pool_frac = pool.fractional();

  // Vertex classes sorted by fractional position.
  std::vector<std::size_t> order(pool_frac.size());
  std::iota(order.begin(), order.end(), 0);
  const auto key = [&](std::size_t i) {
    std::array<long long, 3> k{};
    for (int a = 0; a < 3; ++a) k[a] = std::llround(pool_frac[i][a] * 1e6);
    return k;
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  std::vector<std::int32_t> rank(order.size());
  std::vector<Vec3> vertices(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    rank[order[r]] = static_cast<std::int32_t>(r);
    vertices[r] = lattice.to_cartesian(pool_frac[order[r]]);
  }

  std::vector<std::vector<PeriodicRef>> faces;
  std::vector<std::optional<FaceCells>> face_cells;
  for (const auto& rf : raw) {
    std::vector<PeriodicRef> refs;
    for (const auto& p : detail::split_at_pool(lattice, pool_frac, rf.points, tol)) {
      auto r = pool.insert(p);
      r.vertex = VertexId{rank[r.vertex.index()]};
      refs.push_back(r);
    }
    faces.push_back(std::move(refs));
    face_cells.push_back(rf.cells);
  }
  if (pool.fractional().size() != pool_frac.size()) throw GeometryError("edge split produced a new vertex class");
  return PeriodicMesh::build(lattice, std::move(vertices), std::move(faces), std::move(face_cells));
}

/// Edge classes are the quotient edges; ids follow the sorted keys.
struct EdgeClasses {
  std::vector<PeriodicEdgeKey> representatives;
  std::vector<int> degree;

  [[nodiscard]] std::size_t count() const { return representatives.size(); }
};

inline EdgeClasses edge_classes(const PeriodicMesh& pm) {
  EdgeClasses out;
  out.representatives = pm.edges();
  for (std::size_t e = 0; e < pm.edge_count(); ++e) out.degree.push_back(pm.degree(EdgeIndex{e}));
  return out;
}

inline PeriodicMesh assign_class_twists(const PeriodicMesh& pm, const std::vector<std::int64_t>& twists) {
  return pm.with_class_twists(twists);
}

struct PeriodicComponent {
  enum class Kind { Loop, Thread, Path };
  Kind kind = Kind::Loop;
  StrandComponent strand;
  Shift closure = Shift::Zero();
  std::array<int, 3> repeat_box{1, 1, 1};

  [[nodiscard]] bool infinite() const { return kind == Kind::Thread; }
};

inline std::string to_string(PeriodicComponent::Kind k) {
  switch (k) {
    case PeriodicComponent::Kind::Loop: return "loop";
    case PeriodicComponent::Kind::Thread: return "thread";
    case PeriodicComponent::Kind::Path: return "path";
  }
  return "";
}

struct PeriodicStrandSet {
  std::vector<PeriodicComponent> components;

  [[nodiscard]] std::size_t component_count() const { return components.size(); }
  [[nodiscard]] std::size_t count(PeriodicComponent::Kind k) const {
    return static_cast<std::size_t>(
        std::count_if(components.begin(), components.end(), [&](const auto& c) { return c.kind == k; }));
  }

  /// Distinct thread directions: closure offsets reduced to primitive
  /// vectors up to sign.
  [[nodiscard]] std::vector<Shift> direction_classes() const {
    std::vector<Shift> dirs;
    for (const auto& c : components) {
      if (!c.infinite()) continue;
      Shift w = c.closure;
      const int g = std::gcd(std::gcd(std::abs(w.x()), std::abs(w.y())), std::abs(w.z()));
      w /= g;
      if (lex_less(w, Shift::Zero())) w = -w;
      if (std::find(dirs.begin(), dirs.end(), w) == dirs.end()) dirs.push_back(w);
    }
    std::sort(dirs.begin(), dirs.end(), lex_less);
    return dirs;
  }

  /// Per-axis least common multiple of the component boxes.
  [[nodiscard]] std::array<int, 3> repeat_box() const {
    std::array<int, 3> box{1, 1, 1};
    for (const auto& c : components) {
      for (int a = 0; a < 3; ++a) box[a] = std::lcm(box[a], c.repeat_box[a]);
    }
    return box;
  }
};

/// Lattice frame change of a passage: the face frame moves so that both
/// slots see the same edge instance.
inline Shift passage_offset(const PeriodicMesh& pm, const Passage& p) {
  const auto target = transfer(pm.complex(), pm.labels(), p.slot);
  const Shift d = pm.slot_lo_shift(p.slot) - pm.slot_lo_shift(target);
  return p.forward ? d : Shift(-d);
}

/// Quotient strands with closure offsets. repeat_box is the per-axis
/// extent, in cells, of the edge midpoints one period of the strand visits,
/// rounded up, at least 1.
inline PeriodicStrandSet trace_periodic(const PeriodicMesh& pm) {
  const auto strands = trace_strands(pm.complex(), pm.labels());
  PeriodicStrandSet out;
  const auto& lattice = pm.lattice();
  for (const auto& comp : strands.components) {
    PeriodicComponent pc;
    Shift frame = Shift::Zero();
    std::vector<Vec3> mids;
    for (const auto& p : comp.passages) {
      const auto target = transfer(pm.complex(), pm.labels(), p.slot);
      const auto start_slot = p.forward ? p.slot : target;
      const auto& key = pm.edges()[pm.complex().slot(start_slot).edge.index()];
      const Shift lo = frame + pm.slot_lo_shift(start_slot);
      const Vec3 a = lattice.to_fractional(pm.position({key.lo, lo}));
      const Vec3 b = lattice.to_fractional(pm.position({key.hi, Shift(lo + key.delta)}));
      mids.push_back(0.5 * (a + b));
      frame += passage_offset(pm, p);
    }
    pc.strand = comp;
    pc.closure = frame;
    if (!comp.closed()) {
      pc.kind = PeriodicComponent::Kind::Path;
    } else if (frame.isZero()) {
      pc.kind = PeriodicComponent::Kind::Loop;
    } else {
      pc.kind = PeriodicComponent::Kind::Thread;
      mids.push_back(mids.front() + frame.cast<double>());
    }
    for (int a = 0; a < 3; ++a) {
      double lo = mids.front()[a];
      double hi = lo;
      for (const auto& m : mids) {
        lo = std::min(lo, m[a]);
        hi = std::max(hi, m[a]);
      }
      pc.repeat_box[a] = std::max(1, static_cast<int>(std::ceil(hi - lo - 1e-9)));
    }
    out.components.push_back(std::move(pc));
  }
  return out;
}

inline ordered_json shift_json(const Shift& s, int dim) {
  auto a = ordered_json::array();
  for (int i = 0; i < dim; ++i) a.push_back(s[i]);
  return a;
}

inline ordered_json periodic_report(const PeriodicMesh& pm, const PeriodicStrandSet& set) {
  const int dim = pm.dim();
  ordered_json doc;
  auto comps = ordered_json::array();
  for (const auto& c : set.components) {
    ordered_json entry;
    entry["kind"] = to_string(c.kind);
    auto slots = ordered_json::array();
    for (const auto& p : c.strand.passages) {
      const auto& rec = pm.complex().slot(p.slot);
      slots.push_back(ordered_json::array({rec.face.value, rec.position}));
    }
    entry["slots"] = std::move(slots);
    entry["length"] = c.strand.length();
    entry["closure_offset"] = shift_json(c.closure, dim);
    auto box = ordered_json::array();
    for (int a = 0; a < dim; ++a) box.push_back(c.repeat_box[a]);
    entry["repeat_box"] = std::move(box);
    comps.push_back(std::move(entry));
  }
  doc["components"] = std::move(comps);
  doc["count"] = set.component_count();
  doc["loops"] = set.count(PeriodicComponent::Kind::Loop);
  doc["threads"] = set.count(PeriodicComponent::Kind::Thread);
  doc["paths"] = set.count(PeriodicComponent::Kind::Path);
  auto dirs = ordered_json::array();
  for (const auto& d : set.direction_classes()) dirs.push_back(shift_json(d, dim));
  doc["direction_classes"] = std::move(dirs);
  const auto box = set.repeat_box();
  auto b = ordered_json::array();
  for (int a = 0; a < dim; ++a) b.push_back(box[a]);
  doc["repeat_box"] = std::move(b);
  return doc;
}

/// Where a tiled slot came from.
struct TiledSlot {
  SlotId quotient;
  Shift frame = Shift::Zero();
};

struct TiledMesh {
  LabeledMesh mesh;
  std::vector<TiledSlot> provenance;  // by tiled slot id
};

/// Finite block of extent cells per axis. Scaffold faces are placed for
/// every cell of the block together with each cell's full boundary, so the
/// outer skin is closed; edges there have fewer faces than in the bulk.
/// Twists are copied from the edge classes.
inline TiledMesh tile(const PeriodicMesh& pm, const std::array<int, 3>& extent) {
  const int dim = pm.dim();
  for (int a = 0; a < dim; ++a) {
    if (extent[a] < 1) throw ValidationError("tile extent must be at least 1 on every axis");
  }
  const Shift ext(extent[0], extent[1], dim == 3 ? extent[2] : 1);
  const auto inside = [&](const Shift& c) {
    for (int a = 0; a < 3; ++a) {
      if (c[a] < 0 || c[a] >= ext[a]) return false;
    }
    return true;
  };
  int reach = 0;
  for (const auto& fc : pm.face_cells()) {
    if (fc) reach = std::max(reach, fc->outer.shift.cwiseAbs().maxCoeff());
  }

  std::map<std::tuple<int, int, int, int>, VertexId> vertex_ids;
  std::vector<Vec3> positions;
  std::vector<std::vector<VertexId>> faces;
  std::vector<std::pair<FaceId, Shift>> face_origin;
  const int zr = dim == 3 ? reach : 0;
  for (int x = -reach; x < ext.x() + reach; ++x) {
    for (int y = -reach; y < ext.y() + reach; ++y) {
      for (int z = -zr; z < ext.z() + zr; ++z) {
        const Shift c(x, y, z);
        for (std::size_t f = 0; f < pm.face_count(); ++f) {
          const auto& fc = pm.face_cells()[f];
          const bool keep = inside(c) || (fc && dim == 3 && inside(Shift(c + fc->outer.shift)));
          if (!keep) continue;
          std::vector<VertexId> face;
          for (const auto& r : pm.faces()[f]) {
            const Shift g = c + r.shift;
            const auto k = std::tuple{r.vertex.value, g.x(), g.y(), g.z()};
            auto it = vertex_ids.find(k);
            if (it == vertex_ids.end()) {
              it = vertex_ids.emplace(k, VertexId{positions.size()}).first;
              positions.push_back(pm.position({r.vertex, g}));
            }
            face.push_back(it->second);
          }
          faces.push_back(std::move(face));
          face_origin.emplace_back(FaceId{f}, c);
        }
      }
    }
  }

  TiledMesh out;
  auto mesh = LabeledMesh::build(std::move(positions), std::move(faces));
  std::vector<std::int64_t> twists(mesh.edge_count(), 0);
  for (std::size_t s = 0; s < mesh.slot_count(); ++s) {
    const auto& rec = mesh.complex().slot(SlotId{s});
    const auto& [qf, frame] = face_origin[rec.face.index()];
    const auto q = pm.complex().face_slot(qf, rec.position);
    out.provenance.push_back({q, frame});
    twists[rec.edge.index()] = pm.labels().twist[pm.complex().slot(q).edge.index()];
  }
  out.mesh = mesh.with_twist_vector(std::move(twists));
  return out;
}

namespace detail {

inline Lattice parse_basis(const json& block) {
  const auto& rows = require(block, "basis", "periodic");
  if (!rows.is_array() || (rows.size() != 2 && rows.size() != 3)) {
    throw ParseError("periodic.basis must list 2 or 3 vectors");
  }
  const int dim = static_cast<int>(rows.size());
  std::vector<Vec3> vecs;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto w = "periodic.basis[" + std::to_string(i) + "]";
    if (!rows[i].is_array() || rows[i].size() < static_cast<std::size_t>(dim) || rows[i].size() > 3) {
      throw ParseError(w + ": wrong length");
    }
    Vec3 v = Vec3::Zero();
    for (std::size_t c = 0; c < rows[i].size(); ++c) v[static_cast<Eigen::Index>(c)] = as_real(rows[i][c], w);
    vecs.push_back(v);
  }
  return {dim, vecs};
}

inline Vec3 parse_point(const json& p, const std::string& where) {
  if (!p.is_array() || p.size() < 2 || p.size() > 3) throw ParseError(where + ": expected a point");
  Vec3 v = Vec3::Zero();
  for (std::size_t c = 0; c < p.size(); ++c) v[static_cast<Eigen::Index>(c)] = as_real(p[c], where);
  return v;
}

}  // namespace detail

inline std::vector<std::int64_t> parse_class_twists(const json& list) {
  if (!list.is_array()) throw ParseError("class_twists must be an array");
  std::vector<std::int64_t> out;
  for (const auto& v : list) out.push_back(detail::as_int(v, "class_twists"));
  return out;
}

/// LKM document with a periodic block: generators, or explicit faces with
/// per-face-vertex "shifts". Optional class_twists label the edge classes.
inline PeriodicMesh parse_periodic(const json& doc) {
  if (!doc.is_object()) throw ParseError("LKM document must be an object");
  const auto it = doc.find("periodic");
  if (it == doc.end() || !it->is_object()) throw ParseError("document has no periodic block");
  const auto& block = *it;
  const auto lattice = detail::parse_basis(block);
  for (const char* key : {"twists", "null_sides"}) {
    if (const auto t = doc.find(key); t != doc.end() && t->is_array() && !t->empty()) {
      throw ValidationError(std::string("periodic documents label edges through periodic.class_twists, not ") + key);
    }
  }

  PeriodicMesh pm;
  if (const auto gens = block.find("generators"); gens != block.end()) {
    if (!gens->is_array()) throw ParseError("periodic.generators must be an array");
    std::vector<Vec3> points;
    for (std::size_t i = 0; i < gens->size(); ++i) {
      points.push_back(detail::parse_point((*gens)[i], "periodic.generators[" + std::to_string(i) + "]"));
    }
    pm = periodic_scaffold(lattice, points);
  } else {
    const auto base = parse_document(doc);
    const auto& shifts = detail::require(block, "shifts", "periodic");
    if (!shifts.is_array() || shifts.size() != base.faces.size()) {
      throw ParseError("periodic.shifts needs one list per face");
    }
    std::vector<std::vector<PeriodicRef>> faces;
    for (std::size_t f = 0; f < base.faces.size(); ++f) {
      const auto w = "periodic.shifts[" + std::to_string(f) + "]";
      if (!shifts[f].is_array() || shifts[f].size() != base.faces[f].size()) {
        throw ParseError(w + ": one shift per face vertex");
      }
      std::vector<PeriodicRef> refs;
      for (std::size_t k = 0; k < base.faces[f].size(); ++k) {
        const auto& s = shifts[f][k];
        if (!s.is_array() || s.size() != static_cast<std::size_t>(lattice.dim())) throw ParseError(w + ": bad shift");
        Shift sh = Shift::Zero();
        for (int a = 0; a < lattice.dim(); ++a) sh[a] = static_cast<int>(detail::as_int(s[a], w));
        refs.push_back({base.faces[f][k], sh});
      }
      faces.push_back(std::move(refs));
    }
    pm = PeriodicMesh::build(lattice, base.vertices, std::move(faces));
  }
  if (const auto ct = block.find("class_twists"); ct != block.end()) {
    pm = pm.with_class_twists(parse_class_twists(*ct));
  }
  return pm;
}

/// Explicit periodic LKM document for the quotient mesh.
inline ordered_json periodic_document(const PeriodicMesh& pm) {
  const int dim = pm.dim();
  ordered_json doc;
  auto verts = ordered_json::array();
  for (const auto& p : pm.vertices()) verts.push_back(ordered_json::array({p.x(), p.y(), p.z()}));
  doc["vertices"] = std::move(verts);
  auto faces = ordered_json::array();
  auto shifts = ordered_json::array();
  for (const auto& face : pm.faces()) {
    auto cycle = ordered_json::array();
    auto sh = ordered_json::array();
    for (const auto& r : face) {
      cycle.push_back(r.vertex.value);
      sh.push_back(shift_json(r.shift, dim));
    }
    faces.push_back(std::move(cycle));
    shifts.push_back(std::move(sh));
  }
  doc["faces"] = std::move(faces);
  doc["twists"] = ordered_json::array();
  doc["null_sides"] = ordered_json::array();
  ordered_json block;
  auto basis = ordered_json::array();
  for (int i = 0; i < dim; ++i) {
    auto row = ordered_json::array();
    for (int c = 0; c < dim; ++c) row.push_back(pm.lattice().vector(i)[c]);
    basis.push_back(std::move(row));
  }
  block["basis"] = std::move(basis);
  block["shifts"] = std::move(shifts);
  block["class_twists"] = pm.labels().twist;
  doc["periodic"] = std::move(block);
  return doc;
}

}  // namespace lk
