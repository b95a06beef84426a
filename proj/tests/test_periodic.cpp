#include "lk/periodic.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace lk;

namespace {

PeriodicMesh honeycomb(const std::string& preset) { return periodic_scaffold(lattice_preset(preset), {Vec3::Zero()}); }

std::vector<std::size_t> sorted_lengths(const PeriodicStrandSet& set) {
  std::vector<std::size_t> out;
  for (const auto& c : set.components) out.push_back(c.strand.length());
  std::sort(out.begin(), out.end());
  return out;
}

/// Same quotient with every vertex class moved by a random lattice vector
/// and every face re-anchored in a random cell.
PeriodicMesh rerepresent(const PeriodicMesh& pm, std::mt19937& rng) {
  std::uniform_int_distribution<int> d(-2, 2);
  const int dim = pm.dim();
  const auto rand_shift = [&] {
    Shift s = Shift::Zero();
    for (int a = 0; a < dim; ++a) s[a] = d(rng);
    return s;
  };
  std::vector<Shift> vshift;
  auto vertices = pm.vertices();
  for (auto& v : vertices) {
    vshift.push_back(rand_shift());
    v += pm.lattice().translation(vshift.back());
  }
  auto faces = pm.faces();
  for (auto& face : faces) {
    const Shift anchor = rand_shift();
    for (auto& r : face) r.shift = r.shift - vshift[r.vertex.index()] + anchor;
  }
  auto out = PeriodicMesh::build(pm.lattice(), vertices, faces);
  // Edge class ids follow the keys, which moved; carry twists over by slot.
  std::vector<std::int64_t> twists(out.edge_count(), 0);
  for (std::size_t s = 0; s < pm.slot_count(); ++s) {
    twists[out.complex().slot(SlotId{s}).edge.index()] = pm.labels().twist[pm.complex().slot(SlotId{s}).edge.index()];
  }
  return out.with_class_twists(twists);
}

/// Tile-based oracle: in a large finite block, the finite strand through a
/// centre copy of a quotient port must also pass the copy displaced by w.
/// Ports, unlike passage slots, do not depend on edge orientation.
struct TileOracle {
  TiledMesh tiled;
  std::map<std::pair<std::size_t, std::array<int, 3>>, SlotId> index;
  std::map<std::pair<std::size_t, int>, int> port_component;

  TileOracle(const PeriodicMesh& pm, int extent) {
    const std::array<int, 3> ext{extent, extent, pm.dim() == 3 ? extent : 1};
    tiled = tile(pm, ext);
    for (std::size_t s = 0; s < tiled.provenance.size(); ++s) {
      const auto& p = tiled.provenance[s];
      index.emplace(std::pair{p.quotient.index(), std::array{p.frame.x(), p.frame.y(), p.frame.z()}}, SlotId{s});
    }
    const auto& cx = tiled.mesh.complex();
    const auto& labels = tiled.mesh.labels();
    const auto set = trace(tiled.mesh);
    for (std::size_t c = 0; c < set.components.size(); ++c) {
      for (const auto& p : set.components[c].passages) {
        for (const auto port : {entry_port(cx, labels, p), exit_port(cx, labels, p)}) {
          port_component[{port.slot.index(), static_cast<int>(port.end)}] = static_cast<int>(c);
        }
      }
    }
  }

  /// Component of the tile copy at frame of quotient port q.
  [[nodiscard]] std::optional<int> component(const PeriodicMesh& pm, Port q, const Shift& frame) const {
    const auto it = index.find({q.slot.index(), {frame.x(), frame.y(), frame.z()}});
    if (it == index.end()) return std::nullopt;
    const bool same = tiled.mesh.complex().slot(it->second).forward == pm.complex().slot(q.slot).forward;
    const End end = same ? q.end : (q.end == End::Low ? End::High : End::Low);
    return port_component.at({it->second.index(), static_cast<int>(end)});
  }
};

void check_against_tiling(const PeriodicMesh& pm, int extent) {
  const auto set = trace_periodic(pm);
  const TileOracle oracle(pm, extent);
  const int mid = extent / 2;
  const Shift centre(mid, mid, pm.dim() == 3 ? mid : 0);
  for (const auto& c : set.components) {
    const auto q = entry_port(pm.complex(), pm.labels(), c.strand.passages.front());
    const auto here = oracle.component(pm, q, centre);
    ASSERT_TRUE(here.has_value());
    if (c.kind == PeriodicComponent::Kind::Loop) {
      const auto size = std::count_if(oracle.port_component.begin(), oracle.port_component.end(),
                                      [&](const auto& kv) { return kv.second == *here; });
      EXPECT_EQ(static_cast<std::size_t>(size), 2 * c.strand.length());
    } else {
      for (const Shift& f : {Shift(centre + c.closure), Shift(centre - c.closure)}) {
        const auto there = oracle.component(pm, q, f);
        ASSERT_TRUE(there.has_value()) << "block too small";
        EXPECT_EQ(*here, *there) << "w=" << c.closure.transpose();
      }
    }
  }
}

}  // namespace

TEST(Lattice, PresetsAndErrors) {
  for (const auto& name : lattice_preset_names()) {
    const auto l = lattice_preset(name);
    EXPECT_GT(std::abs(l.basis().determinant()), 0.1) << name;
  }
  EXPECT_EQ(lattice_preset("sq").dim(), 2);
  EXPECT_EQ(lattice_preset("cI").dim(), 3);
  EXPECT_THROW(lattice_preset("tP"), ValidationError);
  EXPECT_THROW(Lattice(3, {{1, 0, 0}, {0, 1, 0}, {1, 1, 0}}), ValidationError);
}

TEST(WignerSeitz, CellCombinatorics) {
  const auto count_sizes = [](const LabeledMesh& m) {
    std::map<std::size_t, int> sizes;
    for (const auto& f : m.faces()) ++sizes[f.size()];
    return sizes;
  };
  const auto cube = wigner_seitz(lattice_preset("cP"));
  EXPECT_EQ(cube.face_count(), 6u);
  EXPECT_EQ(cube.edge_count(), 12u);
  EXPECT_EQ(cube.vertex_count(), 8u);

  const auto to = wigner_seitz(lattice_preset("cI"));
  EXPECT_EQ(to.face_count(), 14u);
  EXPECT_EQ(to.edge_count(), 36u);
  EXPECT_EQ(to.vertex_count(), 24u);
  EXPECT_EQ(count_sizes(to), (std::map<std::size_t, int>{{4, 6}, {6, 8}}));

  const auto rd = wigner_seitz(lattice_preset("cF"));
  EXPECT_EQ(rd.face_count(), 12u);
  EXPECT_EQ(rd.edge_count(), 24u);
  EXPECT_EQ(rd.vertex_count(), 14u);

  const auto prism = wigner_seitz(lattice_preset("hP"));
  EXPECT_EQ(count_sizes(prism), (std::map<std::size_t, int>{{4, 6}, {6, 2}}));

  const auto of = wigner_seitz(lattice_preset("oF"));
  EXPECT_EQ(of.vertex_count() + of.face_count(), of.edge_count() + 2);

  EXPECT_EQ(wigner_seitz(lattice_preset("sq")).edge_count(), 4u);
  const auto hex = wigner_seitz(lattice_preset("hex"));
  ASSERT_EQ(hex.face_count(), 1u);
  EXPECT_EQ(hex.faces()[0].size(), 6u);
  for (const auto& v : hex.vertices()) EXPECT_NEAR(v.norm(), 1.0 / std::sqrt(3.0), 1e-9);
}

TEST(Scaffold, HoneycombClasses) {
  const auto cp = honeycomb("cP");
  EXPECT_EQ(cp.vertices().size(), 1u);
  EXPECT_EQ(cp.face_count(), 3u);
  EXPECT_EQ(cp.edge_count(), 3u);
  for (std::size_t e = 0; e < cp.edge_count(); ++e) EXPECT_EQ(cp.degree(EdgeIndex{e}), 4);

  const auto ci = honeycomb("cI");
  EXPECT_EQ(ci.face_count(), 7u);
  EXPECT_EQ(ci.edge_count(), 12u);
  for (std::size_t e = 0; e < ci.edge_count(); ++e) EXPECT_EQ(ci.degree(EdgeIndex{e}), 3);

  const auto cf = honeycomb("cF");
  EXPECT_EQ(cf.face_count(), 6u);
  EXPECT_EQ(edge_classes(cf).count(), 8u);

  EXPECT_EQ(edge_classes(honeycomb("sq")).count(), 2u);
  EXPECT_EQ(edge_classes(honeycomb("hex")).count(), 3u);
  for (const auto& name : {"sq", "hex"}) {
    const auto pm = honeycomb(name);
    for (std::size_t e = 0; e < pm.edge_count(); ++e) EXPECT_EQ(pm.degree(EdgeIndex{e}), 2);
  }
}

TEST(Scaffold, FaceCentreGenerators) {
  const auto pm = periodic_scaffold(lattice_preset("cP"), {{0.5, 0.5, 0}, {0.5, 0, 0.5}, {0, 0.5, 0.5}});
  std::set<int> degrees;
  for (std::size_t e = 0; e < pm.edge_count(); ++e) degrees.insert(pm.degree(EdgeIndex{e}));
  EXPECT_TRUE(degrees.contains(3));
  EXPECT_TRUE(degrees.contains(4));
  for (const int k : degrees) EXPECT_GE(k, 3);
  // Every slot's face is planar and the quotient Euler characteristic of a
  // 3-torus cell complex vanishes: V - E + F - C = 0.
  EXPECT_EQ(static_cast<long>(pm.vertices().size()) - static_cast<long>(pm.edge_count()) +
                static_cast<long>(pm.face_count()) - 3,
            0);
}

TEST(Scaffold, EulerCharacteristicVanishes) {
  for (const auto& name : {"cP", "cI", "cF", "hP", "oF"}) {
    const auto pm = honeycomb(name);
    EXPECT_EQ(static_cast<long>(pm.vertices().size()) - static_cast<long>(pm.edge_count()) +
                  static_cast<long>(pm.face_count()) - 1,
              0)
        << name;
  }
  const auto two = periodic_scaffold(lattice_preset("cP"), {{0.1, 0.2, 0.3}, {0.6, 0.55, 0.8}});
  EXPECT_EQ(static_cast<long>(two.vertices().size()) - static_cast<long>(two.edge_count()) +
                static_cast<long>(two.face_count()) - 2,
            0);
}

TEST(Scaffold, RejectsCoincidentGenerators) {
  EXPECT_THROW(periodic_scaffold(lattice_preset("cP"), {{0.2, 0.2, 0.2}, {1.2, 0.2, 0.2}}), ValidationError);
}

TEST(PeriodicTrace, CubicUniform) {
  const auto cp = honeycomb("cP");
  const std::vector<std::size_t> expected{3, 4, 6, 4, 3};
  for (int t = 0; t <= 4; ++t) {
    EXPECT_EQ(trace_periodic(cp.with_uniform_twist(t)).component_count(), expected[static_cast<std::size_t>(t)])
        << "t=" << t;
  }
}

TEST(PeriodicTrace, TruncatedOctahedralUniform) {
  const auto ci = honeycomb("cI");
  for (int t = 1; t <= 4; ++t) EXPECT_EQ(trace_periodic(ci.with_uniform_twist(t)).component_count(), 7u);
}

TEST(PeriodicTrace, PlanarWeaves) {
  const auto sq = trace_periodic(honeycomb("sq").with_uniform_twist(1));
  EXPECT_EQ(sq.count(PeriodicComponent::Kind::Thread), sq.component_count());
  EXPECT_EQ(sq.direction_classes().size(), 2u);

  const auto hex = trace_periodic(honeycomb("hex").with_uniform_twist(1));
  EXPECT_EQ(hex.count(PeriodicComponent::Kind::Thread), hex.component_count());
  EXPECT_EQ(hex.direction_classes().size(), 3u);

  for (const auto& name : {"sq", "hex"}) {
    const auto flat = trace_periodic(honeycomb(name).with_uniform_twist(0));
    EXPECT_EQ(flat.count(PeriodicComponent::Kind::Loop), flat.component_count());
    EXPECT_TRUE(flat.direction_classes().empty());
  }
}

TEST(PeriodicTrace, NonUniformCubic) {
  // Class order for cP follows the sorted keys: z, y, x edges.
  const auto cp = honeycomb("cP");
  const auto a = trace_periodic(cp.with_class_twists({1, 1, 2}));
  ASSERT_EQ(a.component_count(), 1u);
  EXPECT_EQ(a.components[0].kind, PeriodicComponent::Kind::Thread);
  EXPECT_EQ(a.repeat_box(), (std::array<int, 3>{4, 2, 2}));

  const auto b = trace_periodic(cp.with_class_twists({-1, 0, 1}));
  ASSERT_EQ(b.component_count(), 1u);
  EXPECT_EQ(b.components[0].kind, PeriodicComponent::Kind::Loop);
  EXPECT_EQ(b.repeat_box(), (std::array<int, 3>{2, 1, 2}));

  const auto c = trace_periodic(cp.with_class_twists({1, 3, 1}));
  EXPECT_EQ(c.component_count(), 2u);
  EXPECT_EQ(c.repeat_box(), (std::array<int, 3>{1, 2, 1}));

  const auto d = trace_periodic(cp.with_class_twists({2, 3, 2}));
  EXPECT_EQ(d.component_count(), 3u);
  EXPECT_EQ(d.repeat_box(), (std::array<int, 3>{1, 4, 1}));

  EXPECT_THROW((void)cp.with_class_twists({1, 2}), ValidationError);
}

TEST(PeriodicTrace, ClosureOffsetsMatchTiling) {
  const auto cp = honeycomb("cP");
  for (const auto& v : std::vector<std::vector<std::int64_t>>{{1, 1, 2}, {-1, 0, 1}, {1, 3, 1}, {2, 3, 2}, {1, 1, 1}}) {
    check_against_tiling(cp.with_class_twists(v), 11);
  }
  check_against_tiling(honeycomb("sq").with_uniform_twist(1), 9);
  check_against_tiling(honeycomb("hex").with_uniform_twist(1), 9);
  check_against_tiling(honeycomb("cI").with_uniform_twist(1), 7);
}

TEST(PeriodicTrace, RepresentativeInvariance) {
  std::mt19937 rng(11);
  for (const auto& name : {"cP", "cI", "sq", "hex"}) {
    const auto base = honeycomb(name);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<std::int64_t> tw(base.edge_count());
      std::uniform_int_distribution<int> d(-3, 3);
      for (auto& t : tw) t = d(rng);
      const auto pm = base.with_class_twists(tw);
      const auto moved = rerepresent(pm, rng);
      const auto a = trace_periodic(pm);
      const auto b = trace_periodic(moved);
      EXPECT_EQ(trace_strands(pm.complex(), pm.labels()).slot_partition(pm.slot_count()),
                trace_strands(moved.complex(), moved.labels()).slot_partition(moved.slot_count()))
          << name;
      ASSERT_EQ(a.component_count(), b.component_count());
      for (std::size_t i = 0; i < a.component_count(); ++i) {
        EXPECT_EQ(a.components[i].closure, b.components[i].closure);
        EXPECT_EQ(a.components[i].kind, b.components[i].kind);
        EXPECT_EQ(a.components[i].repeat_box, b.components[i].repeat_box);
      }
    }
  }
}

TEST(PeriodicTrace, SubstitutionInvariance) {
  for (const auto& name : {"cP", "cI", "hex"}) {
    const auto pm = honeycomb(name);
    std::vector<std::int64_t> tw(pm.edge_count());
    for (std::size_t e = 0; e < tw.size(); ++e) tw[e] = static_cast<std::int64_t>(e % 3) - 1;
    const auto base = trace_periodic(pm.with_class_twists(tw));
    for (std::size_t e = 0; e < tw.size(); ++e) {
      auto shifted = tw;
      shifted[e] += 2 * pm.degree(EdgeIndex{e});
      const auto moved = trace_periodic(pm.with_class_twists(shifted));
      EXPECT_EQ(sorted_lengths(base), sorted_lengths(moved));
      ASSERT_EQ(base.component_count(), moved.component_count());
      for (std::size_t i = 0; i < base.component_count(); ++i) {
        EXPECT_EQ(base.components[i].closure, moved.components[i].closure);
      }
    }
  }
}

TEST(PeriodicTrace, NullSlotGivesPath) {
  const auto pm = honeycomb("cP").with_uniform_twist(1).with_null(SlotId{0});
  const auto set = trace_periodic(pm);
  EXPECT_EQ(set.count(PeriodicComponent::Kind::Path), 1u);
}

TEST(Tile, CubicBlocks) {
  const auto cp = honeycomb("cP");
  const auto one = tile(cp, {1, 1, 1});
  EXPECT_EQ(one.mesh.face_count(), 6u);
  EXPECT_EQ(one.mesh.edge_count(), 12u);
  for (const auto& e : one.mesh.edges()) EXPECT_EQ(one.mesh.degree(e), 2);

  const auto two = tile(cp, {2, 2, 2});
  EXPECT_EQ(two.mesh.face_count(), 36u);
  EXPECT_EQ(two.mesh.edge_count(), 54u);
  std::map<int, int> hist;
  for (const auto& e : two.mesh.edges()) ++hist[two.mesh.degree(e)];
  // Per axis: 2 interior lines, 4 on face centres, 4 outer corners; 2 segments each.
  EXPECT_EQ(hist, (std::map<int, int>{{2, 24}, {3, 24}, {4, 6}}));
  EXPECT_EQ(two.provenance.size(), two.mesh.slot_count());
}

TEST(Tile, CopiesClassTwistsAndLoops) {
  const auto cp = honeycomb("cP").with_class_twists({1, 2, 3});
  const auto block = tile(cp, {2, 1, 1});
  for (std::size_t s = 0; s < block.mesh.slot_count(); ++s) {
    const auto& rec = block.mesh.complex().slot(SlotId{s});
    const auto q = block.provenance[s].quotient;
    EXPECT_EQ(block.mesh.labels().twist[rec.edge.index()], cp.labels().twist[cp.complex().slot(q).edge.index()]);
  }

  // Closed quotient loops lift once per cell of the block.
  const auto flat = honeycomb("cP");
  const auto loops = trace_periodic(flat).component_count();
  const auto tiled = tile(flat, {3, 2, 2});
  std::size_t inside = 0;
  for (const auto& c : trace(tiled.mesh).components) {
    const auto& p = tiled.provenance[c.passages.front().slot.index()];
    if ((p.frame.array() >= 0).all() && p.frame.x() < 3 && p.frame.y() < 2 && p.frame.z() < 2) ++inside;
  }
  EXPECT_EQ(inside, loops * 12);
  EXPECT_THROW(tile(flat, {0, 1, 1}), ValidationError);
}

TEST(Tile, TruncatedOctahedraAndPlanar) {
  const auto block = tile(honeycomb("cI"), {2, 2, 2});
  EXPECT_GT(block.mesh.face_count(), 8u * 7u);
  for (const auto& e : block.mesh.edges()) EXPECT_LE(block.mesh.degree(e), 3);

  const auto hex = tile(honeycomb("hex"), {3, 2, 1});
  EXPECT_EQ(hex.mesh.face_count(), 6u);
  for (const auto& f : hex.mesh.faces()) EXPECT_EQ(f.size(), 6u);
}

TEST(PeriodicDocument, RoundTripAndErrors) {
  const auto pm = honeycomb("cI").with_uniform_twist(2);
  const auto doc = json::parse(periodic_document(pm).dump());
  const auto back = parse_periodic(doc);
  EXPECT_EQ(back.edges(), pm.edges());
  EXPECT_EQ(back.labels().twist, pm.labels().twist);
  EXPECT_EQ(sorted_lengths(trace_periodic(back)), sorted_lengths(trace_periodic(pm)));

  const auto gen = parse_periodic(json::parse(R"({"periodic":{"basis":[[1,0,0],[0,1,0],[0,0,1]],
      "generators":[[0,0,0]],"class_twists":[2,2,2]}})"));
  EXPECT_EQ(trace_periodic(gen).component_count(), 6u);

  EXPECT_THROW(parse_periodic(json::parse(R"({"periodic":{"basis":[[1,0,0]]}})")), ParseError);
  EXPECT_THROW(parse_periodic(json::parse(R"({"periodic":{"basis":[[1,0],[0,1]],"generators":[[0,0]],
      "class_twists":[1]}})")),
               ValidationError);
  EXPECT_THROW(parse_periodic(json::parse(R"({"vertices":[],"faces":[]})")), ParseError);
}

TEST(PeriodicReport, Format) {
  const auto pm = honeycomb("sq").with_uniform_twist(1);
  const auto doc = periodic_report(pm, trace_periodic(pm));
  EXPECT_EQ(doc["threads"], doc["count"]);
  EXPECT_EQ(doc["direction_classes"].size(), 2u);
  EXPECT_EQ(doc["components"][0]["closure_offset"].size(), 2u);
  EXPECT_EQ(doc["repeat_box"].size(), 2u);
}
