#include "fixtures.hpp"
#include "oracles.hpp"
#include "lk/design.hpp"

#include <gtest/gtest.h>

using namespace lk;
using fixtures::ids;
using oracles::tetra_rotation_burnside;

TEST(SpanningTree, CubeTetraIcosahedron) {
  for (const auto& mesh : {fixtures::cube(), fixtures::tetrahedron(), fixtures::icosahedron()}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto knot = spanning_tree_knot(mesh, seed, 1, 0);
      std::size_t odd = 0;
      for (const auto& [e, t] : knot) odd += t % 2 != 0 ? 1 : 0;
      EXPECT_EQ(odd, mesh.face_count() - 1);
      EXPECT_EQ(component_count(mesh.with_twists(knot)), 1u);
    }
  }
  EXPECT_EQ(component_count(fixtures::cube().with_twists(spanning_tree_knot(fixtures::cube(), 3, 1, 2))), 1u);
  EXPECT_EQ(component_count(fixtures::tetrahedron().with_twists(spanning_tree_knot(fixtures::tetrahedron(), 4, 3, 4))),
            1u);
}

TEST(SpanningTree, SeedsAreReproducibleAndVaried) {
  const auto cube = fixtures::cube();
  EXPECT_EQ(spanning_tree_knot(cube, 7), spanning_tree_knot(cube, 7));
  std::set<TwistAssignment> distinct;
  for (std::uint64_t seed = 0; seed < 40; ++seed) distinct.insert(spanning_tree_knot(cube, seed));
  EXPECT_GT(distinct.size(), 5u);
}

TEST(SpanningTree, RandomSpheresAndTori) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const auto mesh = trial % 4 == 3 ? fixtures::torus(3 + trial % 3, 4) : fixtures::random_sphere(rng, 50);
    const auto knot = spanning_tree_knot(mesh, static_cast<std::uint64_t>(trial), 1, 2);
    EXPECT_EQ(component_count(mesh.with_twists(knot)), 1u);
  }
}

TEST(SpanningTree, RefusesNonManifoldAndBadValues) {
  EXPECT_THROW(spanning_tree_knot(fixtures::book(3), 1), PreconditionError);
  EXPECT_THROW(spanning_tree_knot(fixtures::cube(), 1, 2, 0), PreconditionError);
  EXPECT_THROW(spanning_tree_knot(fixtures::cube(), 1, 1, 1), PreconditionError);
  EXPECT_THROW(spanning_tree_knot(fixtures::hinged_tetrahedra(false), 1), PreconditionError);
}

TEST(Chainmail, FaceLoops) {
  const auto tet = fixtures::tetrahedron();
  const auto mail = chainmail(tet);
  for (const auto& [e, t] : mail) EXPECT_EQ(t, 2);
  EXPECT_EQ(component_count(tet.with_twists(mail)), 4u);

  const auto cube = fixtures::cube();
  EXPECT_EQ(component_count(cube.with_twists(chainmail(cube))), 6u);

  std::map<EdgeKey, int> signs;
  for (const auto& e : cube.edges()) signs[e] = (e.a.value + e.b.value) % 2 == 0 ? 1 : -1;
  const auto mixed = chainmail(cube, signs, [](EdgeKey, int k) { return std::int64_t{2} * k; });
  for (const auto& [e, t] : mixed) EXPECT_EQ(t, signs[e] * 4);

  const auto book = fixtures::book(3);
  const auto spine = EdgeKey{VertexId{0}, VertexId{1}};
  const auto book_mail = chainmail(book, {{spine, -1}});
  EXPECT_EQ(book_mail.at(spine), -3);
  EXPECT_EQ(component_count(book.with_twists(book_mail)), 3u);
}

TEST(Chainmail, RejectsNonMultiples) {
  EXPECT_THROW(chainmail(fixtures::book(3), {}, [](EdgeKey, int k) { return k == 3 ? 2 : 0; }), PreconditionError);
  EXPECT_THROW(chainmail(fixtures::cube(), {}, [](EdgeKey, int) { return 0; }), PreconditionError);
  EXPECT_THROW(chainmail(fixtures::cube(), {{EdgeKey{VertexId{0}, VertexId{1}}, 2}}), PreconditionError);
}

TEST(Tighten, KeepsPartition) {
  const auto cube = fixtures::cube();
  const auto knot = spanning_tree_knot(cube, 5);
  const auto base = trace(cube.with_twists(knot)).slot_partition(cube.slot_count());
  for (const auto& [e, t] : knot) {
    if (t != 0) continue;
    const auto tight = tighten(cube, knot, e, 1);
    EXPECT_EQ(tight.at(e), 2);
    EXPECT_EQ(trace(cube.with_twists(tight)).slot_partition(cube.slot_count()), base);
    break;
  }
  const auto e0 = cube.edges()[0];
  EXPECT_EQ(tighten(cube, knot, e0, 0), knot);

  const auto book = fixtures::book(3, 1);
  const auto spine = EdgeKey{VertexId{0}, VertexId{1}};
  const auto t4 = tighten(book, book.twists(), spine, 1);
  EXPECT_EQ(t4.at(spine), 4);
  EXPECT_EQ(component_count(book.with_twists(t4)), 1u);
}

TEST(Automorphisms, GroupOrders) {
  const auto tet = automorphisms(fixtures::tetrahedron());
  EXPECT_EQ(tet.order(), 24u);
  EXPECT_EQ(tet.rotation_order(), 12u);
  const auto cube = automorphisms(fixtures::cube());
  EXPECT_EQ(cube.order(), 48u);
  EXPECT_EQ(cube.rotation_order(), 24u);
  const auto ico = automorphisms(fixtures::icosahedron());
  EXPECT_EQ(ico.order(), 120u);
  EXPECT_EQ(ico.rotation_order(), 60u);

  const auto scalene =
      LabeledMesh::build({{0, 0, 0}, {1, -1, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0.3}, {0, 2, 0.5}, {1, 2, 0.2}},
                         {ids({0, 1, 2}), ids({0, 2, 3}), ids({0, 3, 4}), ids({4, 3, 5}), ids({5, 3, 6})});
  const auto g = automorphisms(scalene);
  EXPECT_EQ(g.order(), 1u);

  EXPECT_THROW(automorphisms(fixtures::torus(4, 4)), PreconditionError);
}

TEST(Automorphisms, ElementsPreserveFaces) {
  const auto cube = fixtures::cube();
  for (const auto& g : automorphisms(cube).elements) {
    std::set<std::size_t> image;
    for (const auto e : g.edge_map) image.insert(e.index());
    EXPECT_EQ(image.size(), cube.edge_count());
  }
}

TEST(Orbits, TetraChainmailTwelve) {
  const auto tet = fixtures::tetrahedron();
  const auto r = enumerate_orbits(tet, {2, -2}, nullptr, GroupMode::Rotations);
  EXPECT_EQ(r.labelings, 64u);
  EXPECT_EQ(r.accepted, 64u);
  EXPECT_EQ(r.group_order, 12u);
  EXPECT_EQ(r.orbit_count, 12u);
  EXPECT_DOUBLE_EQ(r.burnside_count, 12.0);
  EXPECT_DOUBLE_EQ(tetra_rotation_burnside(2), 12.0);
  EXPECT_EQ(r.representatives.size(), 12u);
}

TEST(Orbits, BurnsideAgreesWithExplicitOrbits) {
  const auto tet = fixtures::tetrahedron();
  for (const auto mode : {GroupMode::Rotations, GroupMode::Full, GroupMode::FullWithNegation}) {
    const auto a = enumerate_orbits(tet, {1, -1, 2, -2}, single_cycle, mode);
    EXPECT_DOUBLE_EQ(a.burnside_count, static_cast<double>(a.orbit_count)) << to_string(mode);
    const auto b = enumerate_orbits(tet, {-2, 0, 2}, nullptr, mode);
    EXPECT_DOUBLE_EQ(b.burnside_count, static_cast<double>(b.orbit_count)) << to_string(mode);
  }
  const auto cube = enumerate_orbits(fixtures::cube(), {0, 1}, nullptr, GroupMode::Rotations);
  EXPECT_DOUBLE_EQ(cube.burnside_count, static_cast<double>(cube.orbit_count));
  // Edge 2-colourings of the cube under rotations.
  EXPECT_EQ(cube.orbit_count, 218u);
}

TEST(Orbits, TetraKnotCounts) {
  const auto tet = fixtures::tetrahedron();
  const auto rot = enumerate_orbits(tet, {1, -1, 2, -2}, single_cycle, GroupMode::Rotations);
  EXPECT_EQ(rot.labelings, 4096u);
  EXPECT_EQ(rot.accepted, 1792u);
  EXPECT_EQ(rot.orbit_count, 168u);
  EXPECT_EQ(enumerate_orbits(tet, {1, -1, 2, -2}, single_cycle, GroupMode::Full).orbit_count, 100u);
  EXPECT_EQ(enumerate_orbits(tet, {1, -1, 2, -2}, single_cycle, GroupMode::FullWithNegation).orbit_count, 84u);
}

TEST(Orbits, TrivialPaletteAndRelabelling) {
  const auto cube = fixtures::cube();
  EXPECT_EQ(enumerate_orbits(cube, {0}, nullptr, GroupMode::Rotations).orbit_count, 1u);

  // Relabelling vertex ids does not change the count.
  const auto tet = fixtures::tetrahedron();
  std::vector<Vec3> v(tet.vertices().rbegin(), tet.vertices().rend());
  std::vector<std::vector<VertexId>> f;
  for (const auto& face : tet.faces()) {
    std::vector<VertexId> g;
    for (const auto x : face) g.emplace_back(3 - x.value);
    f.push_back(g);
  }
  const auto relabelled = LabeledMesh::build(v, f);
  for (const auto mode : {GroupMode::Rotations, GroupMode::Full, GroupMode::FullWithNegation}) {
    EXPECT_EQ(enumerate_orbits(tet, {1, -1, 2, -2}, single_cycle, mode).orbit_count,
              enumerate_orbits(relabelled, {1, -1, 2, -2}, single_cycle, mode).orbit_count);
  }
}

TEST(Orbits, BoundsAndModes) {
  EXPECT_THROW(enumerate_orbits(fixtures::icosahedron(), {1, 2, 3}, nullptr, GroupMode::Rotations),
               PreconditionError);
  EXPECT_THROW(enumerate_orbits(fixtures::tetrahedron(), {1, 2}, nullptr, GroupMode::FullWithNegation),
               PreconditionError);
  EXPECT_EQ(parse_group_mode("full"), GroupMode::Full);
  EXPECT_THROW(parse_group_mode("bogus"), ValidationError);
}
