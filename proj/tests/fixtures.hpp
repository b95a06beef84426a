#pragma once

// Mesh builders shared by the unit tests and the acceptance runner.

#include "lk/mesh.hpp"

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

namespace lk::fixtures {

inline std::vector<VertexId> ids(std::initializer_list<int> list) {
  std::vector<VertexId> out;
  for (const int v : list) out.emplace_back(v);
  return out;
}

inline LabeledMesh tetrahedron() {
  return LabeledMesh::build({{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}},
                            {ids({0, 1, 2}), ids({0, 3, 1}), ids({0, 2, 3}), ids({1, 3, 2})});
}

inline LabeledMesh cube() {
  std::vector<Vec3> v;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      for (int z = 0; z < 2; ++z) v.emplace_back(x, y, z);
    }
  }
  const auto c = [](int x, int y, int z) { return 4 * x + 2 * y + z; };
  return LabeledMesh::build(v, {ids({c(0, 0, 0), c(0, 1, 0), c(1, 1, 0), c(1, 0, 0)}),
                                ids({c(0, 0, 1), c(1, 0, 1), c(1, 1, 1), c(0, 1, 1)}),
                                ids({c(0, 0, 0), c(1, 0, 0), c(1, 0, 1), c(0, 0, 1)}),
                                ids({c(0, 1, 0), c(0, 1, 1), c(1, 1, 1), c(1, 1, 0)}),
                                ids({c(0, 0, 0), c(0, 0, 1), c(0, 1, 1), c(0, 1, 0)}),
                                ids({c(1, 0, 0), c(1, 1, 0), c(1, 1, 1), c(1, 0, 1)})});
}

inline LabeledMesh icosahedron() {
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0}, {0, -1, p}, {0, 1, p},
                         {0, -1, -p}, {0, 1, -p}, {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
  std::vector<std::vector<VertexId>> f = {
      ids({0, 11, 5}), ids({0, 5, 1}),  ids({0, 1, 7}),   ids({0, 7, 10}), ids({0, 10, 11}),
      ids({1, 5, 9}),  ids({5, 11, 4}), ids({11, 10, 2}), ids({10, 7, 6}), ids({7, 1, 8}),
      ids({3, 9, 4}),  ids({3, 4, 2}),  ids({3, 2, 6}),   ids({3, 6, 8}),  ids({3, 8, 9}),
      ids({4, 9, 5}),  ids({2, 4, 11}), ids({6, 2, 10}),  ids({8, 6, 7}),  ids({9, 8, 1})};
  return LabeledMesh::build(v, f);
}

/// K quads sharing the spine 0-1, fanned at equal angles.
inline LabeledMesh book(int k, std::int64_t spine_twist = 0) {
  std::vector<Vec3> v = {{0, 0, 0}, {0, 0, 1}};
  std::vector<std::vector<VertexId>> f;
  for (int j = 0; j < k; ++j) {
    const double th = 2.0 * std::numbers::pi * j / k;
    v.emplace_back(std::cos(th), std::sin(th), 0.0);
    v.emplace_back(std::cos(th), std::sin(th), 1.0);
    f.push_back(ids({0, 1, 3 + 2 * j, 2 + 2 * j}));
  }
  return LabeledMesh::build(v, f).with_twist(EdgeKey{VertexId{0}, VertexId{1}}, spine_twist);
}

/// Two quads hinged on the edge 0-1, which carries twist t.
inline LabeledMesh strip(std::int64_t t = 0) {
  return LabeledMesh::build({{0, 0, 0}, {0, 0, 1}, {1, 0, 0}, {1, 0, 1}, {-1, 0.2, 0}, {-1, 0.2, 1}},
                            {ids({0, 1, 3, 2}), ids({1, 0, 4, 5})})
      .with_twist(EdgeKey{VertexId{0}, VertexId{1}}, t);
}

/// Regular n-gon and its reverse, sharing every edge.
inline LabeledMesh two_sided_polygon(int n) {
  std::vector<Vec3> v;
  std::vector<VertexId> front;
  std::vector<VertexId> back = {VertexId{0}};
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * std::numbers::pi * i / n;
    v.emplace_back(std::cos(th), std::sin(th), 0.0);
    front.emplace_back(i);
  }
  for (int i = n - 1; i > 0; --i) back.emplace_back(i);
  return LabeledMesh::build(v, {front, back});
}

/// Two tetrahedra joined at one vertex (hinge = vertex) or one edge.
inline LabeledMesh hinged_tetrahedra(bool share_edge) {
  std::vector<Vec3> v = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  std::vector<std::vector<VertexId>> f = {ids({0, 2, 1}), ids({0, 1, 3}), ids({0, 3, 2}), ids({1, 2, 3})};
  if (share_edge) {
    v.emplace_back(0, -1, 0);
    v.emplace_back(0, 0, -1);
    f.push_back(ids({0, 1, 4}));
    f.push_back(ids({0, 4, 5}));
    f.push_back(ids({0, 5, 1}));
    f.push_back(ids({1, 5, 4}));
  } else {
    v.emplace_back(-1, 0, 0);
    v.emplace_back(0, -1, 0);
    v.emplace_back(0, 0, -1);
    f.push_back(ids({0, 4, 5}));
    f.push_back(ids({0, 5, 6}));
    f.push_back(ids({0, 6, 4}));
    f.push_back(ids({4, 6, 5}));
  }
  return LabeledMesh::build(v, f);
}

/// Octahedron with random triangle splits, new vertices pushed onto the
/// unit sphere. At most max_faces faces.
inline LabeledMesh random_sphere(std::mt19937_64& rng, int max_faces) {
  std::vector<Vec3> v = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  std::vector<std::array<int, 3>> f = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                                       {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  std::uniform_int_distribution<int> extra(0, std::max(0, (max_faces - 8) / 2));
  const int splits = extra(rng);
  for (int s = 0; s < splits; ++s) {
    std::uniform_int_distribution<std::size_t> pick(0, f.size() - 1);
    const auto i = pick(rng);
    const auto [a, b, c] = f[i];
    Vec3 centroid = (v[a] + v[b] + v[c]) / 3.0;
    v.push_back(centroid.normalized());
    const int n = static_cast<int>(v.size()) - 1;
    f[i] = {a, b, n};
    f.push_back({b, c, n});
    f.push_back({c, a, n});
  }
  std::vector<std::vector<VertexId>> faces;
  for (const auto& t : f) faces.push_back(ids({t[0], t[1], t[2]}));
  return LabeledMesh::build(v, faces);
}

/// Triangulated torus on an n x m grid.
inline LabeledMesh torus(int n, int m) {
  std::vector<Vec3> v;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const double u = 2.0 * std::numbers::pi * i / n;
      const double w = 2.0 * std::numbers::pi * j / m;
      v.emplace_back((2.0 + std::cos(w)) * std::cos(u), (2.0 + std::cos(w)) * std::sin(u), std::sin(w));
    }
  }
  const auto id = [&](int i, int j) { return ((i % n) * m) + (j % m); };
  std::vector<std::vector<VertexId>> f;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      f.push_back(ids({id(i, j), id(i + 1, j), id(i + 1, j + 1)}));
      f.push_back(ids({id(i, j), id(i + 1, j + 1), id(i, j + 1)}));
    }
  }
  return LabeledMesh::build(v, f);
}

/// Uniform random twists in [-range, range] on every edge.
inline LabeledMesh random_twists(const LabeledMesh& mesh, std::mt19937_64& rng, int range = 4) {
  std::uniform_int_distribution<int> t(-range, range);
  std::vector<std::int64_t> twists(mesh.edge_count());
  for (auto& x : twists) x = t(rng);
  return mesh.with_twist_vector(twists);
}

}  // namespace lk::fixtures
