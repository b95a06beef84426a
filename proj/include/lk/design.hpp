#pragma once

#include "lk/strands.hpp"

#include <random>
#include <unordered_map>

namespace lk {

/// Picks a random spanning tree of the dual graph (seeded edge weights,
/// Kruskal) and twists tree edges by odd_value, the other interior edges by
/// even_value. Boundary edges stay 0. The result traces to one strand.
inline TwistAssignment spanning_tree_knot(const LabeledMesh& mesh, std::uint64_t seed, std::int64_t odd_value = 1,
                                          std::int64_t even_value = 0) {
  if (mod(odd_value, 2) != 1) throw PreconditionError("odd_value must be odd");
  if (mod(even_value, 2) != 0) throw PreconditionError("even_value must be even");
  for (std::size_t e = 0; e < mesh.edge_count(); ++e) {
    if (mesh.degree(EdgeIndex{e}) > 2) {
      throw PreconditionError("spanning-tree knots need a 2-manifold; edge " + to_string(mesh.edge_key(EdgeIndex{e})) +
                              " has " + std::to_string(mesh.degree(EdgeIndex{e})) + " faces");
    }
  }
  const auto dual = dual_graph(mesh);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(dual.links.size());
  for (std::size_t i = 0; i < dual.links.size(); ++i) order.emplace_back(unit(rng), i);
  std::sort(order.begin(), order.end());

  detail::DisjointSets forest(dual.node_count);
  std::vector<char> in_tree(mesh.edge_count(), 0);
  std::size_t tree_size = 0;
  for (const auto& [w, i] : order) {
    const auto& link = dual.links[i];
    if (forest.unite(link.a.index(), link.b.index())) {
      in_tree[link.edge.index()] = 1;
      ++tree_size;
    }
  }
  if (tree_size + 1 != dual.node_count) throw PreconditionError("dual graph is disconnected");

  TwistAssignment out;
  for (std::size_t e = 0; e < mesh.edge_count(); ++e) {
    if (mesh.degree(EdgeIndex{e}) != 2) continue;
    out[mesh.edge_key(EdgeIndex{e})] = in_tree[e] != 0 ? odd_value : even_value;
  }
  const auto count = component_count(mesh.without_nulls().with_twists(out));
  if (count != 1) throw std::logic_error("spanning-tree labeling produced " + std::to_string(count) + " strands");
  return out;
}

/// Default chainmail magnitude: 2 on interior manifold edges, K on
/// non-manifold edges, 0 on boundary edges.
inline std::int64_t default_chainmail_magnitude(int k) { return k == 1 ? 0 : k; }

/// Every edge gets sign * magnitude, a multiple of its degree, so every face
/// stays its own loop. Edges missing from signs default to +1.
inline TwistAssignment chainmail(const LabeledMesh& mesh, const std::map<EdgeKey, int>& signs,
                                 const std::function<std::int64_t(EdgeKey, int)>& magnitude) {
  TwistAssignment out;
  for (std::size_t e = 0; e < mesh.edge_count(); ++e) {
    const auto key = mesh.edge_key(EdgeIndex{e});
    const int k = mesh.degree(EdgeIndex{e});
    const auto it = signs.find(key);
    const int sign = it == signs.end() ? 1 : it->second;
    if (sign != 1 && sign != -1) throw PreconditionError("chainmail sign must be +1 or -1 on " + to_string(key));
    const auto m = magnitude(key, k);
    if (k > 1 && (m == 0 || mod(m, k) != 0)) {
      throw PreconditionError("chainmail magnitude " + std::to_string(m) + " on edge " + to_string(key) +
                              " is not a nonzero multiple of K=" + std::to_string(k));
    }
    out[key] = sign * m;
  }
  const auto strands = trace(mesh.without_nulls().with_twists(out));
  if (strands.component_count() != mesh.face_count()) throw std::logic_error("chainmail did not preserve face loops");
  for (const auto& c : strands.components) {
    const auto face = mesh.complex().slot(c.passages.front().slot).face;
    if (c.length() != static_cast<std::size_t>(mesh.complex().face_size(face))) {
      throw std::logic_error("chainmail component is not a face loop");
    }
  }
  return out;
}

inline TwistAssignment chainmail(const LabeledMesh& mesh, const std::map<EdgeKey, int>& signs = {}) {
  return chainmail(mesh, signs, [](EdgeKey, int k) { return default_chainmail_magnitude(k); });
}

/// t_e -> t_e + m K_e. The strand partition does not change.
inline TwistAssignment tighten(const LabeledMesh& mesh, TwistAssignment assignment, EdgeKey edge, std::int64_t m) {
  const int k = mesh.degree(edge);
  auto& t = assignment[edge];
  t += m * k;
  return assignment;
}

struct Automorphism {
  std::vector<VertexId> vertex_map;
  std::vector<EdgeIndex> edge_map;
  int orientation = 1;  // -1 when faces map onto reversed cycles
};

struct SymmetryGroup {
  std::vector<Automorphism> elements;

  [[nodiscard]] std::size_t order() const { return elements.size(); }
  [[nodiscard]] std::size_t rotation_order() const {
    return static_cast<std::size_t>(
        std::count_if(elements.begin(), elements.end(), [](const auto& g) { return g.orientation == 1; }));
  }
};

namespace detail {

/// Rotation of the cycle starting at its smallest vertex.
inline std::vector<VertexId> canonical_cycle(std::vector<VertexId> cycle) {
  std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
  return cycle;
}

inline std::vector<VertexId> reversed_cycle(std::vector<VertexId> cycle) {
  std::reverse(cycle.begin(), cycle.end());
  return cycle;
}

}  // namespace detail

/// All vertex permutations that map the face multiset onto itself, either
/// keeping every face cycle's direction (+1) or reversing all of them (-1).
/// Brute force with edge-adjacency pruning; refuses meshes above max_vertices.
inline SymmetryGroup automorphisms(const LabeledMesh& mesh, std::size_t max_vertices = 12) {
  const auto n = mesh.vertex_count();
  if (n > max_vertices) {
    throw PreconditionError("automorphism search limited to " + std::to_string(max_vertices) + " vertices");
  }
  std::vector<std::vector<char>> adjacent(n, std::vector<char>(n, 0));
  std::vector<int> incidence(n, 0);
  for (const auto& e : mesh.edges()) adjacent[e.a.index()][e.b.index()] = adjacent[e.b.index()][e.a.index()] = 1;
  for (const auto& face : mesh.faces()) {
    for (const auto v : face) ++incidence[v.index()];
  }
  std::map<std::vector<VertexId>, int> face_multiset;
  for (const auto& face : mesh.faces()) ++face_multiset[detail::canonical_cycle(face)];

  const auto maps_faces = [&](const std::vector<VertexId>& perm, bool reverse) {
    std::map<std::vector<VertexId>, int> image;
    for (const auto& face : mesh.faces()) {
      std::vector<VertexId> mapped;
      mapped.reserve(face.size());
      for (const auto v : face) mapped.push_back(perm[v.index()]);
      if (reverse) mapped = detail::reversed_cycle(std::move(mapped));
      ++image[detail::canonical_cycle(std::move(mapped))];
    }
    return image == face_multiset;
  };

  SymmetryGroup group;
  std::vector<VertexId> perm(n);
  std::vector<char> used(n, 0);
  const std::function<void(std::size_t)> search = [&](std::size_t v) {
    if (v == n) {
      for (const bool reverse : {false, true}) {
        if (!maps_faces(perm, reverse)) continue;
        Automorphism g;
        g.vertex_map = perm;
        g.orientation = reverse ? -1 : 1;
        for (const auto& e : mesh.edges()) {
          g.edge_map.push_back(mesh.edge_index(EdgeKey::of(perm[e.a.index()], perm[e.b.index()])));
        }
        group.elements.push_back(std::move(g));
      }
      return;
    }
    for (std::size_t w = 0; w < n; ++w) {
      if (used[w] != 0 || incidence[w] != incidence[v]) continue;
      bool ok = true;
      for (std::size_t u = 0; u < v && ok; ++u) ok = adjacent[u][v] == adjacent[perm[u].index()][w];
      if (!ok) continue;
      used[w] = 1;
      perm[v] = VertexId{w};
      search(v + 1);
      used[w] = 0;
    }
  };
  search(0);
  return group;
}

enum class GroupMode { Rotations, Full, FullWithNegation };

inline GroupMode parse_group_mode(std::string_view name) {
  if (name == "rotations") return GroupMode::Rotations;
  if (name == "full") return GroupMode::Full;
  if (name == "full_with_negation") return GroupMode::FullWithNegation;
  throw ValidationError("unknown group mode '" + std::string(name) + "'");
}

inline std::string to_string(GroupMode mode) {
  switch (mode) {
    case GroupMode::Rotations: return "rotations";
    case GroupMode::Full: return "full";
    case GroupMode::FullWithNegation: return "full_with_negation";
  }
  return "";
}

struct OrbitEnumeration {
  std::uint64_t labelings = 0;  // palette^edges
  std::uint64_t accepted = 0;   // labelings passing the predicate
  std::uint64_t orbit_count = 0;
  double burnside_count = 0.0;  // independent average of fixed points
  std::size_t group_order = 0;
  std::vector<std::vector<std::int64_t>> representatives;  // per-edge twists, by edge index
};

using StrandPredicate = std::function<bool(const StrandSet&)>;

inline bool single_cycle(const StrandSet& s) { return s.component_count() == 1 && s.cycle_count() == 1; }

/// Exhaustive labelings of edges by palette values, filtered by predicate
/// (null means accept all) and grouped into orbits under the chosen group
/// action. The predicate is evaluated once per pattern of residues t mod K.
inline OrbitEnumeration enumerate_orbits(const LabeledMesh& mesh, std::vector<std::int64_t> palette,
                                         const StrandPredicate& predicate, GroupMode mode,
                                         std::uint64_t bound = 10'000'000) {
  std::sort(palette.begin(), palette.end());
  palette.erase(std::unique(palette.begin(), palette.end()), palette.end());
  if (palette.empty()) throw PreconditionError("empty palette");
  const std::size_t edges = mesh.edge_count();
  const std::uint64_t base = palette.size();

  OrbitEnumeration out;
  out.labelings = 1;
  for (std::size_t e = 0; e < edges; ++e) {
    if (out.labelings > bound / base) throw PreconditionError("enumeration exceeds bound");
    out.labelings *= base;
  }

  std::vector<std::size_t> negated(base);
  for (std::size_t i = 0; i < base; ++i) {
    const auto it = std::lower_bound(palette.begin(), palette.end(), -palette[i]);
    if (it == palette.end() || *it != -palette[i]) {
      negated[i] = base;
    } else {
      negated[i] = static_cast<std::size_t>(it - palette.begin());
    }
  }

  const auto full = automorphisms(mesh);
  std::vector<const Automorphism*> group;
  for (const auto& g : full.elements) {
    if (mode == GroupMode::Rotations && g.orientation != 1) continue;
    if (mode == GroupMode::FullWithNegation && g.orientation == -1) {
      for (std::size_t i = 0; i < base; ++i) {
        if (negated[i] == base) throw PreconditionError("negation needs a palette closed under sign change");
      }
    }
    group.push_back(&g);
  }
  out.group_order = group.size();
  const auto flips = [&](const Automorphism& g) { return mode == GroupMode::FullWithNegation && g.orientation == -1; };

  // Residue patterns: per edge, palette index -> residue class index.
  std::vector<std::vector<std::size_t>> residue_class(edges, std::vector<std::size_t>(base));
  std::vector<std::uint64_t> pattern_radix(edges);
  std::vector<std::vector<std::int64_t>> class_value(edges);
  for (std::size_t e = 0; e < edges; ++e) {
    const int k = mesh.degree(EdgeIndex{e});
    std::map<std::int64_t, std::size_t> seen;
    for (std::size_t i = 0; i < base; ++i) {
      const auto r = mod(palette[i], k);
      const auto [it, inserted] = seen.emplace(r, class_value[e].size());
      if (inserted) class_value[e].push_back(palette[i]);
      residue_class[e][i] = it->second;
    }
    pattern_radix[e] = class_value[e].size();
  }
  std::uint64_t patterns = 1;
  for (const auto r : pattern_radix) patterns *= r;

  const auto plain = mesh.without_nulls();
  std::vector<char> pattern_ok(patterns, 1);
  if (predicate) {
    parallel_for(patterns, [&](std::size_t x) {
      std::vector<std::int64_t> twists(edges);
      auto rest = static_cast<std::uint64_t>(x);
      for (std::size_t e = 0; e < edges; ++e) {
        twists[e] = class_value[e][rest % pattern_radix[e]];
        rest /= pattern_radix[e];
      }
      pattern_ok[x] = predicate(trace(plain.with_twist_vector(std::move(twists)))) ? 1 : 0;
    });
  }

  const auto digits_of = [&](std::uint64_t x, std::vector<std::size_t>& digits) {
    for (std::size_t e = 0; e < edges; ++e) {
      digits[e] = x % base;
      x /= base;
    }
  };
  const auto accepted = [&](const std::vector<std::size_t>& digits) {
    std::uint64_t x = 0;
    for (std::size_t e = edges; e-- > 0;) x = x * pattern_radix[e] + residue_class[e][digits[e]];
    return pattern_ok[x] != 0;
  };
  const auto encode = [&](const std::vector<std::size_t>& digits) {
    std::uint64_t x = 0;
    for (std::size_t e = edges; e-- > 0;) x = x * base + digits[e];
    return x;
  };

  // Explicit orbits: a labeling represents its orbit when it is the
  // smallest image under the group.
  const auto chunks = std::max<std::size_t>(1, thread_count()) * 4;
  std::vector<std::uint64_t> chunk_accepted(chunks, 0);
  std::vector<std::vector<std::uint64_t>> chunk_reps(chunks);
  std::vector<std::string> chunk_error(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    std::vector<std::size_t> digits(edges);
    std::vector<std::size_t> image(edges);
    const auto lo = out.labelings * c / chunks;
    const auto hi = out.labelings * (c + 1) / chunks;
    for (auto x = lo; x < hi; ++x) {
      digits_of(x, digits);
      if (!accepted(digits)) continue;
      ++chunk_accepted[c];
      bool minimal = true;
      for (const auto* g : group) {
        for (std::size_t e = 0; e < edges; ++e) {
          image[g->edge_map[e].index()] = flips(*g) ? negated[digits[e]] : digits[e];
        }
        if (!accepted(image)) {
          chunk_error[c] = "predicate is not invariant under the symmetry group";
          return;
        }
        if (encode(image) < x) minimal = false;
      }
      if (minimal) chunk_reps[c].push_back(x);
    }
  });
  for (std::size_t c = 0; c < chunks; ++c) {
    if (!chunk_error[c].empty()) throw PreconditionError(chunk_error[c]);
    out.accepted += chunk_accepted[c];
    for (const auto x : chunk_reps[c]) {
      std::vector<std::size_t> digits(edges);
      digits_of(x, digits);
      std::vector<std::int64_t> rep(edges);
      for (std::size_t e = 0; e < edges; ++e) rep[e] = palette[digits[e]];
      out.representatives.push_back(std::move(rep));
    }
  }
  out.orbit_count = out.representatives.size();

  // Burnside: average number of accepted labelings fixed by each element,
  // built cycle by cycle from the element's edge permutation.
  std::uint64_t fixed_total = 0;
  for (const auto* g : group) {
    std::vector<std::vector<std::size_t>> cycles;
    std::vector<char> done(edges, 0);
    for (std::size_t e = 0; e < edges; ++e) {
      if (done[e] != 0) continue;
      std::vector<std::size_t> cyc;
      for (std::size_t x = e; done[x] == 0; x = g->edge_map[x].index()) {
        done[x] = 1;
        cyc.push_back(x);
      }
      cycles.push_back(std::move(cyc));
    }
    const bool flip = flips(*g);
    const auto admissible = [&](std::size_t value, std::size_t len) {
      return !flip || len % 2 == 0 || negated[value] == value;
    };
    if (!predicate) {
      std::uint64_t count = 1;
      for (const auto& cyc : cycles) {
        std::uint64_t choices = 0;
        for (std::size_t v = 0; v < base; ++v) choices += admissible(v, cyc.size()) ? 1 : 0;
        count *= choices;
      }
      fixed_total += count;
      continue;
    }
    std::vector<std::size_t> choice(cycles.size(), 0);
    std::vector<std::size_t> digits(edges);
    while (true) {
      bool ok = true;
      for (std::size_t c = 0; c < cycles.size() && ok; ++c) {
        ok = admissible(choice[c], cycles[c].size());
        std::size_t v = choice[c];
        for (const auto e : cycles[c]) {
          digits[e] = v;
          if (flip) v = negated[v];
        }
      }
      if (ok && accepted(digits)) ++fixed_total;
      std::size_t c = 0;
      while (c < cycles.size() && ++choice[c] == base) choice[c++] = 0;
      if (c == cycles.size()) break;
    }
  }
  out.burnside_count = group.empty() ? 0.0 : static_cast<double>(fixed_total) / static_cast<double>(group.size());
  return out;
}

}  // namespace lk
