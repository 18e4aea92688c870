#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "k3hiso/fpt_iso.hpp"
#include "k3hiso/matching.hpp"
#include "k3hiso/oracle.hpp"

using namespace k3h;

namespace {

ColoredGraph complete_bipartite(int a, int b) {
  ColoredGraph g(a + b);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j) g.add_edge(i, a + j);
  return g;
}

// Dodecahedron: standard adjacency.
ColoredGraph dodecahedron() {
  ColoredGraph g(20);
  const int edges[30][2] = {{0, 1},   {1, 2},   {2, 3},   {3, 4},   {4, 0},   {0, 5},
                            {1, 6},   {2, 7},   {3, 8},   {4, 9},   {5, 10},  {6, 11},
                            {7, 12},  {8, 13},  {9, 14},  {10, 6},  {11, 7},  {12, 8},
                            {13, 9},  {14, 5},  {10, 15}, {11, 16}, {12, 17}, {13, 18},
                            {14, 19}, {15, 16}, {16, 17}, {17, 18}, {18, 19}, {19, 15}};
  for (auto& e : edges) g.add_edge(e[0], e[1]);
  return g;
}

VertexSet first_valid_s(const ColoredGraph& g) {
  for (int a = 0; a < g.n; ++a)
    for (int b = a + 1; b < g.n; ++b)
      for (int c = b + 1; c < g.n; ++c) {
        VertexSet s{a, b, c};
        if (components_avoiding(g, s).size() == 1) return s;
      }
  throw Error("no suitable triple");
}

}  // namespace

TEST_CASE("match_children via perfect matching") {
  // l = 1 with one compatible pair.
  CHECK(perfect_matching({{1}}));
  // all empty
  CHECK(!perfect_matching({{0, 0}, {0, 0}}));
  // 3-cycle compatibility pattern vs exhaustive permutation check
  std::mt19937 rng(17);
  for (int it = 0; it < 50; ++it) {
    int l = 3;
    std::vector<std::vector<char>> compat(l, std::vector<char>(l));
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < l; ++j) compat[i][j] = rng() % 2;
    bool expect = false;
    std::vector<int> perm{0, 1, 2};
    do {
      bool ok = true;
      for (int i = 0; i < l; ++i) ok &= compat[i][perm[i]];
      expect |= ok;
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(perfect_matching(compat) == expect);
  }
}

TEST_CASE("single-node trees: lambda is the automorphism restriction") {
  // K_4: one bag, lambda at the root = Aut restricted to S.
  ColoredGraph k4(4);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) k4.add_edge(i, j);
  VertexSet s{0, 1, 2};
  Decomposition d1 = decompose(k4, s, 5);
  Decomposition d2 = decompose(k4, s, 5);
  LambdaDp dp(k4, d1, k4, d2);
  const LambdaSet& lam = dp.root_lambda();
  REQUIRE(!lam.empty());
  // S can map onto itself by any of the 3! permutations (K_4 is complete).
  CHECK(lam.maps.size() == 6);
  // self-pair contains the identity
  CHECK(lam.contains_map({0, 1, 2}));

  // group structure: closed under composition and inverses
  std::set<std::vector<int>> maps(lam.maps.begin(), lam.maps.end());
  for (const auto& f : lam.maps)
    for (const auto& g : lam.maps) {
      std::vector<int> comp(3);
      for (int i = 0; i < 3; ++i) {
        int mid = f[i];
        auto pos = std::lower_bound(lam.source.begin(), lam.source.end(), mid) -
                   lam.source.begin();
        comp[i] = g[pos];
      }
      CHECK(maps.count(comp) == 1);
    }
}

TEST_CASE("lambda on a leaf pair matches brute force") {
  std::mt19937 rng(23);
  ColoredGraph g = gen_3connected_planar(12, 99);
  VertexSet s = first_valid_s(g);
  Decomposition d = decompose(g, s, 7);
  auto [g2, pi] = permuted_copy(g, 5);
  VertexSet s2;
  for (int v : s) s2.push_back(pi[v]);
  s2 = sorted_set(s2);
  REQUIRE(components_avoiding(g2, s2).size() == 1);
  Decomposition d2 = decompose(g2, s2, 7);

  LambdaDp dp(g, d, g2, d2);
  const LambdaSet& lam = dp.root_lambda();
  REQUIRE(!lam.empty());

  // Exact equality with brute force: a bijection sigma: S -> S2 is in Lambda
  // iff pinning it pointwise leaves the graphs isomorphic.
  std::vector<int> known;
  for (int v : lam.source) known.push_back(pi[v]);
  CHECK(lam.contains_map(known));

  std::vector<int> targets = lam.target;
  std::sort(targets.begin(), targets.end());
  do {
    ColoredGraph ga = g, gb = g2;
    for (std::size_t i = 0; i < lam.source.size(); ++i) {
      ga.vertex_colors[lam.source[i]] = 1000 + static_cast<int>(i);
      gb.vertex_colors[targets[i]] = 1000 + static_cast<int>(i);
    }
    bool truth = brute_force_iso(ga, gb).has_value();
    CHECK(lam.contains_map(targets) == truth);
  } while (std::next_permutation(targets.begin(), targets.end()));
}

TEST_CASE("isomorphic_k3h_free: permuted dodecahedron") {
  ColoredGraph g1 = dodecahedron();
  auto [g2, pi] = permuted_copy(g1, 42);
  IsoResult r = isomorphic_k3h_free(g1, g2, 7);
  REQUIRE(r.verdict == Verdict::Isomorphic);
  REQUIRE(r.witness.has_value());
  CHECK(is_colored_iso(g1, g2, *r.witness));
}

TEST_CASE("isomorphic_k3h_free: non-isomorphic cubic planar pair") {
  // Cube vs a twisted 8-vertex 3-regular 3-connected planar graph.
  ColoredGraph cube = named_graph("cube");
  ColoredGraph twisted(8);
  // Two squares with crossed rungs: still cubic and 3-connected, but contains
  // 5-cycles (the cube is bipartite), hence non-isomorphic.
  for (int i = 0; i < 4; ++i) {
    twisted.add_edge(i, (i + 1) % 4);
    twisted.add_edge(4 + i, 4 + (i + 1) % 4);
  }
  twisted.add_edge(0, 4);
  twisted.add_edge(1, 5);
  twisted.add_edge(2, 7);
  twisted.add_edge(3, 6);
  REQUIRE(is_3_connected(twisted));
  REQUIRE(!brute_force_iso(cube, twisted).has_value());

  IsoResult r = isomorphic_k3h_free(cube, twisted, 7);
  CHECK(r.verdict == Verdict::NonIsomorphic);
}

TEST_CASE("isomorphic_k3h_free on K_{3,h} behaves honestly") {
  // Hypothesis-violating input: either minor evidence or a correct verdict.
  ColoredGraph k37 = complete_bipartite(3, 7);
  auto [k37p, pi] = permuted_copy(k37, 3);
  IsoResult r = isomorphic_k3h_free(k37, k37p, 7);
  if (r.verdict == Verdict::Isomorphic) {
    REQUIRE(r.witness.has_value());
    CHECK(is_colored_iso(k37, k37p, *r.witness));
  } else {
    CHECK(r.verdict == Verdict::MinorEvidence);
  }

  // A forced-minor-evidence structure (complete tripartite with large blocks).
  ColoredGraph k777(21);
  for (int i = 0; i < 21; ++i)
    for (int j = i + 1; j < 21; ++j)
      if (i / 7 != j / 7) k777.add_edge(i, j);
  IsoResult r2 = isomorphic_k3h_free(k777, k777, 7);
  CHECK(r2.verdict == Verdict::MinorEvidence);
}

TEST_CASE("isomorphic_k3h_free rejects non-3-connected inputs") {
  ColoredGraph path(5);
  for (int i = 0; i + 1 < 5; ++i) path.add_edge(i, i + 1);
  CHECK_THROWS_AS(isomorphic_k3h_free(path, path, 7), PreconditionError);
}

TEST_CASE("pipeline equals oracle on random triangulation pairs") {
  std::mt19937 rng(29);
  for (int it = 0; it < 12; ++it) {
    int n = 6 + static_cast<int>(rng() % 15);
    ColoredGraph g1 = gen_3connected_planar(n, rng());
    bool make_iso = it % 2 == 0;
    ColoredGraph g2;
    if (make_iso) {
      g2 = permuted_copy(g1, rng()).first;
    } else {
      g2 = permuted_copy(tweak_nonisomorphic(g1, rng()), rng()).first;
    }
    IsoResult r = isomorphic_k3h_free(g1, g2, 7);
    bool oracle = brute_force_iso(g1, g2).has_value();
    CHECK(oracle == make_iso);
    REQUIRE(r.verdict != Verdict::MinorEvidence);
    CHECK((r.verdict == Verdict::Isomorphic) == oracle);
    if (r.verdict == Verdict::Isomorphic) CHECK(is_colored_iso(g1, g2, *r.witness));
  }
}

TEST_CASE("colored inputs are respected") {
  ColoredGraph g1 = gen_3connected_planar(10, 7);
  auto [g2, pi] = permuted_copy(g1, 8);
  // Color one vertex differently in g1 only: verdict flips to non-iso.
  ColoredGraph g1c = g1;
  g1c.vertex_colors[0] = 5;
  IsoResult r = isomorphic_k3h_free(g1c, g2, 7);
  CHECK(r.verdict == Verdict::NonIsomorphic);

  // Transport the color along pi: iso again, witness respects colors.
  ColoredGraph g2c = g2;
  g2c.vertex_colors[pi[0]] = 5;
  IsoResult r2 = isomorphic_k3h_free(g1c, g2c, 7);
  REQUIRE(r2.verdict == Verdict::Isomorphic);
  CHECK(is_colored_iso(g1c, g2c, *r2.witness));

  // Arc colors too.
  ColoredGraph g1a = g1, g2a = g2;
  auto [u, v] = g1.edges().front();
  g1a.set_arc_color(u, v, 9);
  IsoResult r3 = isomorphic_k3h_free(g1a, g2a, 7);
  CHECK(r3.verdict == Verdict::NonIsomorphic);
  g2a.set_arc_color(pi[u], pi[v], 9);
  IsoResult r4 = isomorphic_k3h_free(g1a, g2a, 7);
  REQUIRE(r4.verdict == Verdict::Isomorphic);
  CHECK(is_colored_iso(g1a, g2a, *r4.witness));
}

TEST_CASE("randomized colored pairs match the oracle") {
  std::mt19937 rng(97);
  for (int it = 0; it < 10; ++it) {
    int n = 6 + static_cast<int>(rng() % 12);
    ColoredGraph g1 = gen_3connected_planar(n, rng());
    for (int v = 0; v < n; ++v) g1.vertex_colors[v] = static_cast<int>(rng() % 3);
    for (auto [u, v] : g1.edges()) {
      g1.set_arc_color(u, v, static_cast<int>(rng() % 2));
      g1.set_arc_color(v, u, static_cast<int>(rng() % 2));
    }
    ColoredGraph g2;
    if (it % 2 == 0) {
      g2 = permuted_copy(g1, rng()).first;
    } else {
      // recolor one vertex: almost surely non-isomorphic as colored graphs
      g2 = permuted_copy(g1, rng()).first;
      g2.vertex_colors[static_cast<int>(rng() % n)] += 7;
    }
    bool oracle = brute_force_iso(g1, g2).has_value();
    IsoResult r = isomorphic_k3h_free(g1, g2, 7);
    REQUIRE(r.verdict != Verdict::MinorEvidence);
    CHECK((r.verdict == Verdict::Isomorphic) == oracle);
    if (r.verdict == Verdict::Isomorphic) CHECK(is_colored_iso(g1, g2, *r.witness));
  }
}

TEST_CASE("gadget pair construction invariants") {
  // A graph with a genuinely deep decomposition would exercise gadgets with
  // children; stacked triangulations usually give single-bag trees, so this
  // checks the degenerate gadget too.
  ColoredGraph g = gen_3connected_planar(16, 123);
  VertexSet s = first_valid_s(g);
  Decomposition d = decompose(g, s, 7);
  LambdaDp dp(g, d, g, d);
  auto [ha, hb] = dp.build_gadget_pair(0, d.root, 1, d.root);
  CHECK(ha.h.n == hb.h.n);
  CHECK(ha.a_set.size() == hb.a_set.size());
  // A-set fully inside the anchored closure was asserted during construction;
  // re-check the bag is inside A.
  CHECK(set_intersection(ha.bag_local, sorted_set(ha.a_set)) == ha.bag_local);
}

TEST_CASE("multi-node trees: options, gadgets and cross-component witnesses") {
  // K_{3,5} decomposes into a root, a regroup node and five leaves, driving
  // the gadget construction, the matching-based option and the assembly of a
  // witness across components.
  ColoredGraph k35 = complete_bipartite(3, 5);
  VertexSet s = first_valid_s(k35);
  Decomposition d = decompose(k35, s, 7);
  CHECK(d.nodes.size() == 6);
  int regroup = 0;
  for (const auto& nd : d.nodes) regroup += nd.regroup_node ? 1 : 0;
  CHECK(regroup == 1);

  auto [g2, pi] = permuted_copy(k35, 17);
  IsoResult r = isomorphic_k3h_free(k35, g2, 7);
  REQUIRE(r.verdict == Verdict::Isomorphic);
  CHECK(is_colored_iso(k35, g2, *r.witness));

  // Distinguishing children by color: one red right-side vertex must match a
  // red right-side vertex on the other side.
  ColoredGraph a = k35, b = g2;
  a.vertex_colors[4] = 9;  // a right-side vertex
  IsoResult r2 = isomorphic_k3h_free(a, b, 7);
  CHECK(r2.verdict == Verdict::NonIsomorphic);

  b.vertex_colors[pi[4]] = 9;
  IsoResult r3 = isomorphic_k3h_free(a, b, 7);
  REQUIRE(r3.verdict == Verdict::Isomorphic);
  CHECK(is_colored_iso(a, b, *r3.witness));
  CHECK((*r3.witness)[4] == pi[4]);  // the red child pairs up with the red child

  // Two red children on one side vs split colors on the other: non-isomorphic.
  ColoredGraph c = k35;
  c.vertex_colors[4] = 9;
  c.vertex_colors[5] = 9;
  ColoredGraph e = k35;
  e.vertex_colors[4] = 9;
  e.vertex_colors[5] = 10;
  CHECK(isomorphic_k3h_free(c, e, 7).verdict == Verdict::NonIsomorphic);
}

TEST_CASE("isomorphic_genus delegates with h = 4g + 3") {
  ColoredGraph k5 = named_graph("k5");
  auto [k5p, pi] = permuted_copy(k5, 11);
  IsoResult r = isomorphic_genus(k5, k5p, 1);
  CHECK(r.h == 7);
  REQUIRE(r.verdict == Verdict::Isomorphic);
  CHECK(is_colored_iso(k5, k5p, *r.witness));

  // Planar pair with genus 0 (h = 3).
  ColoredGraph g = gen_3connected_planar(9, 77);
  auto [gp, pi2] = permuted_copy(g, 78);
  IsoResult r2 = isomorphic_genus(g, gp, 0);
  CHECK(r2.h == 3);
  REQUIRE(r2.verdict == Verdict::Isomorphic);
  CHECK(is_colored_iso(g, gp, *r2.witness));
}

TEST_CASE("toroidal library pairs match the oracle") {
  for (const std::string& name : {"k5", "k33", "c3xc3", "k7"}) {
    ColoredGraph g = named_graph(name);
    auto [gp, pi] = permuted_copy(g, 13);
    IsoResult r = isomorphic_k3h_free(g, gp, 7);
    INFO(name);
    REQUIRE(r.verdict == Verdict::Isomorphic);
    CHECK(is_colored_iso(g, gp, *r.witness));
  }
  // Cross pairs: same size, non-isomorphic.
  {
    ColoredGraph a = named_graph("k33");
    ColoredGraph b = named_graph("prism");
    IsoResult r = isomorphic_k3h_free(a, b, 7);
    CHECK(r.verdict == Verdict::NonIsomorphic);
  }
  {
    ColoredGraph a = named_graph("k5");
    ColoredGraph b = named_graph("w4");
    IsoResult r = isomorphic_k3h_free(a, b, 7);
    CHECK(r.verdict == Verdict::NonIsomorphic);
  }
}
