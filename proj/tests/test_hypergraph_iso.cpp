#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "k3hiso/hypergraph_iso.hpp"

using namespace k3h;

namespace {

Perm cyc(int d, std::vector<std::vector<int>> cycles) {
  Perm p(d);
  for (const auto& c : cycles)
    for (std::size_t i = 0; i < c.size(); ++i) p.img[c[i]] = c[(i + 1) % c.size()];
  return p;
}

std::vector<int> identity_map(int n) {
  std::vector<int> id(n);
  for (int i = 0; i < n; ++i) id[i] = i;
  return id;
}

bool hyper_iso_under(const Hypergraph& h1, const Hypergraph& h2, const std::vector<int>& phi) {
  std::set<std::pair<VertexSet, int>> e1, e2;
  for (std::size_t i = 0; i < h1.edges.size(); ++i) {
    VertexSet img;
    for (int v : h1.edges[i]) img.push_back(phi[v]);
    std::sort(img.begin(), img.end());
    e1.insert({img, h1.edge_color(i)});
  }
  for (std::size_t i = 0; i < h2.edges.size(); ++i) e2.insert({h2.edges[i], h2.edge_color(i)});
  return e1 == e2;
}

// Exhaustive filter of the full coset; the independent oracle.
std::set<std::vector<int>> coset_filter(const Hypergraph& h1, const Hypergraph& h2,
                                        const PermGroup& gamma, const std::vector<int>& theta) {
  std::set<std::vector<int>> out;
  for (const Perm& g : gamma.elements(200000)) {
    std::vector<int> phi(gamma.degree());
    for (int x = 0; x < gamma.degree(); ++x) phi[x] = theta[g(x)];
    if (hyper_iso_under(h1, h2, phi)) out.insert(phi);
  }
  return out;
}

Hypergraph random_hypergraph(int n, int m, std::mt19937& rng, bool colors) {
  Hypergraph h;
  h.n = n;
  std::set<std::pair<VertexSet, int>> seen;
  int guard = 0;
  while (static_cast<int>(h.edges.size()) < m && ++guard < 500) {
    int sz = 1 + static_cast<int>(rng() % 3);
    VertexSet e;
    while (static_cast<int>(e.size()) < sz) {
      int v = static_cast<int>(rng() % n);
      if (!set_contains(e, v)) e = set_union(e, {v});
    }
    int c = colors ? static_cast<int>(rng() % 2) : 0;
    if (seen.insert({e, c}).second) {
      bool dup = false;
      for (std::size_t i = 0; i < h.edges.size(); ++i)
        if (h.edges[i] == e) dup = true;  // keep edge sets unique across colors
      if (!dup) {
        h.edges.push_back(e);
        h.edge_colors.push_back(c);
      }
    }
  }
  return h;
}

Hypergraph apply_perm(const Hypergraph& h, const std::vector<int>& pi) {
  Hypergraph out;
  out.n = h.n;
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    VertexSet e;
    for (int v : h.edges[i]) e.push_back(pi[v]);
    std::sort(e.begin(), e.end());
    out.edges.push_back(e);
    out.edge_colors.push_back(h.edge_color(i));
  }
  return out;
}

}  // namespace

TEST_CASE("trivial coset examples") {
  Hypergraph h;
  h.n = 3;
  h.edges = {{0, 1}};
  auto c = iso_coset_hypergraph(h, h, PermGroup(3), identity_map(3));
  REQUIRE(!c.empty);
  CHECK(c.size() == 1);
  CHECK(c.rep == identity_map(3));

  Hypergraph a, b;
  a.n = b.n = 2;
  a.edges = {{0}};
  b.edges = {{1}};
  auto swap_group = PermGroup::from_generators(2, {cyc(2, {{0, 1}})});
  auto d = iso_coset_hypergraph(a, b, swap_group, identity_map(2));
  REQUIRE(!d.empty);
  CHECK(d.size() == 1);
  CHECK(d.rep == std::vector<int>{1, 0});
}

TEST_CASE("coset equals exhaustive filtering on random instances") {
  std::mt19937 rng(71);
  int done = 0;
  while (done < 120) {
    int n = 4 + static_cast<int>(rng() % 4);  // 4..7
    auto gens = [&] {
      std::vector<Perm> gs;
      int k = 1 + static_cast<int>(rng() % 2);
      for (int i = 0; i < k; ++i) {
        std::vector<int> img(n);
        for (int j = 0; j < n; ++j) img[j] = j;
        std::shuffle(img.begin(), img.end(), rng);
        gs.push_back(Perm(img));
      }
      return gs;
    }();
    PermGroup gamma = PermGroup::from_generators(n, gens);
    if (gamma.order() > 5000) continue;

    Hypergraph h1 = random_hypergraph(n, 2 + static_cast<int>(rng() % 5), rng, done % 2 == 0);
    std::vector<int> theta(n);
    for (int i = 0; i < n; ++i) theta[i] = i;
    std::shuffle(theta.begin(), theta.end(), rng);

    // Half the cases get a genuinely matching target.
    Hypergraph h2;
    if (done % 3 != 0) {
      std::vector<int> pi(n);
      for (int i = 0; i < n; ++i) pi[i] = i;
      std::shuffle(pi.begin(), pi.end(), rng);
      h2 = apply_perm(h1, pi);
    } else {
      h2 = random_hypergraph(n, 2 + static_cast<int>(rng() % 5), rng, done % 2 == 0);
    }

    auto expected = coset_filter(h1, h2, gamma, theta);
    auto got = iso_coset_hypergraph(h1, h2, gamma, theta);
    if (expected.empty()) {
      CHECK(got.empty);
    } else {
      REQUIRE(!got.empty);
      CHECK(got.size() == expected.size());
      CHECK(expected.count(got.rep) == 1);
      // group elements map onto the expected set exactly
      std::set<std::vector<int>> realized;
      for (const Perm& g : got.group.elements(10000)) realized.insert(got.apply(g));
      CHECK(realized == expected);
    }
    ++done;
  }
}

TEST_CASE("colored graph coset examples") {
  ColoredGraph c4(4);
  c4.add_edge(0, 1);
  c4.add_edge(1, 2);
  c4.add_edge(2, 3);
  c4.add_edge(3, 0);
  auto d4 = PermGroup::from_generators(4, {cyc(4, {{0, 1, 2, 3}}), cyc(4, {{0, 2}})});
  CHECK(d4.order() == 8);

  auto full = iso_coset_colored_graph(c4, c4, d4, identity_map(4));
  REQUIRE(!full.empty);
  CHECK(full.size() == 8);  // all of D4 preserves this labeling of C4

  ColoredGraph c4r = c4;
  c4r.vertex_colors[0] = 1;
  auto some = iso_coset_colored_graph(c4r, c4r, d4, identity_map(4));
  REQUIRE(!some.empty);
  CHECK(some.size() == 2);  // only the reflection fixing vertex 0 remains

  ColoredGraph p3(3);
  p3.add_edge(0, 1);
  p3.add_edge(1, 2);
  ColoredGraph k3(3);
  k3.add_edge(0, 1);
  k3.add_edge(1, 2);
  k3.add_edge(0, 2);
  auto none = iso_coset_colored_graph(p3, k3, PermGroup(3), identity_map(3));
  CHECK(none.empty);
}

TEST_CASE("colored graph coset equals brute force with arc colors") {
  std::mt19937 rng(99);
  for (int it = 0; it < 40; ++it) {
    int n = 4 + static_cast<int>(rng() % 3);
    ColoredGraph g(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng() % 2) g.add_edge(i, j, static_cast<int>(rng() % 2), static_cast<int>(rng() % 2));
    for (int i = 0; i < n; ++i) g.vertex_colors[i] = static_cast<int>(rng() % 2);

    std::vector<int> pi(n);
    for (int i = 0; i < n; ++i) pi[i] = i;
    std::shuffle(pi.begin(), pi.end(), rng);
    ColoredGraph h(n);
    for (int i = 0; i < n; ++i) h.vertex_colors[pi[i]] = g.vertex_colors[i];
    for (auto [u, v] : g.edges()) h.add_edge(pi[u], pi[v], g.arc_color(u, v), g.arc_color(v, u));

    // Gamma = full symmetric group via generators.
    std::vector<Perm> gens{cyc(n, {{0, 1}})};
    std::vector<int> rot(n);
    for (int i = 0; i < n; ++i) rot[i] = (i + 1) % n;
    gens.push_back(Perm(rot));
    PermGroup sym = PermGroup::from_generators(n, gens);

    auto coset = iso_coset_colored_graph(g, h, sym, identity_map(n));
    REQUIRE(!coset.empty);
    CHECK(coset.contains(pi));
    std::set<std::vector<int>> expected;
    for (const Perm& p : sym.elements(50000)) {
      std::vector<int> phi = p.img;
      if (is_colored_iso(g, h, phi)) expected.insert(phi);
    }
    CHECK(coset.size() == expected.size());
    for (int s = 0; s < 5; ++s) CHECK(expected.count(coset.sample_map(s)) == 1);
  }
}

TEST_CASE("coset composition is consistent on triples") {
  std::mt19937 rng(123);
  for (int it = 0; it < 10; ++it) {
    int n = 5;
    Hypergraph h1 = random_hypergraph(n, 4, rng, false);
    std::vector<int> pi1(n), pi2(n);
    for (int i = 0; i < n; ++i) pi1[i] = pi2[i] = i;
    std::shuffle(pi1.begin(), pi1.end(), rng);
    std::shuffle(pi2.begin(), pi2.end(), rng);
    Hypergraph h2 = apply_perm(h1, pi1);
    Hypergraph h3 = apply_perm(h2, pi2);

    std::vector<Perm> gens{cyc(n, {{0, 1}}), cyc(n, {{0, 1, 2, 3, 4}})};
    PermGroup sym = PermGroup::from_generators(n, gens);
    auto c12 = iso_coset_hypergraph(h1, h2, sym, identity_map(n));
    auto c23 = iso_coset_hypergraph(h2, h3, sym, identity_map(n));
    auto c13 = iso_coset_hypergraph(h1, h3, sym, identity_map(n));
    REQUIRE(!c12.empty);
    REQUIRE(!c23.empty);
    REQUIRE(!c13.empty);
    for (int s = 0; s < 8; ++s) {
      auto f = c12.sample_map(s);
      auto g = c23.sample_map(s * 31 + 7);
      std::vector<int> comp(n);
      for (int x = 0; x < n; ++x) comp[x] = g[f[x]];
      CHECK(c13.contains(comp));
    }
  }
}
