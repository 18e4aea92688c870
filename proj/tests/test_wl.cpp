#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <random>
#include <set>

#include "k3hiso/wl.hpp"

using namespace k3h;

namespace {

ColoredGraph path(int n) {
  ColoredGraph g(n);
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  return g;
}

ColoredGraph cycle(int n) {
  ColoredGraph g = path(n);
  g.add_edge(n - 1, 0);
  return g;
}

ColoredGraph complete(int n) {
  ColoredGraph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

ColoredGraph two_triangles() {
  ColoredGraph g(6);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(2, 0);
  g.add_edge(3, 4);
  g.add_edge(4, 5);
  g.add_edge(5, 3);
  return g;
}

ColoredGraph random_graph(int n, double p, std::mt19937& rng) {
  ColoredGraph g(n);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng) < p) g.add_edge(i, j);
  return g;
}

ColoredGraph permute(const ColoredGraph& g, const std::vector<int>& pi) {
  ColoredGraph out(g.n);
  for (int v = 0; v < g.n; ++v) out.vertex_colors[pi[v]] = g.vertex_colors[v];
  for (auto [u, v] : g.edges())
    out.add_edge(pi[u], pi[v], g.arc_color(u, v), g.arc_color(v, u));
  return out;
}

std::vector<int> random_perm(int n, std::mt19937& rng) {
  std::vector<int> pi(n);
  for (int i = 0; i < n; ++i) pi[i] = i;
  std::shuffle(pi.begin(), pi.end(), rng);
  return pi;
}

// Literal 1-WL fixpoint using maps of multisets, independent of the library's
// canonical-id machinery.
std::vector<int> naive_wl1(const ColoredGraph& g, std::vector<int> col) {
  for (int round = 0; round < g.n + 1; ++round) {
    std::map<std::pair<int, std::multiset<std::tuple<int, int, int>>>, int> next_ids;
    std::vector<int> next(g.n);
    for (int v = 0; v < g.n; ++v) {
      std::multiset<std::tuple<int, int, int>> ms;
      for (int w : g.adj[v]) ms.insert({col[w], g.arc_color(v, w), g.arc_color(w, v)});
      auto key = std::make_pair(col[v], ms);
      auto it = next_ids.find(key);
      if (it == next_ids.end()) it = next_ids.emplace(key, static_cast<int>(next_ids.size())).first;
      next[v] = it->second;
    }
    if (same_partition(next, col)) break;
    col = next;
  }
  return col;
}

// Literal 2-WL via the tuple-substitution multiset, again independent code.
std::vector<int> naive_wl2(const ColoredGraph& g) {
  int n = g.n;
  std::vector<int> col(n * n);
  std::map<std::tuple<int, int, int, int>, int> init;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      std::tuple<int, int, int, int> key{u == v, g.has_edge(u, v),
                                         g.has_edge(u, v) ? g.arc_color(u, v) : -1,
                                         g.has_edge(u, v) ? g.arc_color(v, u) : -1};
      auto it = init.find(key);
      if (it == init.end()) it = init.emplace(key, static_cast<int>(init.size())).first;
      col[u * n + v] = it->second;
    }
  for (int round = 0; round < n * n + 1; ++round) {
    std::map<std::pair<int, std::multiset<std::pair<int, int>>>, int> ids;
    std::vector<int> next(n * n);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        std::multiset<std::pair<int, int>> ms;
        for (int w = 0; w < n; ++w) ms.insert({col[w * n + v], col[u * n + w]});
        auto key = std::make_pair(col[u * n + v], ms);
        auto it = ids.find(key);
        if (it == ids.end()) it = ids.emplace(key, static_cast<int>(ids.size())).first;
        next[u * n + v] = it->second;
      }
    if (same_partition(next, col)) break;
    col = next;
  }
  return col;
}

std::multiset<int> diagonal_colors(const PairColoring& c) {
  std::multiset<int> out;
  for (int v = 0; v < c.n; ++v) out.insert(c(v, v));
  return out;
}

}  // namespace

TEST_CASE("wl1 examples") {
  CHECK(wl1_uniform_seed(cycle(5)).classes == 1);

  VertexColoring p4 = wl1_uniform_seed(path(4));
  CHECK(p4.classes == 2);
  CHECK(p4.color[0] == p4.color[3]);
  CHECK(p4.color[1] == p4.color[2]);
  CHECK(p4.color[0] != p4.color[1]);

  ColoredGraph k4 = complete(4);
  k4.vertex_colors = {1, 0, 0, 0};
  VertexColoring c = wl1_stable(k4, uniform_coloring(4));
  CHECK(c.classes == 2);
  CHECK(c.color[1] == c.color[2]);
  CHECK(c.color[0] != c.color[1]);
}

TEST_CASE("wl1 agrees with naive fixpoint") {
  std::mt19937 rng(5);
  for (int it = 0; it < 40; ++it) {
    int n = 2 + static_cast<int>(rng() % 14);
    ColoredGraph g = random_graph(n, 0.3, rng);
    for (int v = 0; v < n; ++v) g.vertex_colors[v] = static_cast<int>(rng() % 3);
    VertexColoring mine = wl1_uniform_seed(g);
    std::vector<int> theirs = naive_wl1(g, g.vertex_colors);
    CHECK(same_partition(mine.color, theirs));
  }
}

TEST_CASE("wl1 stability is a fixpoint") {
  std::mt19937 rng(6);
  for (int it = 0; it < 20; ++it) {
    ColoredGraph g = random_graph(10, 0.4, rng);
    VertexColoring c = wl1_uniform_seed(g);
    VertexColoring again = wl1_stable(g, c);
    CHECK(same_partition(c.color, again.color));
  }
}

TEST_CASE("wl2 examples") {
  PairColoring single = wl2_uniform_seed(complete(1));
  CHECK(single.classes == 1);

  PairColoring c5 = wl2_uniform_seed(cycle(5));
  CHECK(c5.classes == 3);  // diagonal, edges, non-edges

  // wl2 separates C_6 from 2*C_3 by the diagonal color multiset.
  auto j = wl2_stable_joint(cycle(6), uniform_coloring(6), two_triangles(), uniform_coloring(6));
  CHECK(diagonal_colors(j.c1) != diagonal_colors(j.c2));
  CHECK(!j.compatible);
}

TEST_CASE("wl2 agrees with the naive oracle") {
  std::mt19937 rng(9);
  for (int it = 0; it < 25; ++it) {
    int n = 2 + static_cast<int>(rng() % 7);
    ColoredGraph g = random_graph(n, 0.4, rng);
    PairColoring mine = wl2_uniform_seed(g);
    std::vector<int> theirs = naive_wl2(g);
    CHECK(same_partition(mine.color, theirs));
    PairColoring once_more = wl2_round(g, mine);
    CHECK(same_partition(once_more.color, mine.color));
  }
}

TEST_CASE("wl2 diagonal refines wl1") {
  std::mt19937 rng(13);
  for (int it = 0; it < 20; ++it) {
    ColoredGraph g = random_graph(9, 0.35, rng);
    VertexColoring one = wl1_uniform_seed(g);
    VertexColoring diag = wl2_uniform_seed(g).diagonal();
    CHECK(refines(diag.color, one.color));
  }
}

TEST_CASE("canonical ids are equivariant") {
  std::mt19937 rng(17);
  for (int it = 0; it < 25; ++it) {
    int n = 3 + static_cast<int>(rng() % 10);
    ColoredGraph g = random_graph(n, 0.35, rng);
    for (int v = 0; v < n; ++v) g.vertex_colors[v] = static_cast<int>(rng() % 2);
    auto pi = random_perm(n, rng);
    ColoredGraph h = permute(g, pi);

    VertexColoring cg = wl1_uniform_seed(g);
    VertexColoring ch = wl1_uniform_seed(h);
    for (int v = 0; v < n; ++v) CHECK(cg.color[v] == ch.color[pi[v]]);

    PairColoring pg = wl2_uniform_seed(g);
    PairColoring ph = wl2_uniform_seed(h);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) CHECK(pg(u, v) == ph(pi[u], pi[v]));
  }
}

TEST_CASE("refines is a partial order") {
  VertexColoring discrete;
  discrete.color = {0, 1, 2};
  discrete.classes = 3;
  VertexColoring uniform = uniform_coloring(3);
  CHECK(refines(discrete.color, uniform.color));
  CHECK(!refines(uniform.color, discrete.color));
  CHECK(refines(uniform.color, uniform.color));
  CHECK_THROWS_AS(refines(std::vector<int>{0}, std::vector<int>{0, 1}), DomainError);

  std::mt19937 rng(19);
  for (int it = 0; it < 30; ++it) {
    std::vector<int> a(6), b(6), c(6);
    for (int i = 0; i < 6; ++i) {
      a[i] = static_cast<int>(rng() % 6);
      b[i] = a[i] % 3;  // a refines b
      c[i] = b[i] % 2;  // b refines c
    }
    CHECK(refines(a, b));
    CHECK(refines(b, c));
    CHECK(refines(a, c));  // transitivity
  }
}

TEST_CASE("quotient_by_colors") {
  ColoredGraph c6 = cycle(6);
  PairColoring chi = wl2_uniform_seed(c6);

  auto [q0, bl0] = quotient_by_colors(c6, chi, {});
  CHECK(q0.n == 6);
  CHECK(q0.edge_count() == 6);

  // Antipodal pairs form a single off-diagonal color class in C_6.
  int anti = chi(0, 3);
  CHECK(!chi.is_diagonal_color(anti));
  auto [q, bl] = quotient_by_colors(c6, chi, {anti});
  CHECK(q.n == 3);
  CHECK(q.edge_count() == 3);  // C_3
  CHECK(bl[0] == bl[3]);
  CHECK(bl[1] == bl[4]);
  CHECK(bl[2] == bl[5]);

  // All off-diagonal colors of a connected graph collapse to one block.
  std::vector<int> all_off;
  for (int c = 0; c < chi.classes; ++c)
    if (!chi.is_diagonal_color(c)) all_off.push_back(c);
  auto [q1, bl1] = quotient_by_colors(c6, chi, all_off);
  CHECK(q1.n == 1);

  CHECK_THROWS_AS(quotient_by_colors(c6, chi, {chi(0, 0)}), DomainError);
}

TEST_CASE("quotient over one color class stays 2-stable") {
  // One further refinement round on the quotient splits nothing.
  std::mt19937 rng(29);
  int checked = 0;
  for (int it = 0; it < 60 && checked < 25; ++it) {
    int n = 4 + static_cast<int>(rng() % 27);  // up to 30
    ColoredGraph g = random_graph(n, 0.4, rng);
    PairColoring chi = wl2_uniform_seed(g);
    std::set<int> off;
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v)
        if (u != v) off.insert(chi(u, v));
    for (int c : off) {
      auto [q, block] = quotient_by_colors(g, chi, {c});
      if (q.n == n) continue;  // nothing contracted
      // Induced coloring on the quotient: multiset of chi-colors per block pair.
      std::vector<std::vector<int>> tuples(static_cast<std::size_t>(q.n) * q.n);
      for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
          auto& t = tuples[static_cast<std::size_t>(block[u]) * q.n + block[v]];
          t.push_back(chi(u, v));
        }
      for (auto& t : tuples) std::sort(t.begin(), t.end());
      int classes = 0;
      PairColoring qchi;
      qchi.n = q.n;
      qchi.color = canonical_ids(tuples, &classes);
      qchi.classes = classes;
      PairColoring next = wl2_round(q, qchi);
      CHECK(same_partition(next.color, qchi.color));
      ++checked;
    }
  }
  CHECK(checked > 0);
}
