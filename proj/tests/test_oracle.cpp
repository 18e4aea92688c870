#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "k3hiso/oracle.hpp"
#include "k3hiso/search.hpp"

using namespace k3h;

TEST_CASE("brute_force_iso basics") {
  ColoredGraph p3(3);
  p3.add_edge(0, 1);
  p3.add_edge(1, 2);
  auto r = brute_force_iso(p3, p3);
  REQUIRE(r.has_value());
  CHECK(is_colored_iso(p3, p3, *r));

  ColoredGraph c6(6);
  for (int i = 0; i < 6; ++i) c6.add_edge(i, (i + 1) % 6);
  ColoredGraph cc(6);
  cc.add_edge(0, 1);
  cc.add_edge(1, 2);
  cc.add_edge(2, 0);
  cc.add_edge(3, 4);
  cc.add_edge(4, 5);
  cc.add_edge(5, 3);
  CHECK(!brute_force_iso(c6, cc).has_value());
  CHECK(!brute_force_iso(cc, c6).has_value());  // symmetric in arguments

  ColoredGraph g = gen_3connected_planar(20, 4);
  auto [h, pi] = permuted_copy(g, 5);
  auto found = brute_force_iso(g, h);
  REQUIRE(found.has_value());
  CHECK(is_colored_iso(g, h, *found));
}

TEST_CASE("gen_3connected_planar") {
  CHECK(gen_3connected_planar(4, 0).edge_count() == 6);  // K_4 base case

  std::mt19937 rng(3);
  for (int it = 0; it < 15; ++it) {
    int n = 4 + static_cast<int>(rng() % 20);
    std::uint64_t seed = rng();
    ColoredGraph g = gen_3connected_planar(n, seed);
    CHECK(g.edge_count() == static_cast<std::size_t>(3 * n - 6));
    CHECK(is_3_connected(g));
    // reproducible bit-exactly
    ColoredGraph g2 = gen_3connected_planar(n, seed);
    CHECK(g.edges() == g2.edges());
  }
}

TEST_CASE("permuted_copy") {
  ColoredGraph g = gen_3connected_planar(12, 9);
  g.vertex_colors[3] = 2;
  auto [h, pi] = permuted_copy(g, 1);
  std::vector<int> phi(pi.begin(), pi.end());
  CHECK(is_colored_iso(g, h, phi));

  // double application composes
  auto [h2, pi2] = permuted_copy(h, 2);
  std::vector<int> comp(g.n);
  for (int v = 0; v < g.n; ++v) comp[v] = pi2[pi[v]];
  CHECK(is_colored_iso(g, h2, comp));
}

TEST_CASE("tweak_nonisomorphic") {
  std::mt19937 rng(7);
  for (int it = 0; it < 6; ++it) {
    ColoredGraph g = gen_3connected_planar(8 + static_cast<int>(rng() % 10), rng());
    ColoredGraph t = tweak_nonisomorphic(g, rng());
    CHECK(t.edge_count() == g.edge_count());
    CHECK(is_3_connected(t));
    CHECK(!brute_force_iso(g, t).has_value());
  }
}

TEST_CASE("run_corpus") {
  Corpus empty;
  CHECK(run_corpus(empty).pairs.empty());

  Corpus c;
  c.pairs.push_back({"p1", "planar_permuted", "iso", 100, 10, 7, "", ""});
  c.pairs.push_back({"p2", "planar_permuted", "iso", 101, 14, 7, "", ""});
  c.pairs.push_back({"t1", "planar_tweaked", "non-iso", 102, 12, 7, "", ""});
  c.pairs.push_back({"k5", "toroidal_permuted", "iso", 103, 0, 7, "k5", ""});
  c.pairs.push_back({"x1", "cross", "non-iso", 104, 0, 7, "k33", "prism"});
  CorpusReport rep = run_corpus(c, "both");
  CHECK(rep.failures == 0);
  for (const auto& pr : rep.pairs) {
    CHECK(pr.match);
    CHECK(pr.fpt_verdict == pr.expected);
    CHECK(pr.oracle_verdict == pr.expected);
  }

  // Injected fault: expectation flipped must be flagged.
  Corpus bad;
  bad.pairs.push_back({"bad", "planar_permuted", "non-iso", 100, 10, 7, "", ""});
  CHECK(run_corpus(bad, "both").failures == 1);
}
