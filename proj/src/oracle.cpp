#include "k3hiso/oracle.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <random>

#include "k3hiso/search.hpp"

namespace k3h {

std::optional<std::vector<int>> brute_force_iso(const ColoredGraph& g1, const ColoredGraph& g2) {
  if (g1.n != g2.n) return std::nullopt;
  RefinementOptions opt;
  RefinementResult r = refinement_iso_search(g1, uniform_coloring(g1.n), g2,
                                             uniform_coloring(g2.n), opt);
  if (!r.found) return std::nullopt;
  return r.iso;
}

ColoredGraph gen_3connected_planar(int n, std::uint64_t seed) {
  if (n < 4) throw DomainError("triangulations need n >= 4");
  std::mt19937_64 rng(seed);
  ColoredGraph g(n);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) g.add_edge(i, j);
  std::vector<std::array<int, 3>> faces = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  for (int v = 4; v < n; ++v) {
    std::size_t fi = rng() % faces.size();
    std::array<int, 3> f = faces[fi];
    faces.erase(faces.begin() + fi);
    for (int x : f) g.add_edge(v, x);
    faces.push_back({f[0], f[1], v});
    faces.push_back({f[0], f[2], v});
    faces.push_back({f[1], f[2], v});
  }
  return g;
}

std::pair<ColoredGraph, std::vector<int>> permuted_copy(const ColoredGraph& g,
                                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> pi(g.n);
  for (int i = 0; i < g.n; ++i) pi[i] = i;
  for (int i = g.n - 1; i > 0; --i) {
    int j = static_cast<int>(rng() % (i + 1));
    std::swap(pi[i], pi[j]);
  }
  ColoredGraph out(g.n);
  for (int v = 0; v < g.n; ++v) out.vertex_colors[pi[v]] = g.vertex_colors[v];
  for (auto [u, v] : g.edges()) out.add_edge(pi[u], pi[v], g.arc_color(u, v), g.arc_color(v, u));
  return {out, pi};
}

ColoredGraph tweak_nonisomorphic(const ColoredGraph& g, std::uint64_t seed, int retry_budget) {
  std::mt19937_64 rng(seed);
  auto edges = g.edges();
  std::vector<std::pair<int, int>> non_edges;
  for (int u = 0; u < g.n; ++u)
    for (int v = u + 1; v < g.n; ++v)
      if (!g.has_edge(u, v)) non_edges.emplace_back(u, v);
  if (edges.empty() || non_edges.empty())
    throw Error("tweak: graph has no removable edge or addable non-edge");

  for (int attempt = 0; attempt < retry_budget; ++attempt) {
    auto [a, b] = edges[rng() % edges.size()];
    auto [u, v] = non_edges[rng() % non_edges.size()];
    ColoredGraph out(g.n);
    out.vertex_colors = g.vertex_colors;
    for (auto [x, y] : edges)
      if (!(x == a && y == b)) out.add_edge(x, y, g.arc_color(x, y), g.arc_color(y, x));
    out.add_edge(u, v);
    if (!is_3_connected(out)) continue;
    if (brute_force_iso(g, out).has_value()) continue;
    return out;
  }
  throw Error("tweak: retry budget exhausted without a confirmed non-isomorphic result");
}

ColoredGraph named_graph(const std::string& name) {
  auto complete = [](int n) {
    ColoredGraph g(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
    return g;
  };
  if (name == "k5") return complete(5);
  if (name == "k7") return complete(7);
  if (name == "k33") {
    ColoredGraph g(6);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g.add_edge(i, 3 + j);
    return g;
  }
  if (name == "c3xc3") {
    // Cartesian product of two triangles (3x3 torus grid).
    ColoredGraph g(9);
    auto id = [](int r, int c) { return 3 * r + c; };
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        g.add_edge(id(r, c), id(r, (c + 1) % 3));
        g.add_edge(id(r, c), id((r + 1) % 3, c));
      }
    return g;
  }
  if (name == "w4") {
    // Wheel on 4 rim vertices + hub.
    ColoredGraph g(5);
    for (int i = 0; i < 4; ++i) {
      g.add_edge(i, (i + 1) % 4);
      g.add_edge(i, 4);
    }
    return g;
  }
  if (name == "prism") {
    ColoredGraph g(6);
    for (int i = 0; i < 3; ++i) {
      g.add_edge(i, (i + 1) % 3);
      g.add_edge(3 + i, 3 + (i + 1) % 3);
      g.add_edge(i, 3 + i);
    }
    return g;
  }
  if (name == "octahedron") {
    ColoredGraph g(6);
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j)
        if (j - i != 3) g.add_edge(i, j);
    return g;
  }
  if (name == "cube") {
    ColoredGraph g(8);
    for (int i = 0; i < 4; ++i) {
      g.add_edge(i, (i + 1) % 4);
      g.add_edge(4 + i, 4 + (i + 1) % 4);
      g.add_edge(i, 4 + i);
    }
    return g;
  }
  throw DomainError("unknown named graph: " + name);
}

CorpusPair realize(const CorpusSpec& spec) {
  CorpusPair pair;
  pair.spec = spec;
  if (spec.generator == "planar_permuted") {
    pair.g1 = gen_3connected_planar(spec.n, spec.seed);
    pair.g2 = permuted_copy(pair.g1, spec.seed + 1).first;
  } else if (spec.generator == "planar_tweaked") {
    pair.g1 = gen_3connected_planar(spec.n, spec.seed);
    ColoredGraph t = tweak_nonisomorphic(pair.g1, spec.seed + 1);
    pair.g2 = permuted_copy(t, spec.seed + 2).first;
  } else if (spec.generator == "toroidal_permuted") {
    pair.g1 = named_graph(spec.graph_a);
    pair.g2 = permuted_copy(pair.g1, spec.seed).first;
  } else if (spec.generator == "cross") {
    pair.g1 = named_graph(spec.graph_a);
    pair.g2 = permuted_copy(named_graph(spec.graph_b), spec.seed).first;
  } else {
    throw DomainError("unknown corpus generator: " + spec.generator);
  }
  return pair;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Isomorphic:
      return "iso";
    case Verdict::NonIsomorphic:
      return "non-iso";
    case Verdict::MinorEvidence:
      return "minor-evidence";
  }
  return "?";
}

CorpusReport run_corpus(const Corpus& corpus, const std::string& engine) {
  CorpusReport report;
  for (const CorpusSpec& spec : corpus.pairs) {
    CorpusPair pair = realize(spec);
    PairReport pr;
    pr.name = spec.name;
    pr.expected = spec.expected;

    auto t0 = std::chrono::steady_clock::now();
    if (engine == "fpt" || engine == "both") {
      IsoResult r = isomorphic_k3h_free(pair.g1, pair.g2, spec.h);
      pr.fpt_verdict = verdict_name(r.verdict);
      if (r.verdict == Verdict::Isomorphic &&
          (!r.witness || !is_colored_iso(pair.g1, pair.g2, *r.witness)))
        pr.fpt_verdict = "invalid-witness";
    }
    if (engine == "oracle" || engine == "both") {
      pr.oracle_verdict = brute_force_iso(pair.g1, pair.g2) ? "iso" : "non-iso";
    }
    pr.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    pr.match = true;
    if (!pr.fpt_verdict.empty() && pr.fpt_verdict != spec.expected) pr.match = false;
    if (!pr.oracle_verdict.empty() && pr.oracle_verdict != spec.expected) pr.match = false;
    if (!pr.match) ++report.failures;
    report.pairs.push_back(std::move(pr));
  }
  return report;
}

}  // namespace k3h
