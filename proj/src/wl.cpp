#include "k3hiso/wl.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <numeric>

namespace k3h {

std::vector<VertexSet> VertexColoring::class_sets() const {
  std::vector<VertexSet> out(classes);
  for (Vertex v = 0; v < static_cast<int>(color.size()); ++v)
    out[color[v]].push_back(v);
  return out;
}

VertexColoring PairColoring::diagonal() const {
  std::vector<std::vector<int>> tuples(n);
  for (Vertex v = 0; v < n; ++v) tuples[v] = {(*this)(v, v)};
  return combine_vertex_colors(tuples, {}).first;
}

bool PairColoring::is_diagonal_color(int c) const {
  for (Vertex v = 0; v < n; ++v)
    if ((*this)(v, v) == c) return true;
  return false;
}

std::vector<int> PairColoring::class_sizes() const {
  std::vector<int> sz(classes, 0);
  for (int c : color) ++sz[c];
  return sz;
}

std::vector<int> canonical_ids(const std::vector<std::vector<int>>& tuples, int* classes_out) {
  std::vector<int> order(tuples.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return tuples[a] < tuples[b]; });
  std::vector<int> ids(tuples.size());
  int next = -1;
  const std::vector<int>* prev = nullptr;
  for (int idx : order) {
    if (!prev || tuples[idx] != *prev) {
      ++next;
      prev = &tuples[idx];
    }
    ids[idx] = next;
  }
  if (classes_out) *classes_out = next + 1;
  return ids;
}

std::pair<VertexColoring, VertexColoring> combine_vertex_colors(
    const std::vector<std::vector<int>>& tuples1,
    const std::vector<std::vector<int>>& tuples2) {
  std::vector<std::vector<int>> pool = tuples1;
  pool.insert(pool.end(), tuples2.begin(), tuples2.end());
  int classes = 0;
  std::vector<int> ids = canonical_ids(pool, &classes);
  VertexColoring c1, c2;
  c1.color.assign(ids.begin(), ids.begin() + tuples1.size());
  c1.classes = classes;
  c2.color.assign(ids.begin() + tuples1.size(), ids.end());
  c2.classes = classes;
  return {c1, c2};
}

VertexColoring uniform_coloring(int n) {
  VertexColoring c;
  c.color.assign(n, 0);
  c.classes = n > 0 ? 1 : 0;
  return c;
}

VertexColoring coloring_from_values(const std::vector<int>& values) {
  std::vector<std::vector<int>> tuples(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) tuples[i] = {values[i]};
  return combine_vertex_colors(tuples, {}).first;
}

VertexColoring individualized_seed(const ColoredGraph& g, const VertexSet& X,
                                   const std::vector<int>& base) {
  if (!base.empty() && static_cast<int>(base.size()) != g.n)
    throw DomainError("seed size mismatch");
  std::vector<int> tag(g.n, 0);
  int t = 1;
  for (Vertex v : X) {
    g.check_vertex(v);
    tag[v] = t++;  // distinct tags in sorted-X order; id order is tie-break only
  }
  std::vector<std::vector<int>> tuples(g.n);
  for (Vertex v = 0; v < g.n; ++v)
    tuples[v] = {base.empty() ? 0 : base[v], g.vertex_colors[v], tag[v]};
  return combine_vertex_colors(tuples, {}).first;
}

bool refines(const std::vector<int>& c1, const std::vector<int>& c2) {
  if (c1.size() != c2.size()) throw DomainError("refines: domain mismatch");
  // c1(x)=c1(y) => c2(x)=c2(y): each c1-class maps into a single c2 value.
  std::unordered_map<int, int> image;
  for (std::size_t i = 0; i < c1.size(); ++i) {
    auto [it, inserted] = image.try_emplace(c1[i], c2[i]);
    if (!inserted && it->second != c2[i]) return false;
  }
  return true;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  return refines(a, b) && refines(b, a);
}

// --- 1-WL --------------------------------------------------------------------

namespace {

// One joint refinement pass over up to two graphs. Returns new colorings with
// shared ids; stops callers at fixpoint via class-count comparison.
struct Wl1Runner {
  const ColoredGraph* g1;
  const ColoredGraph* g2;

  std::vector<int> c1, c2;
  int classes = 0;

  void init(const VertexColoring& s1, const VertexColoring& s2) {
    std::vector<std::vector<int>> t1(g1->n), t2(g2 ? g2->n : 0);
    for (Vertex v = 0; v < g1->n; ++v) t1[v] = {s1.color[v], g1->vertex_colors[v]};
    if (g2)
      for (Vertex v = 0; v < g2->n; ++v) t2[v] = {s2.color[v], g2->vertex_colors[v]};
    auto [a, b] = combine_vertex_colors(t1, t2);
    c1 = a.color;
    c2 = b.color;
    classes = a.classes;
  }

  static void vertex_sig(const ColoredGraph& g, const std::vector<int>& cur, Vertex v,
                         std::vector<int>& sig) {
    sig.clear();
    sig.push_back(cur[v]);
    std::vector<std::array<int, 3>> nb;
    nb.reserve(g.adj[v].size());
    for (Vertex w : g.adj[v])
      nb.push_back({cur[w], g.arc_color(v, w), g.arc_color(w, v)});
    std::sort(nb.begin(), nb.end());
    for (const auto& e : nb) {
      sig.push_back(e[0]);
      sig.push_back(e[1]);
      sig.push_back(e[2]);
    }
  }

  // Returns true if the partition refined.
  bool round() {
    std::vector<std::vector<int>> t1(g1->n), t2(g2 ? g2->n : 0);
    for (Vertex v = 0; v < g1->n; ++v) vertex_sig(*g1, c1, v, t1[v]);
    if (g2)
      for (Vertex v = 0; v < g2->n; ++v) vertex_sig(*g2, c2, v, t2[v]);
    auto [a, b] = combine_vertex_colors(t1, t2);
    bool changed = a.classes != classes;
    c1 = a.color;
    c2 = b.color;
    classes = a.classes;
    return changed;
  }

  void run() {
    while (round()) {
    }
  }

  bool compatible() const {
    if (!g2) return true;
    std::vector<int> n1(classes, 0), n2(classes, 0);
    for (int c : c1) ++n1[c];
    for (int c : c2) ++n2[c];
    return n1 == n2;
  }
};

}  // namespace

VertexColoring wl1_stable(const ColoredGraph& g, const VertexColoring& seed) {
  if (static_cast<int>(seed.color.size()) != g.n) throw DomainError("seed size mismatch");
  Wl1Runner r{&g, nullptr};
  r.init(seed, VertexColoring{});
  r.run();
  VertexColoring out;
  out.color = r.c1;
  out.classes = r.classes;
  return out;
}

VertexColoring wl1_uniform_seed(const ColoredGraph& g) {
  return wl1_stable(g, uniform_coloring(g.n));
}

JointVertexColoring wl1_stable_joint(const ColoredGraph& g1, const VertexColoring& seed1,
                                     const ColoredGraph& g2, const VertexColoring& seed2) {
  Wl1Runner r{&g1, &g2};
  r.init(seed1, seed2);
  r.run();
  JointVertexColoring out;
  out.c1.color = r.c1;
  out.c1.classes = r.classes;
  out.c2.color = r.c2;
  out.c2.classes = r.classes;
  out.compatible = r.compatible();
  return out;
}

// --- 2-WL --------------------------------------------------------------------

namespace {

constexpr int kWl2Cap = 512;

struct Wl2Runner {
  const ColoredGraph* g1;
  const ColoredGraph* g2;

  std::vector<int> c1, c2;  // flat n*n tables
  int classes = 0;

  static void initial_tuples(const ColoredGraph& g, const std::vector<int>& seed,
                             std::vector<std::vector<int>>& out) {
    const int n = g.n;
    out.assign(static_cast<std::size_t>(n) * n, {});
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = 0; v < n; ++v) {
        bool eq = (u == v);
        bool edge = !eq && g.has_edge(u, v);
        out[static_cast<std::size_t>(u) * n + v] = {
            eq ? 1 : 0, edge ? 1 : 0, seed[u], seed[v],
            edge ? g.arc_color(u, v) : kNoArc, edge ? g.arc_color(v, u) : kNoArc};
      }
  }

  void init(const VertexColoring& s1, const VertexColoring& s2) {
    if (g1->n > kWl2Cap || (g2 && g2->n > kWl2Cap))
      throw InstanceTooLarge("2-WL supports n <= " + std::to_string(kWl2Cap));
    // Seeds joined with graph vertex colors first so both are refined.
    std::vector<std::vector<int>> sv1(g1->n), sv2(g2 ? g2->n : 0);
    for (Vertex v = 0; v < g1->n; ++v) sv1[v] = {s1.color[v], g1->vertex_colors[v]};
    if (g2)
      for (Vertex v = 0; v < g2->n; ++v) sv2[v] = {s2.color[v], g2->vertex_colors[v]};
    auto [a, b] = combine_vertex_colors(sv1, sv2);

    std::vector<std::vector<int>> t1, t2;
    initial_tuples(*g1, a.color, t1);
    if (g2) initial_tuples(*g2, b.color, t2);
    assign(t1, t2);
  }

  void assign(const std::vector<std::vector<int>>& t1, const std::vector<std::vector<int>>& t2) {
    std::vector<std::vector<int>> pool = t1;
    pool.insert(pool.end(), t2.begin(), t2.end());
    int cl = 0;
    std::vector<int> ids = canonical_ids(pool, &cl);
    c1.assign(ids.begin(), ids.begin() + t1.size());
    c2.assign(ids.begin() + t1.size(), ids.end());
    classes = cl;
  }

  // Signature of pair (u,v): current color + run-length-encoded sorted multiset
  // of packed (color(w,v), color(u,w)) over all w.
  static void pair_sig(const ColoredGraph& g, const std::vector<int>& cur, Vertex u, Vertex v,
                       long long pack_base, std::vector<long long>& tmp, std::vector<int>& sig) {
    const int n = g.n;
    tmp.clear();
    for (Vertex w = 0; w < n; ++w) {
      long long a = cur[static_cast<std::size_t>(w) * n + v];
      long long b = cur[static_cast<std::size_t>(u) * n + w];
      tmp.push_back(a * pack_base + b);
    }
    std::sort(tmp.begin(), tmp.end());
    sig.clear();
    sig.push_back(cur[static_cast<std::size_t>(u) * n + v]);
    for (std::size_t i = 0; i < tmp.size();) {
      std::size_t j = i;
      while (j < tmp.size() && tmp[j] == tmp[i]) ++j;
      sig.push_back(static_cast<int>(tmp[i] / pack_base));
      sig.push_back(static_cast<int>(tmp[i] % pack_base));
      sig.push_back(static_cast<int>(j - i));
      i = j;
    }
  }

  bool round() {
    const long long pack_base = classes + 1;
    std::vector<std::vector<int>> t1(c1.size()), t2(c2.size());
    std::vector<long long> tmp;
    for (Vertex u = 0; u < g1->n; ++u)
      for (Vertex v = 0; v < g1->n; ++v)
        pair_sig(*g1, c1, u, v, pack_base, tmp, t1[static_cast<std::size_t>(u) * g1->n + v]);
    if (g2)
      for (Vertex u = 0; u < g2->n; ++u)
        for (Vertex v = 0; v < g2->n; ++v)
          pair_sig(*g2, c2, u, v, pack_base, tmp, t2[static_cast<std::size_t>(u) * g2->n + v]);
    int before = classes;
    assign(t1, t2);
    return classes != before;
  }

  void run() {
    while (round()) {
    }
  }

  bool compatible() const {
    if (!g2) return true;
    std::vector<int> n1(classes, 0), n2(classes, 0);
    for (int c : c1) ++n1[c];
    for (int c : c2) ++n2[c];
    return n1 == n2;
  }
};

}  // namespace

PairColoring wl2_stable(const ColoredGraph& g, const VertexColoring& seed) {
  if (static_cast<int>(seed.color.size()) != g.n) throw DomainError("seed size mismatch");
  Wl2Runner r{&g, nullptr};
  r.init(seed, VertexColoring{});
  r.run();
  PairColoring out;
  out.n = g.n;
  out.color = r.c1;
  out.classes = r.classes;
  return out;
}

PairColoring wl2_uniform_seed(const ColoredGraph& g) {
  return wl2_stable(g, uniform_coloring(g.n));
}

JointPairColoring wl2_stable_joint(const ColoredGraph& g1, const VertexColoring& seed1,
                                   const ColoredGraph& g2, const VertexColoring& seed2) {
  Wl2Runner r{&g1, &g2};
  r.init(seed1, seed2);
  r.run();
  JointPairColoring out;
  out.c1.n = g1.n;
  out.c1.color = r.c1;
  out.c1.classes = r.classes;
  out.c2.n = g2.n;
  out.c2.color = r.c2;
  out.c2.classes = r.classes;
  out.compatible = r.compatible();
  return out;
}

PairColoring wl2_round(const ColoredGraph& g, const PairColoring& chi) {
  if (chi.n != g.n) throw DomainError("pair coloring size mismatch");
  Wl2Runner r{&g, nullptr};
  r.c1 = chi.color;
  r.classes = chi.classes;
  r.round();
  PairColoring out;
  out.n = g.n;
  out.color = r.c1;
  out.classes = r.classes;
  return out;
}

// --- quotients ----------------------------------------------------------------

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void merge(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

std::pair<ColoredGraph, std::vector<int>> quotient_by_colors(
    const ColoredGraph& g, const PairColoring& chi, const std::vector<int>& C) {
  if (chi.n != g.n) throw DomainError("pair coloring size mismatch");
  std::vector<char> in_c(chi.classes, 0);
  for (int c : C) {
    if (c < 0 || c >= chi.classes) throw DomainError("unknown pair color");
    if (chi.is_diagonal_color(c)) throw DomainError("quotient over a diagonal color");
    in_c[c] = 1;
  }
  UnionFind uf(g.n);
  for (Vertex u = 0; u < g.n; ++u)
    for (Vertex v = 0; v < g.n; ++v)
      if (u != v && in_c[chi(u, v)]) uf.merge(u, v);

  // Blocks ordered by minimum vertex.
  std::vector<int> block(g.n, -1);
  int nblocks = 0;
  for (Vertex v = 0; v < g.n; ++v) {
    int root = uf.find(v);
    if (block[root] < 0) block[root] = nblocks++;
    block[v] = block[root];
  }
  ColoredGraph q(nblocks);
  for (Vertex u = 0; u < g.n; ++u)
    for (Vertex v : g.adj[u]) {
      if (u >= v) continue;
      if (block[u] != block[v] && !q.has_edge(block[u], block[v]))
        q.add_edge(block[u], block[v]);
    }
  return {q, block};
}

}  // namespace k3h
