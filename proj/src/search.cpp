#include "k3hiso/search.hpp"

#include <algorithm>
#include <array>

namespace k3h {

bool is_colored_iso(const ColoredGraph& g1, const ColoredGraph& g2, const std::vector<int>& phi) {
  if (g1.n != g2.n || static_cast<int>(phi.size()) != g1.n) return false;
  if (g1.edge_count() != g2.edge_count()) return false;
  std::vector<char> hit(g2.n, 0);
  for (int v = 0; v < g1.n; ++v) {
    if (phi[v] < 0 || phi[v] >= g2.n || hit[phi[v]]) return false;
    hit[phi[v]] = 1;
    if (g1.vertex_colors[v] != g2.vertex_colors[phi[v]]) return false;
  }
  for (int u = 0; u < g1.n; ++u)
    for (int v : g1.adj[u]) {
      if (!g2.has_edge(phi[u], phi[v])) return false;
      if (g1.arc_color(u, v) != g2.arc_color(phi[u], phi[v])) return false;
    }
  return true;
}

// --- Engine A: backtracking over the stabilizer chain -------------------------

namespace {

struct CosetSearch {
  const PermGroup& gamma;
  const std::vector<int>& theta;
  SearchStats* stats;

  // FIND mode
  const CosetCallbacks* cross = nullptr;
  bool found = false;
  std::vector<int> rep;

  // GROUP mode
  const CosetCallbacks* self = nullptr;
  std::vector<Perm> known_gens;  // generators of K = Gamma ∩ Aut found so far
  PermGroup known;               // BSGS over the same prescribed base

  std::vector<int> src_pins, img_pins;

  CosetSearch(const PermGroup& g, const std::vector<int>& th, SearchStats* st)
      : gamma(g), theta(th), stats(st), known(g.degree()) {}

  std::vector<int> phi_of(const Perm& full) const {
    std::vector<int> out(gamma.degree());
    for (int x = 0; x < gamma.degree(); ++x) out[x] = theta[full(x)];
    return out;
  }

  // ---- FIND: first accepted element of Gamma.theta ----
  bool find_dfs(int level, const Perm& partial) {
    if (stats) ++stats->nodes;
    if (level == gamma.base_length()) {
      if (stats) ++stats->leaves;
      std::vector<int> phi = phi_of(partial);
      if (cross->full_ok(phi)) {
        found = true;
        rep = phi;
        return true;
      }
      return false;
    }
    const int b = gamma.base()[level];
    for (int y : gamma.level_orbit(level)) {
      Perm next = compose(partial, gamma.transversal(level, y));
      src_pins.push_back(b);
      img_pins.push_back(theta[next(b)]);
      bool ok = cross->extend_ok(src_pins, img_pins);
      bool done = ok && find_dfs(level + 1, next);
      src_pins.pop_back();
      img_pins.pop_back();
      if (done) return true;
    }
    return false;
  }

  // ---- GROUP: K = Gamma ∩ Aut(structure), leftmost-full with orbit pruning ----
  void add_generator(const Perm& g) {
    known_gens.push_back(g);
    known = PermGroup::from_generators(gamma.degree(), known_gens, gamma.base());
  }

  // Orbit of point under the pointwise stabilizer (within K) of base[0..level-1].
  std::vector<char> stab_orbit(int level, int point) const {
    std::vector<char> in_orbit(gamma.degree(), 0);
    std::vector<int> queue{point};
    in_orbit[point] = 1;
    const auto& base = gamma.base();
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      for (const Perm& s : known_gens) {
        bool fixes = true;
        for (int t = 0; t < level && fixes; ++t) fixes = (s(base[t]) == base[t]);
        if (!fixes) continue;
        for (int q : {s(queue[qi]), s.inverse()(queue[qi])})
          if (!in_orbit[q]) {
            in_orbit[q] = 1;
            queue.push_back(q);
          }
      }
    }
    return in_orbit;
  }

  // Returns true if any element was found in the subtree.
  bool group_dfs(int level, const Perm& partial, bool on_spine) {
    if (stats) ++stats->nodes;
    if (level == gamma.base_length()) {
      if (stats) ++stats->leaves;
      std::vector<int> phi = phi_of(partial);  // theta is the identity here
      if (!self->full_ok(phi)) return false;
      if (!partial.is_identity() && !known.contains(partial)) add_generator(partial);
      return true;
    }
    const int b = gamma.base()[level];

    // Identity-first order keeps the leftmost spine on the stabilizer chain.
    std::vector<int> orbit = gamma.level_orbit(level);
    std::stable_sort(orbit.begin(), orbit.end(), [&](int a, int c) {
      return std::make_pair(a != b, a) < std::make_pair(c != b, c);
    });

    bool any_found = false;
    bool first_explored = true;
    std::vector<char> covered(gamma.degree(), 0);
    for (int y : orbit) {
      Perm next = compose(partial, gamma.transversal(level, y));
      int beta = theta[next(b)];
      if (on_spine && covered[beta]) continue;
      src_pins.push_back(b);
      img_pins.push_back(beta);
      bool ok = self->extend_ok(src_pins, img_pins);
      bool sub_found = false;
      if (ok) {
        sub_found = group_dfs(level + 1, next, on_spine && first_explored);
        first_explored = false;
      }
      src_pins.pop_back();
      img_pins.pop_back();
      any_found |= sub_found;
      if (!on_spine && any_found) break;  // one element per non-spine subtree
      if (on_spine) {
        auto orb = stab_orbit(level, beta);
        for (int p = 0; p < gamma.degree(); ++p)
          if (orb[p]) covered[p] = 1;
      }
    }
    return any_found;
  }
};

}  // namespace

IsoCoset coset_constrained_iso(const PermGroup& gamma, const std::vector<int>& theta,
                               const CosetCallbacks& cross, const CosetCallbacks& self,
                               SearchStats* stats) {
  if (static_cast<int>(theta.size()) != gamma.degree())
    throw DomainError("coset search: theta size mismatch");

  CosetSearch find_search(gamma, theta, stats);
  find_search.cross = &cross;
  if (!find_search.find_dfs(0, Perm(gamma.degree()))) return IsoCoset::make_empty();

  // Automorphism part runs source-vs-source with the identity map.
  std::vector<int> id(gamma.degree());
  for (int i = 0; i < gamma.degree(); ++i) id[i] = i;
  CosetSearch group_search(gamma, id, stats);
  group_search.self = &self;
  group_search.group_dfs(0, Perm(gamma.degree()), true);

  return IsoCoset::make(std::move(group_search.known), std::move(find_search.rep));
}

// --- Engine B: individualization-refinement search ----------------------------

namespace {

struct RefineSearch {
  const ColoredGraph& g1;
  const ColoredGraph& g2;
  const RefinementOptions& opt;
  RefinementResult result;

  bool aut_mode = false;  // g2 is g1: accumulate Aut
  bool find_mode = false;

  std::vector<int> base;  // G1 targets fixed along the leftmost spine
  std::vector<Perm> known_gens;
  PermGroup known;

  RefineSearch(const ColoredGraph& a, const ColoredGraph& b, const RefinementOptions& o)
      : g1(a), g2(b), opt(o), known(a.n) {}

  struct Node {
    std::vector<int> c1, c2;
    int classes = 0;
  };

  static void vertex_sig(const ColoredGraph& g, const std::vector<int>& cur, int v,
                         std::vector<int>& sig) {
    sig.clear();
    sig.push_back(cur[v]);
    std::vector<std::array<int, 3>> nb;
    nb.reserve(g.adj[v].size());
    for (int w : g.adj[v]) nb.push_back({cur[w], g.arc_color(v, w), g.arc_color(w, v)});
    std::sort(nb.begin(), nb.end());
    for (auto& e : nb) {
      sig.push_back(e[0]);
      sig.push_back(e[1]);
      sig.push_back(e[2]);
    }
  }

  // Joint stable refinement; false on class-size mismatch between the graphs.
  bool refine(Node& node) const {
    while (true) {
      std::vector<std::vector<int>> t1(g1.n), t2(g2.n);
      for (int v = 0; v < g1.n; ++v) vertex_sig(g1, node.c1, v, t1[v]);
      for (int v = 0; v < g2.n; ++v) vertex_sig(g2, node.c2, v, t2[v]);
      auto [a, b] = combine_vertex_colors(t1, t2);
      bool changed = a.classes != node.classes;
      node.c1 = a.color;
      node.c2 = b.color;
      node.classes = a.classes;
      if (!changed) break;
    }
    std::vector<int> n1(node.classes, 0), n2(node.classes, 0);
    for (int c : node.c1) ++n1[c];
    for (int c : node.c2) ++n2[c];
    return n1 == n2;
  }

  // Smallest class of size >= 2 (ties by color id); -1 when discrete.
  int pick_target_color(const Node& node) const {
    std::vector<int> sz(node.classes, 0);
    for (int c : node.c1) ++sz[c];
    int best = -1;
    for (int c = 0; c < node.classes; ++c)
      if (sz[c] >= 2 && (best < 0 || sz[c] < sz[best])) best = c;
    return best;
  }

  std::vector<int> leaf_map(const Node& node) const {
    std::vector<int> where(node.classes, -1);
    for (int v = 0; v < g2.n; ++v) where[node.c2[v]] = v;
    std::vector<int> phi(g1.n);
    for (int v = 0; v < g1.n; ++v) phi[v] = where[node.c1[v]];
    return phi;
  }

  void add_generator(const Perm& g) {
    known_gens.push_back(g);
    known = PermGroup::from_generators(g1.n, known_gens, base);
  }

  std::vector<char> stab_orbit(int level, int point) const {
    std::vector<char> in_orbit(g1.n, 0);
    std::vector<int> queue{point};
    in_orbit[point] = 1;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      for (const Perm& s : known_gens) {
        bool fixes = true;
        for (int t = 0; t < level && fixes; ++t) fixes = (s(base[t]) == base[t]);
        if (!fixes) continue;
        for (int q : {s(queue[qi]), s.inverse()(queue[qi])})
          if (!in_orbit[q]) {
            in_orbit[q] = 1;
            queue.push_back(q);
          }
      }
    }
    return in_orbit;
  }

  Node individualize(const Node& parent, int v, int w) const {
    Node child;
    std::vector<std::vector<int>> t1(g1.n), t2(g2.n);
    for (int x = 0; x < g1.n; ++x) t1[x] = {parent.c1[x], x == v ? 1 : 0};
    for (int y = 0; y < g2.n; ++y) t2[y] = {parent.c2[y], y == w ? 1 : 0};
    auto [a, b] = combine_vertex_colors(t1, t2);
    child.c1 = a.color;
    child.c2 = b.color;
    child.classes = a.classes;
    return child;
  }

  // Returns true if any element was found in the subtree.
  bool dfs(Node node, int depth, bool on_spine) {
    ++result.stats.nodes;
    if (result.stats.nodes > opt.node_limit)
      throw Error("refinement search exceeded its node limit");
    if (!refine(node)) return false;

    int target = pick_target_color(node);
    if (target < 0) {
      ++result.stats.leaves;
      std::vector<int> phi = leaf_map(node);
      if (!is_colored_iso(g1, g2, phi)) return false;
      if (find_mode) {
        result.found = true;
        result.iso = phi;
        return true;
      }
      Perm p(g1.n);
      p.img = phi;
      if (!p.is_identity() && !known.contains(p)) add_generator(p);
      return true;
    }

    std::vector<int> class1, class2;
    for (int v = 0; v < g1.n; ++v)
      if (node.c1[v] == target) class1.push_back(v);
    for (int w = 0; w < g2.n; ++w)
      if (node.c2[w] == target) class2.push_back(w);
    if (opt.class_cap > 0 && static_cast<int>(class1.size()) > opt.class_cap)
      result.class_cap_exceeded = true;

    int v = class1.front();
    if (aut_mode) {
      if (depth == static_cast<int>(base.size())) base.push_back(v);
      // Refinement on the g1 side is image-independent, so the target is the
      // same across siblings at a given depth.
      if (base[depth] != v) throw Error("internal: unstable search base");
      std::stable_sort(class2.begin(), class2.end(), [&](int a, int c) {
        return std::make_pair(a != v, a) < std::make_pair(c != v, c);
      });
    }

    bool any_found = false;
    bool first_explored = true;
    std::vector<char> covered(g2.n, 0);
    for (int w : class2) {
      if (aut_mode && on_spine && covered[w]) continue;
      bool sub = dfs(individualize(node, v, w), depth + 1, on_spine && first_explored);
      first_explored = false;
      any_found |= sub;
      if (find_mode && result.found) return true;
      if (aut_mode) {
        if (!on_spine && any_found) break;
        if (on_spine) {
          auto orb = stab_orbit(depth, w);
          for (int p = 0; p < g2.n; ++p)
            if (orb[p]) covered[p] = 1;
        }
      }
    }
    return any_found;
  }
};

}  // namespace

RefinementResult refinement_iso_search(const ColoredGraph& g1, const VertexColoring& seed1,
                                       const ColoredGraph& g2, const VertexColoring& seed2,
                                       const RefinementOptions& opt) {
  if (static_cast<int>(seed1.color.size()) != g1.n || static_cast<int>(seed2.color.size()) != g2.n)
    throw DomainError("refinement search: seed size mismatch");

  RefinementResult out;
  if (g1.n == g2.n) {
    RefineSearch find(g1, g2, opt);
    find.find_mode = true;
    RefineSearch::Node root;
    std::vector<std::vector<int>> t1(g1.n), t2(g2.n);
    for (int v = 0; v < g1.n; ++v) t1[v] = {seed1.color[v], g1.vertex_colors[v]};
    for (int v = 0; v < g2.n; ++v) t2[v] = {seed2.color[v], g2.vertex_colors[v]};
    auto [a, b] = combine_vertex_colors(t1, t2);
    root.c1 = a.color;
    root.c2 = b.color;
    root.classes = a.classes;
    find.dfs(root, 0, true);
    out.found = find.result.found;
    out.iso = find.result.iso;
    out.stats = find.result.stats;
    out.class_cap_exceeded = find.result.class_cap_exceeded;
  }

  if (opt.need_group) {
    RefineSearch aut(g1, g1, opt);
    aut.aut_mode = true;
    RefineSearch::Node root;
    std::vector<std::vector<int>> t1(g1.n);
    for (int v = 0; v < g1.n; ++v) t1[v] = {seed1.color[v], g1.vertex_colors[v]};
    auto [a, b] = combine_vertex_colors(t1, t1);
    root.c1 = a.color;
    root.c2 = b.color;
    root.classes = a.classes;
    aut.dfs(root, 0, true);
    out.aut = std::move(aut.known);
    out.stats.nodes += aut.result.stats.nodes;
    out.stats.leaves += aut.result.stats.leaves;
    out.class_cap_exceeded |= aut.result.class_cap_exceeded;
  } else {
    out.aut = PermGroup(g1.n);
  }
  return out;
}

}  // namespace k3h
