#include "k3hiso/decomposition.hpp"

#include <algorithm>
#include <map>

namespace k3h {

VertexSet Decomposition::subtree_vertices(int node) const {
  VertexSet out;
  std::vector<int> stack{node};
  while (!stack.empty()) {
    int t = stack.back();
    stack.pop_back();
    out = set_union(out, nodes[t].bag);
    for (int c : nodes[t].children) stack.push_back(c);
  }
  return out;
}

VertexSet small_class_pick(const ColoredGraph& g, const VertexSet& S, Vertex v1, Vertex v2,
                           Vertex v3, int h) {
  if (v1 == v2 || v1 == v3 || v2 == v3) throw DomainError("triple vertices must be distinct");
  for (Vertex v : {v1, v2, v3})
    if (!set_contains(S, v)) throw DomainError("triple vertices must lie in S");

  std::vector<std::vector<int>> tuples(g.n);
  for (Vertex v = 0; v < g.n; ++v) {
    int tag = v == v1 ? 1 : v == v2 ? 2 : v == v3 ? 3 : 0;
    tuples[v] = {g.vertex_colors[v], set_contains(S, v) ? 1 : 0, tag};
  }
  VertexColoring seed = combine_vertex_colors(tuples, {}).first;
  VertexColoring chi = wl1_stable(g, seed);

  std::vector<int> size(chi.classes, 0);
  for (int c : chi.color) ++size[c];
  std::vector<char> s_color(chi.classes, 0);
  for (Vertex s : S) s_color[chi.color[s]] = 1;

  for (int c = 0; c < chi.classes; ++c) {
    if (s_color[c] || size[c] > h - 1) continue;
    VertexSet cls;
    for (Vertex v = 0; v < g.n; ++v)
      if (chi.color[v] == c) cls.push_back(v);
    return cls;  // color ids are canonical, so the first hit is minimal
  }
  throw MinorEvidenceError(MinorEvidenceError::Reason::NoSmallClass, S, h);
}

VertexSet gamma_root(const ColoredGraph& g, const VertexSet& S, int h) {
  if (static_cast<int>(S.size()) < 3 || static_cast<int>(S.size()) > h)
    throw PreconditionError("gamma_root needs 3 <= |S| <= h");
  VertexSet out = S;
  for (Vertex v1 : S)
    for (Vertex v2 : S)
      for (Vertex v3 : S) {
        if (v1 == v2 || v1 == v3 || v2 == v3) continue;
        out = set_union(out, small_class_pick(g, S, v1, v2, v3, h));
      }
  if (static_cast<long long>(out.size()) > static_cast<long long>(h) * h * h * h)
    throw Error("internal: gamma exceeds the h^4 bound");
  return out;
}

namespace {

struct Builder {
  const ColoredGraph& original;
  int h;
  std::vector<DecompositionNode> nodes;

  // Instance graphs carry original vertex ids through orig_of.
  int build(const ColoredGraph& inst, const std::vector<int>& orig_of, const VertexSet& s_local) {
    auto to_orig = [&](const VertexSet& local) {
      VertexSet out;
      for (int v : local) out.push_back(orig_of[v]);
      std::sort(out.begin(), out.end());
      return out;
    };

    VertexSet gamma_local;
    try {
      gamma_local = gamma_root(inst, s_local, h);
    } catch (MinorEvidenceError& e) {
      throw MinorEvidenceError(e.reason, to_orig(e.offending), e.h);
    }
    VertexSet beta_local = closure(inst, gamma_local, 2, 2);

    int me = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[me].bag = to_orig(beta_local);
    nodes[me].anchors = to_orig(gamma_local);
    nodes[me].adhesion = to_orig(s_local);

    for (const VertexSet& z : components_avoiding(inst, beta_local)) {
      VertexSet s_child = open_neighborhood(inst, z);
      if (static_cast<int>(s_child.size()) >= h)
        throw MinorEvidenceError(MinorEvidenceError::Reason::SeparatorTooLarge, to_orig(s_child),
                                 h);
      if (static_cast<int>(s_child.size()) < 3)
        throw Error("internal: component neighborhood below 3 in a 3-connected instance");

      VertexSet child_verts = set_union(s_child, z);
      ColoredGraph sub = induced_subgraph(inst, child_verts);
      std::vector<int> child_orig(child_verts.size());
      std::vector<int> child_local(inst.n, -1);
      for (std::size_t i = 0; i < child_verts.size(); ++i) {
        child_orig[i] = orig_of[child_verts[i]];
        child_local[child_verts[i]] = static_cast<int>(i);
      }
      VertexSet s_child_local;
      for (int v : s_child) s_child_local.push_back(child_local[v]);
      ColoredGraph child_graph = clique_on(sub, s_child_local);

      // Progress: either the instance shrinks or the boundary strictly grows.
      if (static_cast<int>(child_verts.size()) == inst.n &&
          s_child.size() <= s_local.size())
        throw Error("internal: recursion failed to make progress");

      int child = build(child_graph, child_orig, s_child_local);
      nodes[child].parent = me;
      nodes[me].children.push_back(child);
    }
    return me;
  }

  // Sibling regrouping: children are grouped by their adhesion set; each group
  // hangs below a fresh node whose bag and anchors are that adhesion set.
  void regroup() {
    int original_count = static_cast<int>(nodes.size());
    for (int t = 0; t < original_count; ++t) {
      if (nodes[t].children.empty() || nodes[t].regroup_node) continue;
      std::map<VertexSet, std::vector<int>> groups;
      for (int c : nodes[t].children) groups[nodes[c].adhesion].push_back(c);
      std::vector<int> new_children;
      for (auto& [adhesion, members] : groups) {
        int fresh = static_cast<int>(nodes.size());
        nodes.emplace_back();
        nodes[fresh].parent = t;
        nodes[fresh].bag = adhesion;
        nodes[fresh].anchors = adhesion;
        nodes[fresh].adhesion = adhesion;
        nodes[fresh].regroup_node = true;
        nodes[fresh].children = members;
        for (int m : members) nodes[m].parent = fresh;
        new_children.push_back(fresh);
      }
      nodes[t].children = new_children;
    }
  }

};

}  // namespace

Decomposition decompose(const ColoredGraph& g, const VertexSet& S, int h) {
  if (h < 3) throw PreconditionError("h must be at least 3");
  if (static_cast<int>(S.size()) < 3 || static_cast<int>(S.size()) > h)
    throw PreconditionError("decompose needs 3 <= |S| <= h");
  if (!is_3_connected(g)) throw PreconditionError("decompose needs a 3-connected graph");
  {
    auto comps = components_avoiding(g, S);
    if (comps.size() != 1) throw PreconditionError("decompose needs G - S connected");
    if (open_neighborhood(g, comps[0]) != S)
      throw PreconditionError("decompose needs S = N(V \\ S)");
  }
  for (Vertex v : S) g.check_vertex(v);

  Builder b{g, h, {}};
  std::vector<int> orig_of(g.n);
  for (int v = 0; v < g.n; ++v) orig_of[v] = v;
  b.build(g, orig_of, S);
  b.regroup();

  Decomposition d;
  d.nodes = std::move(b.nodes);
  d.root = 0;
  d.h = h;
  // depths + lambda on the finished tree
  {
    std::vector<int> stack{d.root};
    d.nodes[d.root].depth = 0;
    while (!stack.empty()) {
      int t = stack.back();
      stack.pop_back();
      for (int c : d.nodes[t].children) {
        d.nodes[c].depth = d.nodes[t].depth + 1;
        stack.push_back(c);
      }
    }
    d.lambda.assign(g.n, {});
    for (const auto& node : d.nodes)
      for (Vertex v : node.bag) d.lambda[v].push_back(node.depth);
    for (auto& s : d.lambda) s = sorted_set(std::move(s));
  }
  return d;
}

VertexColoring lambda_seed(const ColoredGraph& g, const std::vector<VertexSet>& lambda) {
  if (static_cast<int>(lambda.size()) != g.n) throw DomainError("lambda size mismatch");
  std::vector<std::vector<int>> tuples(g.n);
  for (int v = 0; v < g.n; ++v) {
    tuples[v] = {g.vertex_colors[v]};
    for (int dpt : lambda[v]) tuples[v].push_back(dpt + 1);
  }
  return combine_vertex_colors(tuples, {}).first;
}

DecompositionReport verify_decomposition(const ColoredGraph& g, const Decomposition& d,
                                         const VertexSet& S, int h) {
  DecompositionReport r;
  auto fail = [&](int node, const std::string& what) {
    if (r.failing_node < 0) {
      r.failing_node = node;
      r.detail = what;
    }
  };

  // T.1: every edge inside some bag; T.2: the bags containing v form a subtree.
  r.td_valid = true;
  for (auto [u, v] : g.edges()) {
    bool covered = false;
    for (const auto& node : d.nodes)
      if (set_contains(node.bag, u) && set_contains(node.bag, v)) covered = true;
    if (!covered) {
      r.td_valid = false;
      fail(-1, "edge not covered by any bag");
    }
  }
  for (Vertex v = 0; v < g.n && r.td_valid; ++v) {
    std::vector<int> holders;
    for (std::size_t t = 0; t < d.nodes.size(); ++t)
      if (set_contains(d.nodes[t].bag, v)) holders.push_back(static_cast<int>(t));
    if (holders.empty()) {
      r.td_valid = false;
      fail(-1, "vertex in no bag");
      break;
    }
    // Connectivity in the tree restricted to holders.
    std::vector<char> is_holder(d.nodes.size(), 0);
    for (int t : holders) is_holder[t] = 1;
    std::vector<int> stack{holders[0]};
    std::vector<char> seen(d.nodes.size(), 0);
    seen[holders[0]] = 1;
    int reached = 0;
    while (!stack.empty()) {
      int t = stack.back();
      stack.pop_back();
      ++reached;
      std::vector<int> nb = d.nodes[t].children;
      if (d.nodes[t].parent >= 0) nb.push_back(d.nodes[t].parent);
      for (int u2 : nb)
        if (is_holder[u2] && !seen[u2]) {
          seen[u2] = 1;
          stack.push_back(u2);
        }
    }
    if (reached != static_cast<int>(holders.size())) {
      r.td_valid = false;
      fail(holders[0], "bags of a vertex are not connected in the tree");
    }
  }

  r.node_count_ok = static_cast<int>(d.nodes.size()) <= 2 * g.n;
  if (!r.node_count_ok) fail(-1, "node count exceeds 2n");

  r.adhesion_ok = true;
  for (std::size_t t = 0; t < d.nodes.size(); ++t) {
    if (d.nodes[t].parent < 0) continue;
    VertexSet inter = set_intersection(d.nodes[t].bag, d.nodes[d.nodes[t].parent].bag);
    if (static_cast<int>(inter.size()) > h - 1) {
      r.adhesion_ok = false;
      fail(static_cast<int>(t), "adhesion width exceeds h-1");
    }
  }

  r.options_ok = true;
  for (std::size_t t = 0; t < d.nodes.size(); ++t) {
    const auto& node = d.nodes[t];
    if (node.children.empty()) continue;
    std::vector<VertexSet> adhesions;
    for (int c : node.children)
      adhesions.push_back(set_intersection(node.bag, d.nodes[c].bag));
    bool all_distinct = true;
    for (std::size_t i = 0; i < adhesions.size(); ++i)
      for (std::size_t j = i + 1; j < adhesions.size(); ++j)
        if (adhesions[i] == adhesions[j]) all_distinct = false;
    bool all_full = true;
    for (const auto& a : adhesions)
      if (a != node.bag) all_full = false;
    if (!all_distinct && !all_full) {
      r.options_ok = false;
      fail(static_cast<int>(t), "children satisfy neither adhesion option");
    }
  }

  const auto& root = d.nodes[d.root];
  r.root_anchor_ok = set_intersection(S, root.anchors) == S && root.anchors != S;
  if (!r.root_anchor_ok) fail(d.root, "S is not a proper subset of the root anchors");

  r.anchor_size_ok = true;
  long long cap = static_cast<long long>(h) * h * h * h;
  for (std::size_t t = 0; t < d.nodes.size(); ++t)
    if (static_cast<long long>(d.nodes[t].anchors.size()) > cap) {
      r.anchor_size_ok = false;
      fail(static_cast<int>(t), "anchor set exceeds h^4");
    }

  r.anchor_between_ok = true;
  for (std::size_t t = 0; t < d.nodes.size(); ++t) {
    const auto& node = d.nodes[t];
    if (set_intersection(node.anchors, node.bag) != node.anchors) {
      r.anchor_between_ok = false;
      fail(static_cast<int>(t), "anchors not inside the bag");
    }
    if (node.parent >= 0) {
      VertexSet inter = set_intersection(node.bag, d.nodes[node.parent].bag);
      if (set_intersection(inter, node.anchors) != inter) {
        r.anchor_between_ok = false;
        fail(static_cast<int>(t), "adhesion not inside the anchors");
      }
    }
  }

  r.closure_ok = true;
  VertexColoring seed = lambda_seed(g, d.lambda);
  for (std::size_t t = 0; t < d.nodes.size(); ++t) {
    VertexSet cl = closure_seeded(g, seed, d.nodes[t].anchors, 2, 2);
    if (set_intersection(d.nodes[t].bag, cl) != d.nodes[t].bag) {
      r.closure_ok = false;
      fail(static_cast<int>(t), "bag not contained in the anchored closure");
    }
  }

  return r;
}

bool verify_separator_bound(const ColoredGraph& g, const VertexSet& X, int h) {
  VertexSet d = closure(g, X, 2, 2);
  for (const VertexSet& z : components_avoiding(g, d))
    if (static_cast<int>(open_neighborhood(g, z).size()) >= h) return false;
  return true;
}

}  // namespace k3h
