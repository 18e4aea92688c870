#include "k3hiso/hypergraph_iso.hpp"

#include <algorithm>
#include <map>

namespace k3h {

namespace {

PermGroup rebase_by_constraint(const PermGroup& gamma, const std::vector<long long>& weight) {
  std::vector<int> order(gamma.degree());
  for (int i = 0; i < gamma.degree(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::make_pair(-weight[a], a) < std::make_pair(-weight[b], b);
  });
  return PermGroup::from_generators(gamma.degree(), gamma.strong_generators(), order);
}

struct EdgeTable {
  std::map<VertexSet, int> color_of;  // edge set -> color
  void build(const Hypergraph& h) {
    for (std::size_t i = 0; i < h.edges.size(); ++i) {
      auto [it, fresh] = color_of.emplace(h.edges[i], h.edge_color(i));
      if (!fresh) throw DomainError("hypergraph has duplicate edges");
    }
  }
};

// Incidence-graph wl1 colors, a hypergraph-isomorphism invariant.
JointVertexColoring incidence_invariants(const Hypergraph& h1, const Hypergraph& h2) {
  auto build = [](const Hypergraph& h) {
    ColoredGraph g(h.n + static_cast<int>(h.edges.size()));
    for (int v = 0; v < h.n; ++v) g.vertex_colors[v] = 0;
    for (std::size_t i = 0; i < h.edges.size(); ++i) {
      g.vertex_colors[h.n + static_cast<int>(i)] = 1 + h.edge_color(i);
      for (int v : h.edges[i]) g.add_edge(v, h.n + static_cast<int>(i));
    }
    return g;
  };
  ColoredGraph inc1 = build(h1), inc2 = build(h2);
  auto joint = wl1_stable_joint(inc1, uniform_coloring(inc1.n), inc2, uniform_coloring(inc2.n));
  JointVertexColoring out;
  out.c1.color.assign(joint.c1.color.begin(), joint.c1.color.begin() + h1.n);
  out.c2.color.assign(joint.c2.color.begin(), joint.c2.color.begin() + h2.n);
  out.c1.classes = out.c2.classes = joint.c1.classes;
  out.compatible = joint.compatible;
  return out;
}

struct HyperCallbacks {
  const Hypergraph* src;
  const EdgeTable* dst_table;
  const std::vector<int>* inv_src;
  const std::vector<int>* inv_dst;
  std::vector<std::vector<int>> edges_of_vertex;  // indices into src->edges

  void init(const Hypergraph& s) {
    src = &s;
    edges_of_vertex.assign(s.n, {});
    for (std::size_t i = 0; i < s.edges.size(); ++i)
      for (int v : s.edges[i]) edges_of_vertex[v].push_back(static_cast<int>(i));
  }

  bool extend_ok(const std::vector<int>& pins_src, const std::vector<int>& pins_img) const {
    int v = pins_src.back(), y = pins_img.back();
    if ((*inv_src)[v] != (*inv_dst)[y]) return false;
    std::vector<int> img_of(src->n, -1);
    for (std::size_t i = 0; i < pins_src.size(); ++i) img_of[pins_src[i]] = pins_img[i];
    // Every source edge that just became fully pinned must land on a target
    // edge of the same color.
    for (int ei : edges_of_vertex[v]) {
      const auto& e = src->edges[ei];
      VertexSet image;
      bool complete = true;
      for (int x : e) {
        if (img_of[x] < 0) {
          complete = false;
          break;
        }
        image.push_back(img_of[x]);
      }
      if (!complete) continue;
      std::sort(image.begin(), image.end());
      auto it = dst_table->color_of.find(image);
      if (it == dst_table->color_of.end() || it->second != src->edge_color(ei)) return false;
    }
    return true;
  }

  bool full_ok(const std::vector<int>& phi) const {
    for (std::size_t i = 0; i < src->edges.size(); ++i) {
      VertexSet image;
      image.reserve(src->edges[i].size());
      for (int x : src->edges[i]) image.push_back(phi[x]);
      std::sort(image.begin(), image.end());
      auto it = dst_table->color_of.find(image);
      if (it == dst_table->color_of.end() || it->second != src->edge_color(i)) return false;
    }
    return true;
  }
};

}  // namespace

IsoCoset iso_coset_hypergraph(const Hypergraph& h1, const Hypergraph& h2,
                              const PermGroup& gamma, const std::vector<int>& theta,
                              SearchStats* stats) {
  if (h1.n != h2.n) throw DomainError("hypergraphs must share a domain size");
  if (gamma.degree() != h1.n || static_cast<int>(theta.size()) != h1.n)
    throw DomainError("group/bijection domain mismatch");

  // Any isomorphism preserves the multiset of (size, color); cheap reject.
  auto profile = [](const Hypergraph& h) {
    std::vector<std::pair<int, int>> p;
    for (std::size_t i = 0; i < h.edges.size(); ++i)
      p.emplace_back(static_cast<int>(h.edges[i].size()), h.edge_color(i));
    std::sort(p.begin(), p.end());
    return p;
  };
  if (profile(h1) != profile(h2)) return IsoCoset::make_empty();

  auto inv = incidence_invariants(h1, h2);
  if (!inv.compatible) return IsoCoset::make_empty();

  EdgeTable t1, t2;
  t1.build(h1);
  t2.build(h2);

  std::vector<long long> weight(h1.n, 0);
  for (const auto& e : h1.edges)
    for (int v : e) ++weight[v];
  PermGroup chain = rebase_by_constraint(gamma, weight);

  HyperCallbacks cross;
  cross.init(h1);
  cross.dst_table = &t2;
  cross.inv_src = &inv.c1.color;
  cross.inv_dst = &inv.c2.color;

  HyperCallbacks self;
  self.init(h1);
  self.dst_table = &t1;
  self.inv_src = &inv.c1.color;
  self.inv_dst = &inv.c1.color;

  CosetCallbacks cross_cb{
      [&cross](const std::vector<int>& s, const std::vector<int>& i) { return cross.extend_ok(s, i); },
      [&cross](const std::vector<int>& phi) { return cross.full_ok(phi); }};
  CosetCallbacks self_cb{
      [&self](const std::vector<int>& s, const std::vector<int>& i) { return self.extend_ok(s, i); },
      [&self](const std::vector<int>& phi) { return self.full_ok(phi); }};

  return coset_constrained_iso(chain, theta, cross_cb, self_cb, stats);
}

namespace {

struct GraphCallbacks {
  const ColoredGraph* src;
  const ColoredGraph* dst;
  const std::vector<int>* inv_src;
  const std::vector<int>* inv_dst;

  bool extend_ok(const std::vector<int>& pins_src, const std::vector<int>& pins_img) const {
    int v = pins_src.back(), y = pins_img.back();
    if ((*inv_src)[v] != (*inv_dst)[y]) return false;
    for (std::size_t i = 0; i + 1 < pins_src.size(); ++i) {
      int u = pins_src[i], x = pins_img[i];
      bool e1 = src->has_edge(u, v), e2 = dst->has_edge(x, y);
      if (e1 != e2) return false;
      if (e1) {
        if (src->arc_color(u, v) != dst->arc_color(x, y)) return false;
        if (src->arc_color(v, u) != dst->arc_color(y, x)) return false;
      }
    }
    return true;
  }

  bool full_ok(const std::vector<int>& phi) const { return is_colored_iso(*src, *dst, phi); }
};

}  // namespace

IsoCoset iso_coset_colored_graph(const ColoredGraph& g1, const ColoredGraph& g2,
                                 const PermGroup& gamma, const std::vector<int>& theta,
                                 SearchStats* stats) {
  if (g1.n != g2.n) return IsoCoset::make_empty();
  if (gamma.degree() != g1.n || static_cast<int>(theta.size()) != g1.n)
    throw DomainError("group/bijection domain mismatch");

  auto joint = wl1_stable_joint(g1, uniform_coloring(g1.n), g2, uniform_coloring(g2.n));
  if (!joint.compatible) return IsoCoset::make_empty();

  std::vector<long long> weight(g1.n);
  for (int v = 0; v < g1.n; ++v) weight[v] = g1.degree(v);
  PermGroup chain = rebase_by_constraint(gamma, weight);

  GraphCallbacks cross{&g1, &g2, &joint.c1.color, &joint.c2.color};
  GraphCallbacks self{&g1, &g1, &joint.c1.color, &joint.c1.color};

  CosetCallbacks cross_cb{
      [&cross](const std::vector<int>& s, const std::vector<int>& i) { return cross.extend_ok(s, i); },
      [&cross](const std::vector<int>& phi) { return cross.full_ok(phi); }};
  CosetCallbacks self_cb{
      [&self](const std::vector<int>& s, const std::vector<int>& i) { return self.extend_ok(s, i); },
      [&self](const std::vector<int>& phi) { return self.full_ok(phi); }};

  return coset_constrained_iso(chain, theta, cross_cb, self_cb, stats);
}

}  // namespace k3h
