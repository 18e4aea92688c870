#include "k3hiso/tk_wl.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "k3hiso/hypergraph_iso.hpp"

namespace k3h {

namespace {

void check_k(int k) {
  if (k != 1 && k != 2) throw DomainError("k must be 1 or 2");
}

void check_t(int t) {
  if (t < 1) throw DomainError("t must be positive");
}

// Recording of one refined color's derivation within a refinement round.
struct RoundRecord {
  std::vector<int> parent;                                // per new color
  std::vector<std::vector<std::pair<int, int>>> multiset;  // (tuple id, multiplicity)
  std::vector<std::array<int, 3>> tuples;                  // k=2: (a,b,-1); k=1: (a,arc_uv,arc_vu)
};

struct SplitRecord {
  std::vector<int> parent;  // per new color
};

// One graph's evolving (t,k) state at the k-tuple level.
struct TkState {
  const ColoredGraph* g;
  int t, k;
  std::vector<int> col;  // size n (k=1) or n*n (k=2)
  int classes = 0;

  int n() const { return g->n; }

  // Runs the initial k-WL refinement from the seed (the first step of the
  // alternation).
  void init_from_seed(const VertexColoring& seed) {
    if (k == 1) {
      VertexColoring c = wl1_stable(*g, seed);
      col = c.color;
      classes = c.classes;
    } else {
      PairColoring pc = wl2_stable(*g, seed);
      col = pc.color;
      classes = pc.classes;
    }
  }

  VertexColoring diag() const {
    std::vector<std::vector<int>> tuples(n());
    for (int v = 0; v < n(); ++v)
      tuples[v] = {k == 1 ? col[v] : col[static_cast<std::size_t>(v) * n() + v]};
    return combine_vertex_colors(tuples, {}).first;
  }

  // One k-WL refinement round; true if the partition changed.
  bool refine_round(RoundRecord* rec) {
    std::vector<std::vector<int>> sigs;
    std::vector<std::vector<std::array<int, 3>>> raw;  // per element: sorted tuple list for recording
    if (k == 1) {
      sigs.resize(n());
      raw.resize(n());
      for (int v = 0; v < n(); ++v) {
        auto& nb = raw[v];
        for (int w : g->adj[v]) nb.push_back({col[w], g->arc_color(v, w), g->arc_color(w, v)});
        std::sort(nb.begin(), nb.end());
        auto& sig = sigs[v];
        sig.push_back(col[v]);
        for (auto& e : nb) {
          sig.push_back(e[0]);
          sig.push_back(e[1]);
          sig.push_back(e[2]);
        }
      }
    } else {
      const int nn = n();
      sigs.resize(static_cast<std::size_t>(nn) * nn);
      raw.resize(sigs.size());
      std::vector<std::array<int, 3>> tmp(nn);
      for (int u = 0; u < nn; ++u)
        for (int v = 0; v < nn; ++v) {
          for (int w = 0; w < nn; ++w)
            tmp[w] = {col[static_cast<std::size_t>(w) * nn + v],
                      col[static_cast<std::size_t>(u) * nn + w], -1};
          std::sort(tmp.begin(), tmp.end());
          auto& sig = sigs[static_cast<std::size_t>(u) * nn + v];
          auto& rl = raw[static_cast<std::size_t>(u) * nn + v];
          sig.push_back(col[static_cast<std::size_t>(u) * nn + v]);
          for (int i = 0; i < nn;) {
            int j = i;
            while (j < nn && tmp[j] == tmp[i]) ++j;
            sig.push_back(tmp[i][0]);
            sig.push_back(tmp[i][1]);
            sig.push_back(j - i);
            rl.push_back({tmp[i][0], tmp[i][1], j - i});
            i = j;
          }
        }
    }
    int new_classes = 0;
    std::vector<int> ids = canonical_ids(sigs, &new_classes);
    bool changed = new_classes != classes;
    if (changed && rec) {
      rec->parent.assign(new_classes, -1);
      rec->multiset.assign(new_classes, {});
      std::map<std::array<int, 3>, int> tuple_id;
      for (std::size_t e = 0; e < ids.size(); ++e) {
        int c = ids[e];
        if (rec->parent[c] != -1) continue;
        rec->parent[c] = col[e];
        if (k == 2) {
          for (auto& [a, b, m] : raw[e]) {
            std::array<int, 3> key{a, b, -1};
            auto [it, fresh] = tuple_id.emplace(key, static_cast<int>(rec->tuples.size()));
            if (fresh) rec->tuples.push_back(key);
            rec->multiset[c].emplace_back(it->second, m);
          }
        } else {
          // RLE over identical (color, arcs) neighbor entries.
          const auto& nb = raw[e];
          for (std::size_t i = 0; i < nb.size();) {
            std::size_t j = i;
            while (j < nb.size() && nb[j] == nb[i]) ++j;
            auto [it, fresh] = tuple_id.emplace(nb[i], static_cast<int>(rec->tuples.size()));
            if (fresh) rec->tuples.push_back(nb[i]);
            rec->multiset[c].emplace_back(it->second, static_cast<int>(j - i));
            i = j;
          }
        }
      }
    }
    if (changed) {
      col = ids;
      classes = new_classes;
    }
    return changed;
  }

  // Sizes of diagonal (vertex-level) classes keyed by color id.
  std::vector<int> diag_sizes() const {
    std::vector<int> sz(classes, 0);
    for (int v = 0; v < n(); ++v)
      ++sz[k == 1 ? col[v] : col[static_cast<std::size_t>(v) * n() + v]];
    return sz;
  }

  // Splits all diagonal classes of size <= t; true if the partition changed.
  bool split_small(SplitRecord* rec, std::vector<int>* split_class_ids) {
    std::vector<int> sz = diag_sizes();
    bool any = false;
    for (int v = 0; v < n(); ++v) {
      int c = k == 1 ? col[v] : col[static_cast<std::size_t>(v) * n() + v];
      if (sz[c] >= 2 && sz[c] <= t) any = true;
    }
    if (split_class_ids) {
      std::vector<char> seen(classes, 0);
      for (int v = 0; v < n(); ++v) {
        int c = k == 1 ? col[v] : col[static_cast<std::size_t>(v) * n() + v];
        if (sz[c] >= 2 && sz[c] <= t && !seen[c]) {
          seen[c] = 1;
          split_class_ids->push_back(c);
        }
      }
    }
    if (!any) return false;

    // Rank within the class (vertex-id order) individualizes small classes.
    std::vector<int> rank(n(), -1);
    std::vector<int> counter(classes, 0);
    for (int v = 0; v < n(); ++v) {
      int c = k == 1 ? col[v] : col[static_cast<std::size_t>(v) * n() + v];
      if (sz[c] <= t) rank[v] = counter[c]++;
    }
    std::vector<std::vector<int>> sigs;
    if (k == 1) {
      sigs.resize(n());
      for (int v = 0; v < n(); ++v) sigs[v] = {col[v], rank[v]};
    } else {
      const int nn = n();
      sigs.resize(static_cast<std::size_t>(nn) * nn);
      for (int u = 0; u < nn; ++u)
        for (int v = 0; v < nn; ++v) {
          std::size_t e = static_cast<std::size_t>(u) * nn + v;
          sigs[e] = {col[e], u == v ? rank[u] : -1};
        }
    }
    int new_classes = 0;
    std::vector<int> ids = canonical_ids(sigs, &new_classes);
    if (rec) {
      rec->parent.assign(new_classes, -1);
      for (std::size_t e = 0; e < ids.size(); ++e)
        if (rec->parent[ids[e]] == -1) rec->parent[ids[e]] = col[e];
    }
    col = ids;
    classes = new_classes;
    return true;
  }

  std::vector<VertexSet> vertex_classes() const {
    std::map<int, VertexSet> by_color;
    for (int v = 0; v < n(); ++v)
      by_color[k == 1 ? col[v] : col[static_cast<std::size_t>(v) * n() + v]].push_back(v);
    std::vector<VertexSet> out;
    for (auto& [c, s] : by_color) out.push_back(std::move(s));
    return out;
  }
};

struct LayerRecordEntry {
  enum Kind { Initial, Split, Round } kind;
  int ncolors = 0;
  std::vector<int> parent;
  std::vector<std::vector<std::pair<int, int>>> multiset;
  std::vector<std::array<int, 3>> tuples;
};

struct TkRunOutput {
  VertexColoring stable;
  TkTrace trace;
  std::vector<LayerRecordEntry> layers;
  std::vector<VertexSet> classes;       // final vertex classes
  std::vector<int> class_color;         // per class: final diagonal color id
};

TkRunOutput run_tk(const ColoredGraph& g, const VertexColoring& seed, int t, int k,
                   bool record_layers, TkState* preset_state = nullptr) {
  check_k(k);
  check_t(t);
  TkRunOutput out;
  TkState st{&g, t, k};
  if (preset_state)
    st = *preset_state;
  else
    st.init_from_seed(seed);

  // chi_0 is the seed joined with the graph's own vertex colors.
  {
    std::vector<std::vector<int>> tuples(g.n);
    for (int v = 0; v < g.n; ++v) tuples[v] = {seed.color[v], g.vertex_colors[v]};
    out.trace.initial = combine_vertex_colors(tuples, {}).first;
  }
  if (record_layers) {
    LayerRecordEntry init;
    init.kind = LayerRecordEntry::Initial;
    init.ncolors = st.classes;
    out.layers.push_back(std::move(init));
  }
  // The initial stable run counts as the first refinement step when it
  // refines chi_0.
  {
    VertexColoring after = st.diag();
    if (!same_partition(after.color, out.trace.initial.color)) {
      TkStep step;
      step.kind = TkStepKind::Refine;
      step.coloring = after;
      out.trace.steps.push_back(std::move(step));
    }
  }

  while (true) {
    bool changed_any = false;

    // splitting step
    {
      SplitRecord srec;
      std::vector<int> split_ids;
      bool ch = st.split_small(record_layers ? &srec : nullptr, &split_ids);
      if (ch) {
        changed_any = true;
        TkStep step;
        step.kind = TkStepKind::Split;
        step.coloring = st.diag();
        step.classes_split = split_ids;
        out.trace.steps.push_back(std::move(step));
        if (record_layers) {
          LayerRecordEntry e;
          e.kind = LayerRecordEntry::Split;
          e.ncolors = st.classes;
          e.parent = std::move(srec.parent);
          out.layers.push_back(std::move(e));
        }
      }
    }

    // refinement step: k-WL rounds to stability
    {
      VertexColoring before = st.diag();
      bool any_round = false;
      while (true) {
        RoundRecord rrec;
        bool ch = st.refine_round(record_layers ? &rrec : nullptr);
        if (!ch) break;
        any_round = true;
        if (record_layers) {
          LayerRecordEntry e;
          e.kind = LayerRecordEntry::Round;
          e.ncolors = st.classes;
          e.parent = std::move(rrec.parent);
          e.multiset = std::move(rrec.multiset);
          e.tuples = std::move(rrec.tuples);
          out.layers.push_back(std::move(e));
        }
      }
      if (any_round) {
        changed_any = true;
        // Pair-level rounds may leave the vertex partition unchanged; the
        // vertex-level trace only records real refinements.
        VertexColoring after = st.diag();
        if (!same_partition(after.color, before.color)) {
          TkStep step;
          step.kind = TkStepKind::Refine;
          step.coloring = after;
          out.trace.steps.push_back(std::move(step));
        }
      }
    }

    if (!changed_any) break;
  }

  out.stable = st.diag();
  // Final classes ordered by final diagonal color id.
  std::map<int, VertexSet> by_color;
  for (int v = 0; v < g.n; ++v) {
    int c = (k == 1) ? st.col[v] : st.col[static_cast<std::size_t>(v) * g.n + v];
    by_color[c].push_back(v);
  }
  for (auto& [c, s] : by_color) {
    out.class_color.push_back(c);
    out.classes.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::pair<VertexColoring, TkTrace> tk_stable_seeded(const ColoredGraph& g,
                                                    const VertexColoring& seed, int t, int k) {
  if (static_cast<int>(seed.color.size()) != g.n) throw DomainError("seed size mismatch");
  auto out = run_tk(g, seed, t, k, false);
  return {out.stable, std::move(out.trace)};
}

std::pair<VertexColoring, TkTrace> tk_stable(const ColoredGraph& g, int t, int k) {
  return tk_stable_seeded(g, uniform_coloring(g.n), t, k);
}

VertexSet closure_seeded(const ColoredGraph& g, const VertexColoring& base, const VertexSet& X,
                         int t, int k) {
  VertexColoring seed = individualized_seed(g, X, base.color);
  auto [stable, trace] = tk_stable_seeded(g, seed, t, k);
  (void)trace;
  std::vector<int> sz(stable.classes, 0);
  for (int c : stable.color) ++sz[c];
  VertexSet out;
  for (int v = 0; v < g.n; ++v)
    if (sz[stable.color[v]] == 1) out.push_back(v);
  return out;
}

VertexSet closure(const ColoredGraph& g, const VertexSet& X, int t, int k) {
  for (int v : X) g.check_vertex(v);
  return closure_seeded(g, uniform_coloring(g.n), X, t, k);
}

bool is_tk_bounded_seeded(const ColoredGraph& g, const VertexColoring& seed, int t, int k) {
  return tk_stable_seeded(g, seed, t, k).first.discrete();
}

bool is_tk_bounded(const ColoredGraph& g, int t, int k) {
  return is_tk_bounded_seeded(g, uniform_coloring(g.n), t, k);
}

// --- layer graph construction --------------------------------------------------

namespace {

// Vertex color tuples: (0, layer, col-tag | layer-1 color, 0, 0) for color
// vertices, (1, layer, a-extras...) for auxiliary vertices. Arc color tuples:
// (0 parent), (1, constituent-mask), (2, multiplicity). Interned jointly when
// two graphs are built together so equal tuples share ids.
struct LayerInterner {
  std::map<std::vector<int>, int> vertex_ids, arc_ids;
  int vid(std::vector<int> key) {
    auto [it, fresh] = vertex_ids.emplace(std::move(key), static_cast<int>(vertex_ids.size()));
    return it->second;
  }
  int aid(std::vector<int> key) {
    auto [it, fresh] = arc_ids.emplace(std::move(key), static_cast<int>(arc_ids.size()) + 1);
    return it->second;
  }
};

LayerGraph assemble_layer_graph(const TkRunOutput& run, int k, LayerInterner& interner) {
  // Count vertices: per layer, color vertices; per Round layer, aux vertices.
  int total = 0;
  std::vector<int> color_base(run.layers.size(), 0);
  std::vector<int> aux_base(run.layers.size(), 0);
  for (std::size_t L = 0; L < run.layers.size(); ++L) {
    color_base[L] = total;
    total += run.layers[L].ncolors;
    aux_base[L] = total;
    if (run.layers[L].kind == LayerRecordEntry::Round)
      total += static_cast<int>(run.layers[L].tuples.size());
  }

  ColoredGraph h(total);
  std::map<std::pair<int, int>, std::vector<int>> edge_colors;

  auto add_arc = [&](int a, int b, std::vector<int> color_key) {
    if (a > b) std::swap(a, b);
    edge_colors[{a, b}].push_back(interner.aid(std::move(color_key)));
  };

  for (std::size_t L = 0; L < run.layers.size(); ++L) {
    const auto& layer = run.layers[L];
    for (int c = 0; c < layer.ncolors; ++c) {
      int tag = (layer.kind == LayerRecordEntry::Initial) ? c : -1;
      h.vertex_colors[color_base[L] + c] =
          interner.vid({0, static_cast<int>(L), tag, 0, 0});
    }
    if (layer.kind == LayerRecordEntry::Initial) continue;

    // Parent links into the previous layer.
    for (int c = 0; c < layer.ncolors; ++c)
      add_arc(color_base[L] + c, color_base[L - 1] + layer.parent[c], {0, 0});

    if (layer.kind == LayerRecordEntry::Round) {
      for (std::size_t ti = 0; ti < layer.tuples.size(); ++ti) {
        const auto& tup = layer.tuples[ti];
        int aux = aux_base[L] + static_cast<int>(ti);
        if (k == 2) {
          h.vertex_colors[aux] = interner.vid({1, static_cast<int>(L), 0, 0, 0});
          // Constituent links with position masks merged per target.
          if (tup[0] == tup[1]) {
            add_arc(aux, color_base[L - 1] + tup[0], {1, 3});
          } else {
            add_arc(aux, color_base[L - 1] + tup[0], {1, 1});
            add_arc(aux, color_base[L - 1] + tup[1], {1, 2});
          }
        } else {
          // Arc colors of the traversed edge ride on the aux vertex color.
          h.vertex_colors[aux] = interner.vid({1, static_cast<int>(L), 0, tup[1], tup[2]});
          add_arc(aux, color_base[L - 1] + tup[0], {1, 1});
        }
      }
      for (int c = 0; c < layer.ncolors; ++c)
        for (auto [ti, mult] : layer.multiset[c])
          add_arc(color_base[L] + c, aux_base[L] + ti, {2, mult});
    }
  }

  for (auto& [uv, colors] : edge_colors) {
    std::sort(colors.begin(), colors.end());
    int merged;
    if (colors.size() == 1) {
      merged = colors[0];
    } else {
      std::vector<int> key{9};  // tag keeps merged keys apart from descriptors
      key.insert(key.end(), colors.begin(), colors.end());
      merged = interner.aid(std::move(key));
    }
    h.add_edge(uv.first, uv.second, merged, merged);
  }

  LayerGraph out;
  out.h = std::move(h);
  out.layers = static_cast<int>(run.layers.size());
  out.classes = run.classes;
  const int last = static_cast<int>(run.layers.size()) - 1;
  for (std::size_t i = 0; i < run.classes.size(); ++i)
    out.final_layer_vertex.push_back(color_base[last] + run.class_color[i]);
  return out;
}

}  // namespace

LayerGraph build_layer_graph_seeded(const ColoredGraph& g, const VertexColoring& seed, int t,
                                    int k) {
  auto run = run_tk(g, seed, t, k, true);
  LayerInterner interner;
  return assemble_layer_graph(run, k, interner);
}

LayerGraph build_layer_graph(const ColoredGraph& g, int t, int k) {
  return build_layer_graph_seeded(g, uniform_coloring(g.n), t, k);
}

// --- isomorphism of bounded graphs ----------------------------------------------

IsoCoset iso_t1_bounded(const ColoredGraph& g1, const ColoredGraph& g2, int t,
                        SearchStats* stats) {
  check_t(t);
  if (g1.n != g2.n) return IsoCoset::make_empty();
  // Obviously non-isomorphic pairs short-circuit before the precondition.
  if (!wl1_stable_joint(g1, uniform_coloring(g1.n), g2, uniform_coloring(g2.n)).compatible)
    return IsoCoset::make_empty();
  if (!is_tk_bounded(g1, t, 1) || !is_tk_bounded(g2, t, 1))
    throw PreconditionError("inputs are not (t,1)-WL-bounded");

  RefinementOptions opt;
  opt.class_cap = t;
  opt.need_group = false;
  RefinementResult first = refinement_iso_search(g1, uniform_coloring(g1.n), g2,
                                                 uniform_coloring(g2.n), opt);
  if (stats) {
    stats->nodes += first.stats.nodes;
    stats->leaves += first.stats.leaves;
  }
  if (!first.found) return IsoCoset::make_empty();

  opt.need_group = true;
  RefinementResult aut = refinement_iso_search(g1, uniform_coloring(g1.n), g1,
                                               uniform_coloring(g1.n), opt);
  if (stats) {
    stats->nodes += aut.stats.nodes;
    stats->leaves += aut.stats.leaves;
  }
  return IsoCoset::make(std::move(aut.aut), std::move(first.iso));
}

namespace {

BoundingCoset bounding_impl(const ColoredGraph& g1, const VertexColoring& s1,
                            const ColoredGraph& g2, const VertexColoring& s2, int t, int k,
                            SearchStats* stats) {
  check_k(k);
  check_t(t);

  // Joint initial stable run so that layer-one color values are comparable
  // across the two graphs.
  TkState st1{&g1, t, k}, st2{&g2, t, k};
  if (k == 1) {
    auto joint = wl1_stable_joint(g1, s1, g2, s2);
    st1.col = joint.c1.color;
    st1.classes = joint.c1.classes;
    st2.col = joint.c2.color;
    st2.classes = joint.c2.classes;
  } else {
    auto joint = wl2_stable_joint(g1, s1, g2, s2);
    st1.col = joint.c1.color;
    st1.classes = joint.c1.classes;
    st2.col = joint.c2.color;
    st2.classes = joint.c2.classes;
  }

  auto run1 = run_tk(g1, s1, t, k, true, &st1);
  auto run2 = run_tk(g2, s2, t, k, true, &st2);

  BoundingCoset out;
  out.p1 = run1.classes;
  out.p2 = run2.classes;
  out.coset = IsoCoset::make_empty();

  LayerInterner interner;  // shared: equal structural tuples get equal ids
  LayerGraph h1 = assemble_layer_graph(run1, k, interner);
  LayerGraph h2 = assemble_layer_graph(run2, k, interner);

  IsoCoset layer_iso = iso_t1_bounded(h1.h, h2.h, t, stats);
  if (layer_iso.empty) return out;

  // Restrict to the final-layer class vertices. Any automorphism of the layer
  // graph fixes layer membership and parent chains, so the set is invariant.
  VertexSet w1 = h1.final_layer_vertex;
  VertexSet w1_sorted = sorted_set(w1);
  if (w1 != w1_sorted) throw Error("internal: final layer vertices out of order");
  VertexSet w2 = h2.final_layer_vertex;
  PermGroup restricted = layer_iso.group.restrict_to_invariant(w1);

  std::vector<int> pos_in_w2(h2.h.n, -1);
  for (std::size_t j = 0; j < w2.size(); ++j) pos_in_w2[w2[j]] = static_cast<int>(j);
  std::vector<int> theta(w1.size());
  for (std::size_t i = 0; i < w1.size(); ++i) {
    int img = layer_iso.rep[w1[i]];
    if (img < 0 || pos_in_w2[img] < 0)
      throw Error("internal: layer-graph isomorphism does not respect class vertices");
    theta[i] = pos_in_w2[img];
  }
  out.coset = IsoCoset::make(std::move(restricted), std::move(theta));
  return out;
}

}  // namespace

BoundingCoset bounding_coset_on_classes_seeded(const ColoredGraph& g1, const VertexColoring& s1,
                                               const ColoredGraph& g2, const VertexColoring& s2,
                                               int t, int k, SearchStats* stats) {
  return bounding_impl(g1, s1, g2, s2, t, k, stats);
}

BoundingCoset bounding_coset_on_classes(const ColoredGraph& g1, const ColoredGraph& g2, int t,
                                        int k, SearchStats* stats) {
  return bounding_impl(g1, uniform_coloring(g1.n), g2, uniform_coloring(g2.n), t, k, stats);
}

IsoCoset iso_tk_bounded(const ColoredGraph& g1, const ColoredGraph& g2, int t, int k,
                        SearchStats* stats) {
  check_k(k);
  check_t(t);
  if (!is_tk_bounded(g1, t, k) || !is_tk_bounded(g2, t, k))
    throw PreconditionError("inputs are not (t,k)-WL-bounded");
  if (g1.n != g2.n) return IsoCoset::make_empty();

  BoundingCoset b = bounding_coset_on_classes(g1, g2, t, k, stats);
  if (b.coset.empty) return IsoCoset::make_empty();

  // Boundedness makes every class a singleton; rename classes to vertices.
  std::vector<int> v1(b.p1.size()), v2(b.p2.size());
  for (std::size_t i = 0; i < b.p1.size(); ++i) {
    if (b.p1[i].size() != 1 || b.p2[i].size() != 1)
      throw Error("internal: stable classes of a bounded graph must be singletons");
    v1[i] = b.p1[i][0];
    v2[i] = b.p2[i][0];
  }
  std::vector<int> class_of_v1(g1.n);
  for (std::size_t i = 0; i < v1.size(); ++i) class_of_v1[v1[i]] = static_cast<int>(i);

  std::vector<Perm> vertex_gens;
  for (const Perm& s : b.coset.group.strong_generators()) {
    Perm p(g1.n);
    for (int x = 0; x < g1.n; ++x) p.img[x] = v1[s(class_of_v1[x])];
    vertex_gens.push_back(p);
  }
  PermGroup gamma_v = PermGroup::from_generators(g1.n, vertex_gens);
  std::vector<int> theta_v(g1.n);
  for (int x = 0; x < g1.n; ++x) theta_v[x] = v2[b.coset.rep[class_of_v1[x]]];

  return iso_coset_colored_graph(g1, g2, gamma_v, theta_v, stats);
}

}  // namespace k3h
