#include "k3hiso/fpt_iso.hpp"

#include <algorithm>
#include <array>
#include <chrono>

#include "k3hiso/matching.hpp"

namespace k3h {

bool LambdaSet::contains_map(const std::vector<int>& m) const {
  return std::binary_search(maps.begin(), maps.end(), m);
}

void LambdaSet::insert_map(std::vector<int> m) {
  auto it = std::lower_bound(maps.begin(), maps.end(), m);
  if (it == maps.end() || *it != m) maps.insert(it, std::move(m));
}

LambdaSet LambdaSet::inverted() const {
  LambdaSet out;
  out.source = target;
  out.target = source;
  for (const auto& m : maps) {
    // m: source[i] -> m[i]; invert to target order.
    std::vector<int> inv(out.source.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      auto pos = std::lower_bound(out.source.begin(), out.source.end(), m[i]) - out.source.begin();
      inv[pos] = source[i];
    }
    out.insert_map(std::move(inv));
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

std::vector<int> restrict_map(const VertexSet& from, const std::vector<int>& images,
                              const VertexSet& sub) {
  // images parallel to `from`; returns images parallel to `sub` (sub ⊆ from).
  std::vector<int> out;
  out.reserve(sub.size());
  for (int v : sub) {
    auto pos = std::lower_bound(from.begin(), from.end(), v) - from.begin();
    out.push_back(images[pos]);
  }
  return out;
}

}  // namespace

struct LambdaDp::Impl {
  const ColoredGraph* g[2];
  const Decomposition* dec[2];
  IsoStats* stats;
  Clock::time_point deadline{};
  bool has_deadline = false;

  std::map<std::vector<int>, int> vcolor_interner;
  std::map<std::vector<int>, int> acolor_interner;

  struct Instance {
    int side = 0, node = 0;
    VertexSet verts;  // original ids
    ColoredGraph graph;
    std::vector<int> orig_of;
    std::vector<int> local_of;  // original id -> local id (or -1)
    VertexSet s_local, gamma_local, bag_local;
    std::vector<int> children;
    bool opt_a = false, opt_b = false;
  };
  std::map<std::pair<int, int>, Instance> instances;
  std::map<std::array<int, 4>, LambdaSet> memo;

  int vcolor(std::vector<int> key) {
    auto [it, fresh] = vcolor_interner.emplace(std::move(key), vcolor_interner.size());
    return it->second;
  }
  int acolor(std::vector<int> key) {
    auto [it, fresh] = acolor_interner.emplace(std::move(key), acolor_interner.size());
    return it->second;
  }

  void check_deadline() const {
    if (has_deadline && Clock::now() > deadline)
      throw TimeoutError("isomorphism search timed out");
  }

  const Instance& instance(int side, int node) {
    auto key = std::make_pair(side, node);
    auto it = instances.find(key);
    if (it != instances.end()) return it->second;

    const Decomposition& d = *dec[side];
    Instance inst;
    inst.side = side;
    inst.node = node;
    inst.verts = d.subtree_vertices(node);
    ColoredGraph sub = induced_subgraph(*g[side], inst.verts);
    inst.orig_of = inst.verts;
    inst.local_of.assign(g[side]->n, -1);
    for (std::size_t i = 0; i < inst.verts.size(); ++i)
      inst.local_of[inst.verts[i]] = static_cast<int>(i);

    const auto& nd = d.nodes[node];
    // Instance colors: adhesion membership layered over input colors and the
    // depth-set coloring.
    for (std::size_t i = 0; i < inst.verts.size(); ++i) {
      int v = inst.verts[i];
      std::vector<int> key_color{set_contains(nd.adhesion, v) ? 1 : 0,
                                 g[side]->vertex_colors[v]};
      for (int dep : d.lambda[v]) key_color.push_back(dep + 2);
      sub.vertex_colors[i] = vcolor(std::move(key_color));
    }
    inst.graph = std::move(sub);

    auto to_local = [&](const VertexSet& orig) {
      VertexSet out;
      for (int v : orig) out.push_back(inst.local_of[v]);
      std::sort(out.begin(), out.end());
      return out;
    };
    inst.s_local = to_local(nd.adhesion);
    inst.gamma_local = to_local(nd.anchors);
    inst.bag_local = to_local(nd.bag);
    inst.children = nd.children;

    inst.opt_a = true;
    inst.opt_b = !nd.children.empty();
    for (std::size_t i = 0; i < nd.children.size(); ++i) {
      const VertexSet& ai = d.nodes[nd.children[i]].adhesion;
      if (ai != nd.bag) inst.opt_b = false;
      for (std::size_t j = i + 1; j < nd.children.size(); ++j)
        if (ai == d.nodes[nd.children[j]].adhesion) inst.opt_a = false;
    }

    auto [it2, fresh] = instances.emplace(key, std::move(inst));
    return it2->second;
  }

  // ---- gadget construction (option a) ----

  struct GadgetContext {
    // Kids of the pair in fixed order: A's children then B's children.
    std::vector<std::pair<int, int>> kids;  // (side, node)
    std::vector<int> rep_of;                // kid index -> representative kid index
    std::vector<int> q_of;                  // kid index -> equivalence class number
    std::vector<std::vector<int>> sigma;    // kid index -> map rep-adhesion -> kid-adhesion
  };

  GadgetContext build_context(const Instance& A, const Instance& B) {
    GadgetContext ctx;
    for (int c : A.children) ctx.kids.emplace_back(A.side, c);
    for (int c : B.children) ctx.kids.emplace_back(B.side, c);

    const int m = static_cast<int>(ctx.kids.size());
    std::vector<int> parent(m);
    for (int i = 0; i < m; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        const LambdaSet& l = compute(ctx.kids[i].first, ctx.kids[i].second, ctx.kids[j].first,
                                     ctx.kids[j].second);
        if (!l.empty()) parent[find(i)] = find(j);
      }
    // Representative: least kid index in the class; classes numbered by
    // representative order.
    ctx.rep_of.assign(m, -1);
    ctx.q_of.assign(m, -1);
    std::vector<int> reps;
    for (int i = 0; i < m; ++i) {
      int r = find(i);
      int least = i;
      for (int j = 0; j < m; ++j)
        if (find(j) == r && j < least) least = j;
      ctx.rep_of[i] = least;
    }
    for (int i = 0; i < m; ++i)
      if (ctx.rep_of[i] == i) {
        ctx.q_of[i] = static_cast<int>(reps.size());
        reps.push_back(i);
      }
    for (int i = 0; i < m; ++i) ctx.q_of[i] = ctx.q_of[ctx.rep_of[i]];

    ctx.sigma.resize(m);
    for (int i = 0; i < m; ++i) {
      int r = ctx.rep_of[i];
      if (r == i) {
        const auto& adh = dec[ctx.kids[i].first]->nodes[ctx.kids[i].second].adhesion;
        ctx.sigma[i] = adh;  // identity as an image tuple
      } else {
        const LambdaSet& l =
            compute(ctx.kids[r].first, ctx.kids[r].second, ctx.kids[i].first, ctx.kids[i].second);
        if (l.empty()) throw Error("internal: representative without a bridging map");
        ctx.sigma[i] = l.maps.front();  // lexicographically least image tuple
      }
    }
    return ctx;
  }

  GadgetGraph build_gadget(const Instance& X, const GadgetContext& ctx, int kid_offset) {
    GadgetGraph out;
    const int base_n = X.graph.n;

    // One vertex per (child adhesion set, self-map).
    struct GadgetVertex {
      int kid_index;  // into ctx.kids
      int map_index;  // into the self lambda maps
    };
    std::vector<GadgetVertex> gadgets;
    for (std::size_t j = 0; j < X.children.size(); ++j) {
      int kid = kid_offset + static_cast<int>(j);
      const LambdaSet& self = compute(ctx.kids[kid].first, ctx.kids[kid].second,
                                      ctx.kids[kid].first, ctx.kids[kid].second);
      for (std::size_t mi = 0; mi < self.maps.size(); ++mi)
        gadgets.push_back({kid, static_cast<int>(mi)});
    }

    ColoredGraph h(base_n + static_cast<int>(gadgets.size()));
    for (int v = 0; v < base_n; ++v) {
      int region;
      if (set_contains(X.s_local, v))
        region = 0;
      else if (set_contains(X.gamma_local, v))
        region = 1;
      else if (set_contains(X.bag_local, v))
        region = 2;
      else
        region = 3;
      h.vertex_colors[v] = vcolor({region, X.graph.vertex_colors[v]});
    }
    for (auto [u, v] : X.graph.edges())
      h.add_edge(u, v, acolor({0, X.graph.arc_color(u, v)}),
                 acolor({0, X.graph.arc_color(v, u)}));

    for (std::size_t gi = 0; gi < gadgets.size(); ++gi) {
      int hv = base_n + static_cast<int>(gi);
      int kid = gadgets[gi].kid_index;
      h.vertex_colors[hv] = vcolor({4, ctx.q_of[kid], ctx.q_of[kid]});

      const LambdaSet& self = compute(ctx.kids[kid].first, ctx.kids[kid].second,
                                      ctx.kids[kid].first, ctx.kids[kid].second);
      const std::vector<int>& gamma_map = self.maps[gadgets[gi].map_index];
      const VertexSet& kid_adh = self.source;  // sorted original ids
      const std::vector<int>& sigma = ctx.sigma[kid];
      // sigma maps the representative's adhesion (in its sorted order) onto
      // kid_adh; position c follows the representative's numbering.
      for (std::size_t c = 0; c < sigma.size(); ++c) {
        int w = sigma[c];  // in kid_adh
        auto pos = std::lower_bound(kid_adh.begin(), kid_adh.end(), w) - kid_adh.begin();
        int v_orig = gamma_map[pos];
        int v_local = X.local_of[v_orig];
        if (v_local < 0) throw Error("internal: adhesion vertex missing from instance");
        int color = acolor({1, static_cast<int>(c) + 1});
        h.add_edge(hv, v_local, color, color);
      }
    }

    out.h = std::move(h);
    out.orig_of.assign(out.h.n, -1);
    for (int v = 0; v < base_n; ++v) out.orig_of[v] = X.orig_of[v];
    out.bag_local = X.bag_local;
    out.gamma_local = X.gamma_local;
    out.s_local = X.s_local;
    out.num_gadget_vertices = static_cast<int>(gadgets.size());
    out.a_set = X.bag_local;
    for (std::size_t gi = 0; gi < gadgets.size(); ++gi)
      out.a_set.push_back(base_n + static_cast<int>(gi));

    // A is contained in the closure of the anchors (gadget soundness).
    VertexSet cl = closure(out.h, out.gamma_local, 2, 2);
    if (set_intersection(out.a_set, cl) != out.a_set)
      throw Error("internal: gadget A-set escapes the anchored closure");
    return out;
  }

  // ---- exact per-tau pipeline ----

  struct TauOutcome {
    bool ok = false;
    std::vector<int> psi;  // position in sorted A_a -> position in sorted A_b
  };

  TauOutcome check_tau(const GadgetGraph& HA, const GadgetGraph& HB,
                       const std::vector<int>& order_a, const std::vector<int>& images) {
    if (stats) ++stats->tau_candidates;
    check_deadline();

    // Individualize the anchors according to tau on both sides.
    std::vector<int> tag_a(HA.h.n, -1), tag_b(HB.h.n, -1);
    for (std::size_t i = 0; i < order_a.size(); ++i) {
      tag_a[order_a[i]] = static_cast<int>(i);
      tag_b[images[i]] = static_cast<int>(i);
    }
    std::vector<std::vector<int>> ta(HA.h.n), tb(HB.h.n);
    for (int v = 0; v < HA.h.n; ++v)
      ta[v] = tag_a[v] >= 0 ? std::vector<int>{1, tag_a[v]}
                            : std::vector<int>{0, HA.h.vertex_colors[v]};
    for (int v = 0; v < HB.h.n; ++v)
      tb[v] = tag_b[v] >= 0 ? std::vector<int>{1, tag_b[v]}
                            : std::vector<int>{0, HB.h.vertex_colors[v]};
    auto [sa, sb] = combine_vertex_colors(ta, tb);

    if (stats) ++stats->coset_calls;
    BoundingCoset bc = bounding_coset_on_classes_seeded(HA.h, sa, HB.h, sb, 2, 2);
    if (bc.coset.empty) return {};

    // Classes covering A must be singletons (the anchored closure covers A).
    auto singleton_class_of = [](const std::vector<VertexSet>& p, int n) {
      std::vector<int> cls(n, -1);
      for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i].size() == 1) cls[p[i][0]] = static_cast<int>(i);
      return cls;
    };
    std::vector<int> cls_a = singleton_class_of(bc.p1, HA.h.n);
    std::vector<int> cls_b = singleton_class_of(bc.p2, HB.h.n);
    VertexSet qa, qb;
    for (int v : HA.a_set) {
      if (cls_a[v] < 0) throw Error("internal: A vertex not discrete under the anchors");
      qa.push_back(cls_a[v]);
    }
    for (int v : HB.a_set) {
      if (cls_b[v] < 0) throw Error("internal: A vertex not discrete under the anchors");
      qb.push_back(cls_b[v]);
    }
    VertexSet qa_sorted = sorted_set(qa), qb_sorted = sorted_set(qb);

    // Transport the class coset onto the A-classes.
    Hypergraph hqa, hqb;
    hqa.n = hqb.n = static_cast<int>(bc.p1.size());
    hqa.edges = {qa_sorted};
    hqb.edges = {qb_sorted};
    if (static_cast<int>(bc.p2.size()) != hqa.n) return {};
    IsoCoset trans = iso_coset_hypergraph(hqa, hqb, bc.coset.group, bc.coset.rep);
    if (trans.empty) return {};
    PermGroup on_q = trans.group.restrict_to_invariant(qa_sorted);
    std::vector<int> pos_in_qb(bc.p2.size(), -1);
    for (std::size_t i = 0; i < qb_sorted.size(); ++i) pos_in_qb[qb_sorted[i]] = static_cast<int>(i);
    std::vector<int> theta_q(qa_sorted.size());
    for (std::size_t i = 0; i < qa_sorted.size(); ++i) {
      int img = trans.rep[qa_sorted[i]];
      if (img < 0 || pos_in_qb[img] < 0) throw Error("internal: transporter broke the A classes");
      theta_q[i] = pos_in_qb[img];
    }

    // Rename class indices to A positions.
    VertexSet a_sorted = sorted_set(HA.a_set);
    VertexSet b_sorted = sorted_set(HB.a_set);
    std::vector<int> apos_of_q(qa_sorted.size(), -1), bpos_of_q(qb_sorted.size(), -1);
    for (std::size_t i = 0; i < a_sorted.size(); ++i) {
      int q = cls_a[a_sorted[i]];
      auto pos = std::lower_bound(qa_sorted.begin(), qa_sorted.end(), q) - qa_sorted.begin();
      apos_of_q[pos] = static_cast<int>(i);
    }
    for (std::size_t i = 0; i < b_sorted.size(); ++i) {
      int q = cls_b[b_sorted[i]];
      auto pos = std::lower_bound(qb_sorted.begin(), qb_sorted.end(), q) - qb_sorted.begin();
      bpos_of_q[pos] = static_cast<int>(i);
    }
    // Distinct A vertices sit in distinct singleton classes, so Q positions
    // biject onto A positions.
    if (qa_sorted.size() != a_sorted.size() || qb_sorted.size() != b_sorted.size())
      throw Error("internal: A vertices share stable classes");
    std::vector<Perm> a_gens;
    for (const Perm& s : on_q.strong_generators()) {
      Perm p(static_cast<int>(a_sorted.size()));
      for (std::size_t qpos = 0; qpos < qa_sorted.size(); ++qpos)
        p.img[apos_of_q[qpos]] = apos_of_q[s(static_cast<int>(qpos))];
      a_gens.push_back(p);
    }
    PermGroup gamma_a = PermGroup::from_generators(static_cast<int>(a_sorted.size()), a_gens);
    std::vector<int> theta_a(a_sorted.size());
    for (std::size_t qpos = 0; qpos < qa_sorted.size(); ++qpos)
      theta_a[apos_of_q[qpos]] = bpos_of_q[theta_q[qpos]];

    // Exact finish on the induced colored subgraphs.
    ColoredGraph ga = induced_subgraph(HA.h, a_sorted);
    ColoredGraph gb = induced_subgraph(HB.h, b_sorted);
    SearchStats dummy;
    IsoCoset final_coset = iso_coset_colored_graph(ga, gb, gamma_a, theta_a, &dummy);
    if (final_coset.empty) return {};
    TauOutcome out;
    out.ok = true;
    out.psi = final_coset.rep;
    return out;
  }

  // ---- tau backtracking over anchor bijections ----

  struct TauSearch {
    Impl* impl;
    const GadgetGraph* HA;
    const GadgetGraph* HB;
    std::vector<int> order;  // gamma_a locals: S first, then the rest
    int s_size = 0;

    LambdaSet* collect = nullptr;             // collect mode: insert sigma restrictions
    const std::vector<int>* forced = nullptr;  // witness mode: required images of order[0..s-1]
    std::vector<int> found_images;             // witness mode: surviving tau
    std::vector<int> found_psi;
    bool done = false;

    std::vector<int> images;

    struct Node {
      std::vector<int> c1, c2;
      int classes = 0;
    };

    bool refine(Node& node) const {
      const ColoredGraph& g1 = HA->h;
      const ColoredGraph& g2 = HB->h;
      while (true) {
        std::vector<std::vector<int>> t1(g1.n), t2(g2.n);
        auto sig = [](const ColoredGraph& g, const std::vector<int>& cur, int v,
                      std::vector<int>& s) {
          s.push_back(cur[v]);
          std::vector<std::array<int, 3>> nb;
          nb.reserve(g.adj[v].size());
          for (int w : g.adj[v]) nb.push_back({cur[w], g.arc_color(v, w), g.arc_color(w, v)});
          std::sort(nb.begin(), nb.end());
          for (auto& e : nb) {
            s.push_back(e[0]);
            s.push_back(e[1]);
            s.push_back(e[2]);
          }
        };
        for (int v = 0; v < g1.n; ++v) sig(g1, node.c1, v, t1[v]);
        for (int v = 0; v < g2.n; ++v) sig(g2, node.c2, v, t2[v]);
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

    Node individualize(const Node& parent, int v, int w) const {
      Node child;
      std::vector<std::vector<int>> t1(HA->h.n), t2(HB->h.n);
      for (int x = 0; x < HA->h.n; ++x) t1[x] = {parent.c1[x], x == v ? 1 : 0};
      for (int y = 0; y < HB->h.n; ++y) t2[y] = {parent.c2[y], y == w ? 1 : 0};
      auto [a, b] = combine_vertex_colors(t1, t2);
      child.c1 = a.color;
      child.c2 = b.color;
      child.classes = a.classes;
      return child;
    }

    std::vector<int> sigma_from_prefix() const {
      // order[0..s-1] are the sorted S locals; map to original target ids.
      std::vector<int> out;
      out.reserve(s_size);
      for (int i = 0; i < s_size; ++i) out.push_back(HB->orig_of[images[i]]);
      return out;
    }

    void dfs(Node node, int depth) {
      if (done) return;
      impl->check_deadline();
      if (!refine(node)) return;
      if (depth == s_size && collect && collect->contains_map(sigma_from_prefix()))
        return;  // this restriction is already certified

      if (depth == static_cast<int>(order.size())) {
        auto outcome = impl->check_tau(*HA, *HB, order, images);
        if (!outcome.ok) return;
        if (collect) {
          collect->insert_map(sigma_from_prefix());
        } else {
          found_images = images;
          found_psi = outcome.psi;
          done = true;
        }
        return;
      }

      int v = order[depth];
      std::vector<char> used(HB->h.n, 0);
      for (int i = 0; i < depth; ++i) used[images[i]] = 1;
      for (int w = 0; w < HB->h.n; ++w) {
        if (used[w] || node.c2[w] != node.c1[v]) continue;
        if (forced && depth < s_size && w != (*forced)[depth]) continue;
        images.push_back(w);
        dfs(individualize(node, v, w), depth + 1);
        images.pop_back();
        if (done) return;
      }
    }

    void run() {
      // Start from the joint 2-stable colors for strong initial pruning.
      auto joint = wl2_stable_joint(HA->h, uniform_coloring(HA->h.n), HB->h,
                                    uniform_coloring(HB->h.n));
      if (!joint.compatible) return;
      Node root;
      std::vector<std::vector<int>> t1(HA->h.n), t2(HB->h.n);
      for (int v = 0; v < HA->h.n; ++v) t1[v] = {joint.c1(v, v)};
      for (int v = 0; v < HB->h.n; ++v) t2[v] = {joint.c2(v, v)};
      auto [a, b] = combine_vertex_colors(t1, t2);
      root.c1 = a.color;
      root.c2 = b.color;
      root.classes = a.classes;
      dfs(std::move(root), 0);
    }
  };

  // ---- option (a) ----

  LambdaSet option_a(const Instance& A, const Instance& B, const std::vector<int>* forced_sigma,
                     std::vector<int>* witness_images, std::vector<int>* witness_psi,
                     GadgetContext* ctx_out, GadgetGraph* ha_out, GadgetGraph* hb_out) {
    LambdaSet res;
    res.source = dec[A.side]->nodes[A.node].adhesion;
    res.target = dec[B.side]->nodes[B.node].adhesion;

    GadgetContext ctx = build_context(A, B);
    GadgetGraph ha = build_gadget(A, ctx, 0);
    GadgetGraph hb = build_gadget(B, ctx, static_cast<int>(A.children.size()));

    TauSearch search;
    search.impl = this;
    search.HA = &ha;
    search.HB = &hb;
    // S locals first (sorted), then the remaining anchors (sorted).
    search.order = A.s_local;
    for (int v : A.gamma_local)
      if (!set_contains(A.s_local, v)) search.order.push_back(v);
    search.s_size = static_cast<int>(A.s_local.size());

    std::vector<int> forced_local;
    if (forced_sigma) {
      // forced images (original target ids) -> HB locals, aligned with order.
      const Instance& bi = B;
      for (int img_orig : *forced_sigma) forced_local.push_back(bi.local_of[img_orig]);
      search.forced = &forced_local;
    } else {
      search.collect = &res;
    }
    if (static_cast<int>(A.gamma_local.size()) == static_cast<int>(B.gamma_local.size()))
      search.run();

    if (forced_sigma) {
      if (!search.done) throw Error("internal: witness extraction found no surviving tau");
      *witness_images = search.found_images;
      *witness_psi = search.found_psi;
      if (ctx_out) *ctx_out = std::move(ctx);
      if (ha_out) *ha_out = std::move(ha);
      if (hb_out) *hb_out = std::move(hb);
    }
    return res;
  }

  // ---- option (b) ----

  // Enumerates bag bijections by backtracking over joint stable colors; each
  // complete sigma is accepted iff the child compatibility graph has a perfect
  // matching.
  LambdaSet option_b(const Instance& A, const Instance& B, const std::vector<int>* forced_sigma,
                     std::vector<int>* sigma_full_out, std::vector<int>* rho_out) {
    LambdaSet res;
    res.source = dec[A.side]->nodes[A.node].adhesion;
    res.target = dec[B.side]->nodes[B.node].adhesion;

    const int l = static_cast<int>(A.children.size());
    std::vector<std::vector<const LambdaSet*>> kid_lambda(l, std::vector<const LambdaSet*>(l));
    for (int j = 0; j < l; ++j)
      for (int j2 = 0; j2 < l; ++j2)
        kid_lambda[j][j2] =
            &compute(A.side, A.children[j], B.side, B.children[j2]);

    auto joint = wl2_stable_joint(A.graph, uniform_coloring(A.graph.n), B.graph,
                                  uniform_coloring(B.graph.n));
    if (!joint.compatible) return res;

    const VertexSet& bag_a = A.bag_local;  // == adhesion == anchors for these nodes
    const VertexSet& bag_b = B.bag_local;
    if (bag_a.size() != bag_b.size()) return res;
    const int m = static_cast<int>(bag_a.size());

    // The DP needs sigma[S] only, but a full bag bijection per matching test.
    std::vector<int> images;  // target locals parallel to bag_a
    std::vector<char> used(B.graph.n, 0);

    std::vector<int> s_positions;  // positions of S inside bag order
    for (std::size_t i = 0; i < bag_a.size(); ++i)
      if (set_contains(A.s_local, bag_a[i])) s_positions.push_back(static_cast<int>(i));

    std::function<void()> emit = [&]() {
      check_deadline();
      // sigma as original-id images parallel to the sorted child adhesion.
      std::vector<int> sigma_orig(m);
      for (int i = 0; i < m; ++i) sigma_orig[i] = B.orig_of[images[i]];
      std::vector<std::vector<char>> compat(l, std::vector<char>(l, 0));
      for (int j = 0; j < l; ++j)
        for (int j2 = 0; j2 < l; ++j2)
          compat[j][j2] = kid_lambda[j][j2]->contains_map(sigma_orig) ? 1 : 0;
      std::vector<int> match;
      if (!perfect_matching(compat, &match)) return;
      std::vector<int> sigma_s;
      for (int p : s_positions) sigma_s.push_back(sigma_orig[p]);
      if (forced_sigma) {
        if (sigma_s == *forced_sigma) {
          *sigma_full_out = sigma_orig;
          *rho_out = match;
          res.insert_map(sigma_s);
        }
      } else {
        res.insert_map(sigma_s);
      }
    };

    std::function<void(int)> rec = [&](int depth) {
      if (forced_sigma && !res.empty()) return;
      if (depth == m) {
        emit();
        return;
      }
      int v = bag_a[depth];
      for (int w : bag_b) {
        if (used[w]) continue;
        if (joint.c1(v, v) != joint.c2(w, w)) continue;
        if (forced_sigma) {
          // S positions must follow the forced restriction.
          auto it = std::find(s_positions.begin(), s_positions.end(), depth);
          if (it != s_positions.end()) {
            int s_idx = static_cast<int>(it - s_positions.begin());
            if (B.orig_of[w] != (*forced_sigma)[s_idx]) continue;
          }
        }
        used[w] = 1;
        images.push_back(w);
        rec(depth + 1);
        images.pop_back();
        used[w] = 0;
      }
    };
    rec(0);
    return res;
  }

  // ---- dispatch ----

  const LambdaSet& compute(int sa, int na, int sb, int nb) {
    std::array<int, 4> key{sa, na, sb, nb};
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::array<int, 4> rkey{sb, nb, sa, na};
    auto rit = memo.find(rkey);
    if (rit != memo.end()) {
      auto [nit, fresh] = memo.emplace(key, rit->second.inverted());
      return nit->second;
    }
    if (stats) ++stats->node_pairs;
    check_deadline();

    const Instance& A = instance(sa, na);
    const Instance& B = instance(sb, nb);
    LambdaSet res;
    res.source = dec[sa]->nodes[na].adhesion;
    res.target = dec[sb]->nodes[nb].adhesion;

    bool feasible = A.verts.size() == B.verts.size() &&
                    res.source.size() == res.target.size() &&
                    A.children.size() == B.children.size() &&
                    A.bag_local.size() == B.bag_local.size();
    if (feasible) {
      if (A.children.empty()) {
        res = option_a(A, B, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr);
      } else if (A.opt_b && B.opt_b) {
        res = option_b(A, B, nullptr, nullptr, nullptr);
      } else if (A.opt_a && B.opt_a) {
        res = option_a(A, B, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr);
      }
      // Mismatched options leave the set empty.
    }
    auto [nit, fresh] = memo.emplace(key, std::move(res));
    return nit->second;
  }

  // ---- witness assembly ----

  void merge_map(std::vector<int>& into, int v_orig, int img_orig) {
    if (into[v_orig] == -1) {
      into[v_orig] = img_orig;
    } else if (into[v_orig] != img_orig) {
      throw Error("internal: witness pieces disagree");
    }
  }

  void assemble(int sa, int na, int sb, int nb, const std::vector<int>& sigma_s,
                std::vector<int>& phi) {
    const Instance& A = instance(sa, na);
    const Instance& B = instance(sb, nb);
    const LambdaSet& lam = compute(sa, na, sb, nb);
    if (!lam.contains_map(sigma_s))
      throw Error("internal: requested restriction is not in the lambda set");

    if (!A.children.empty() && A.opt_b && B.opt_b) {
      std::vector<int> sigma_full, rho;
      option_b(A, B, &sigma_s, &sigma_full, &rho);
      if (sigma_full.empty()) throw Error("internal: option (b) witness vanished");
      const VertexSet& adh = dec[A.side]->nodes[A.children[0]].adhesion;  // == bag
      for (std::size_t i = 0; i < adh.size(); ++i) merge_map(phi, adh[i], sigma_full[i]);
      for (std::size_t j = 0; j < A.children.size(); ++j)
        assemble(sa, A.children[j], sb, B.children[rho[j]], sigma_full, phi);
      return;
    }

    // option (a) (including leaves)
    std::vector<int> images, psi;
    GadgetContext ctx;
    GadgetGraph ha, hb;
    option_a(A, B, &sigma_s, &images, &psi, &ctx, &ha, &hb);

    VertexSet a_sorted = sorted_set(ha.a_set);
    VertexSet b_sorted = sorted_set(hb.a_set);
    auto psi_local = [&](int va) {
      auto pos = std::lower_bound(a_sorted.begin(), a_sorted.end(), va) - a_sorted.begin();
      return b_sorted[psi[pos]];
    };

    for (int v : ha.bag_local) {
      int img_local = psi_local(v);
      if (hb.orig_of[img_local] < 0) throw Error("internal: bag mapped to a gadget vertex");
      merge_map(phi, ha.orig_of[v], hb.orig_of[img_local]);
    }

    // Children pair up through the identity gadget vertices.
    const int l = static_cast<int>(A.children.size());
    int base_a = A.graph.n;
    int base_b = B.graph.n;
    // Recover per-gadget (kid, map) bookkeeping in construction order.
    std::vector<std::pair<int, int>> ga_info, gb_info;
    for (int j = 0; j < l; ++j) {
      const LambdaSet& self = compute(sa, A.children[j], sa, A.children[j]);
      for (std::size_t mi = 0; mi < self.maps.size(); ++mi) ga_info.push_back({j, (int)mi});
    }
    for (int j = 0; j < l; ++j) {
      const LambdaSet& self = compute(sb, B.children[j], sb, B.children[j]);
      for (std::size_t mi = 0; mi < self.maps.size(); ++mi) gb_info.push_back({j, (int)mi});
    }

    for (int j = 0; j < l; ++j) {
      const LambdaSet& self = compute(sa, A.children[j], sa, A.children[j]);
      int id_index = -1;
      for (std::size_t mi = 0; mi < self.maps.size(); ++mi)
        if (self.maps[mi] == self.source) id_index = static_cast<int>(mi);
      if (id_index < 0) throw Error("internal: self lambda lacks the identity");
      int gv = -1;
      for (std::size_t gi = 0; gi < ga_info.size(); ++gi)
        if (ga_info[gi] == std::make_pair(j, id_index)) gv = base_a + static_cast<int>(gi);
      int img = psi_local(gv);
      if (img < base_b) throw Error("internal: gadget vertex mapped to a graph vertex");
      int j2 = gb_info[img - base_b].first;

      const VertexSet& adh = dec[sa]->nodes[A.children[j]].adhesion;
      std::vector<int> sigma_child;
      for (int u : adh) {
        int img_local = psi_local(A.local_of[u]);
        sigma_child.push_back(hb.orig_of[img_local]);
      }
      const LambdaSet& child_lam = compute(sa, A.children[j], sb, B.children[j2]);
      if (!child_lam.contains_map(sigma_child))
        throw Error("internal: extracted child restriction is not in its lambda set");
      assemble(sa, A.children[j], sb, B.children[j2], sigma_child, phi);
    }
  }
};

LambdaDp::LambdaDp(const ColoredGraph& g1, const Decomposition& d1, const ColoredGraph& g2,
                   const Decomposition& d2, IsoStats* stats, double timeout_seconds)
    : impl_(std::make_unique<Impl>()) {
  impl_->g[0] = &g1;
  impl_->g[1] = &g2;
  impl_->dec[0] = &d1;
  impl_->dec[1] = &d2;
  impl_->stats = stats;
  if (timeout_seconds > 0) {
    impl_->has_deadline = true;
    impl_->deadline = Clock::now() + std::chrono::milliseconds(
                                         static_cast<long long>(timeout_seconds * 1000));
  }
}

LambdaDp::~LambdaDp() = default;

const LambdaSet& LambdaDp::lambda(int side_a, int node_a, int side_b, int node_b) {
  return impl_->compute(side_a, node_a, side_b, node_b);
}

const LambdaSet& LambdaDp::root_lambda() {
  return impl_->compute(0, impl_->dec[0]->root, 1, impl_->dec[1]->root);
}

std::vector<int> LambdaDp::witness(const std::vector<int>& sigma_on_s1) {
  std::vector<int> phi(impl_->g[0]->n, -1);
  impl_->assemble(0, impl_->dec[0]->root, 1, impl_->dec[1]->root, sigma_on_s1, phi);
  for (int v = 0; v < impl_->g[0]->n; ++v)
    if (phi[v] < 0) throw Error("internal: witness does not cover every vertex");
  if (!is_colored_iso(*impl_->g[0], *impl_->g[1], phi))
    throw Error("internal: assembled witness failed verification");
  return phi;
}

std::pair<GadgetGraph, GadgetGraph> LambdaDp::build_gadget_pair(int side_a, int node_a,
                                                                int side_b, int node_b) {
  const auto& A = impl_->instance(side_a, node_a);
  const auto& B = impl_->instance(side_b, node_b);
  auto ctx = impl_->build_context(A, B);
  GadgetGraph ha = impl_->build_gadget(A, ctx, 0);
  GadgetGraph hb = impl_->build_gadget(B, ctx, static_cast<int>(A.children.size()));
  return {std::move(ha), std::move(hb)};
}

// ---- end-to-end driver ----

namespace {

VertexSet first_separating_free_triple(const ColoredGraph& g) {
  for (int a = 0; a < g.n; ++a)
    for (int b = a + 1; b < g.n; ++b)
      for (int c = b + 1; c < g.n; ++c) {
        VertexSet s{a, b, c};
        if (components_avoiding(g, s).size() == 1) return s;
      }
  throw PreconditionError("no 3-subset with connected complement exists");
}

}  // namespace

IsoResult isomorphic_k3h_free(const ColoredGraph& g1, const ColoredGraph& g2, int h,
                              double timeout_seconds) {
  if (h < 3) throw PreconditionError("h must be at least 3");
  if (!is_3_connected(g1) || !is_3_connected(g2))
    throw PreconditionError("inputs must be 3-connected");

  IsoResult res;
  res.h = h;

  if (g1.n != g2.n || g1.edge_count() != g2.edge_count()) {
    res.verdict = Verdict::NonIsomorphic;
    return res;
  }
  auto joint = wl2_stable_joint(g1, uniform_coloring(g1.n), g2, uniform_coloring(g2.n));
  if (!joint.compatible) {
    res.verdict = Verdict::NonIsomorphic;
    return res;
  }

  const auto start = Clock::now();
  auto remaining = [&]() -> double {
    if (timeout_seconds <= 0) return 0;
    double used = std::chrono::duration<double>(Clock::now() - start).count();
    double left = timeout_seconds - used;
    if (left <= 0) throw TimeoutError("isomorphism search timed out");
    return left;
  };

  VertexSet s1 = first_separating_free_triple(g1);

  Decomposition dec1;
  try {
    dec1 = decompose(g1, s1, h);
  } catch (const MinorEvidenceError& e) {
    res.verdict = Verdict::MinorEvidence;
    res.minor_detail = e.what();
    return res;
  }

  // Color profile of S1 for pruning S2 candidates.
  std::vector<int> s1_profile;
  for (int v : s1) s1_profile.push_back(joint.c1(v, v));
  std::sort(s1_profile.begin(), s1_profile.end());

  for (int a = 0; a < g2.n; ++a)
    for (int b = a + 1; b < g2.n; ++b)
      for (int c = b + 1; c < g2.n; ++c) {
        if (timeout_seconds > 0) remaining();
        std::vector<int> profile{joint.c2(a, a), joint.c2(b, b), joint.c2(c, c)};
        std::sort(profile.begin(), profile.end());
        if (profile != s1_profile) continue;
        VertexSet s2{a, b, c};
        if (components_avoiding(g2, s2).size() != 1) continue;
        ++res.stats.s2_candidates;

        Decomposition dec2;
        try {
          dec2 = decompose(g2, s2, h);
        } catch (const MinorEvidenceError& e) {
          res.verdict = Verdict::MinorEvidence;
          res.minor_detail = e.what();
          return res;
        }

        LambdaDp dp(g1, dec1, g2, dec2, &res.stats,
                    timeout_seconds > 0 ? remaining() : 0);
        const LambdaSet& lam = dp.root_lambda();
        if (!lam.empty()) {
          res.witness = dp.witness(lam.maps.front());
          res.verdict = Verdict::Isomorphic;
          return res;
        }
      }

  res.verdict = Verdict::NonIsomorphic;
  return res;
}

IsoResult isomorphic_genus(const ColoredGraph& g1, const ColoredGraph& g2, int genus,
                           double timeout_seconds) {
  if (genus < 0) throw PreconditionError("genus must be non-negative");
  return isomorphic_k3h_free(g1, g2, 4 * genus + 3, timeout_seconds);
}

}  // namespace k3h
