#pragma once

#include <string>

#include "k3hiso/tk_wl.hpp"

namespace k3h {

// Structured certificate that a guarantee implied by K_{3,h}-minor-freeness
// failed; licenses the minor conclusion without constructing a witness.
struct MinorEvidenceError : Error {
  enum class Reason { NoSmallClass, SeparatorTooLarge };
  Reason reason;
  VertexSet offending;
  int h;

  MinorEvidenceError(Reason r, VertexSet off, int h_)
      : Error(r == Reason::NoSmallClass
                  ? "no qualifying small color class (K_{3,h} minor present)"
                  : "component neighborhood of size >= h (K_{3,h} minor present)"),
        reason(r),
        offending(std::move(off)),
        h(h_) {}
};

struct DecompositionNode {
  int parent = -1;
  std::vector<int> children;
  VertexSet bag;       // beta(t)
  VertexSet anchors;   // gamma(t)
  VertexSet adhesion;  // bag ∩ parent bag; at the root: the input S
  int depth = 0;
  bool regroup_node = false;  // fresh node introduced by the sibling regrouping
};

struct Decomposition {
  std::vector<DecompositionNode> nodes;  // node 0 is the root
  int root = 0;
  std::vector<VertexSet> lambda;  // vertex -> sorted list of depths of its bags
  int h = 0;

  VertexSet subtree_vertices(int node) const;
};

// The class of the minimal color that avoids the colors of S and has size
// <= h-1, under 1-WL with S marked and v1,v2,v3 individualized. Throws
// MinorEvidenceError when no color qualifies.
VertexSet small_class_pick(const ColoredGraph& g, const VertexSet& S, Vertex v1, Vertex v2,
                           Vertex v3, int h);

// S together with the picked classes of every ordered triple from S.
VertexSet gamma_root(const ColoredGraph& g, const VertexSet& S, int h);

// The anchored tree decomposition: root bag = (2,2)-closure of gamma_root,
// children from components, clique-augmented recursion, sibling regrouping,
// and the depth-set coloring lambda computed on the finished tree.
Decomposition decompose(const ColoredGraph& g, const VertexSet& S, int h);

struct DecompositionReport {
  bool td_valid = false;        // T.1/T.2
  bool node_count_ok = false;   // I
  bool adhesion_ok = false;     // II
  bool options_ok = false;      // III
  bool root_anchor_ok = false;  // IV
  bool anchor_size_ok = false;  // V
  bool anchor_between_ok = false;  // VI
  bool closure_ok = false;      // VII
  int failing_node = -1;
  std::string detail;

  bool all_ok() const {
    return td_valid && node_count_ok && adhesion_ok && options_ok && root_anchor_ok &&
           anchor_size_ok && anchor_between_ok && closure_ok;
  }
};

DecompositionReport verify_decomposition(const ColoredGraph& g, const Decomposition& d,
                                         const VertexSet& S, int h);

// D = cl_{2,2}(X); true iff every component Z of G - D has |N(Z)| < h.
bool verify_separator_bound(const ColoredGraph& g, const VertexSet& X, int h);

// Seed coloring that layers the lambda depth sets over the graph's own colors.
VertexColoring lambda_seed(const ColoredGraph& g, const std::vector<VertexSet>& lambda);

}  // namespace k3h
