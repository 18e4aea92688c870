#pragma once

#include "k3hiso/graph.hpp"
#include "k3hiso/perm_group.hpp"
#include "k3hiso/search.hpp"
#include "k3hiso/wl.hpp"

namespace k3h {

enum class TkStepKind { Refine, Split };

struct TkStep {
  TkStepKind kind;
  VertexColoring coloring;         // vertex-level snapshot after the step
  std::vector<int> classes_split;  // split steps: ids of classes of size 2..t
};

// Alternating k-WL / small-class-splitting sequence. Steps are recorded when
// they change the partition; the sequence ends at the first full fixpoint
// (neither step refines).
struct TkTrace {
  VertexColoring initial;
  std::vector<TkStep> steps;
  const VertexColoring& final_coloring() const {
    return steps.empty() ? initial : steps.back().coloring;
  }
};

std::pair<VertexColoring, TkTrace> tk_stable(const ColoredGraph& g, int t, int k);
std::pair<VertexColoring, TkTrace> tk_stable_seeded(const ColoredGraph& g,
                                                    const VertexColoring& seed, int t, int k);

// Vertices in singleton classes after individualizing X and running the (t,k)
// process. X is contained in the result.
VertexSet closure(const ColoredGraph& g, const VertexSet& X, int t, int k);
VertexSet closure_seeded(const ColoredGraph& g, const VertexColoring& base, const VertexSet& X,
                         int t, int k);

bool is_tk_bounded(const ColoredGraph& g, int t, int k);
bool is_tk_bounded_seeded(const ColoredGraph& g, const VertexColoring& seed, int t, int k);

// Layered reduction graph: one layer per recorded step of the pair-level
// trace; refinement layers carry one auxiliary vertex per distinct tuple, with
// multiplicity-colored edges. The final layer's class vertices map onto the
// class partition of the (t,k)-stable coloring.
struct LayerGraph {
  ColoredGraph h;
  std::vector<int> final_layer_vertex;  // parallel to classes
  std::vector<VertexSet> classes;       // partition P of V(G)
  int layers = 0;
};

LayerGraph build_layer_graph(const ColoredGraph& g, int t, int k);
LayerGraph build_layer_graph_seeded(const ColoredGraph& g, const VertexColoring& seed, int t,
                                    int k);

// Exactly Iso(G1,G2) for (t,1)-WL-bounded colored graphs (checked).
IsoCoset iso_t1_bounded(const ColoredGraph& g1, const ColoredGraph& g2, int t,
                        SearchStats* stats = nullptr);

struct BoundingCoset {
  std::vector<VertexSet> p1, p2;  // (t,k)-stable class partitions
  IsoCoset coset;                 // on indices of p1; Empty certifies G1 !~ G2
};

// Builds both layer graphs, solves their isomorphism exactly, and restricts to
// the final-layer class vertices: Iso(G1,G2)[P1] is contained in the result.
BoundingCoset bounding_coset_on_classes(const ColoredGraph& g1, const ColoredGraph& g2, int t,
                                        int k, SearchStats* stats = nullptr);
BoundingCoset bounding_coset_on_classes_seeded(const ColoredGraph& g1, const VertexColoring& s1,
                                               const ColoredGraph& g2, const VertexColoring& s2,
                                               int t, int k, SearchStats* stats = nullptr);

// Exactly Iso(G1,G2) for (t,k)-WL-bounded graphs (checked): the bounding coset
// on singleton classes finished by the exact coset search.
IsoCoset iso_tk_bounded(const ColoredGraph& g1, const ColoredGraph& g2, int t, int k,
                        SearchStats* stats = nullptr);

}  // namespace k3h
