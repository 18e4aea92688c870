#pragma once

#include <cstdint>
#include <vector>

#include "k3hiso/graph.hpp"

namespace k3h {

// Canonical vertex coloring: color ids form the contiguous range
// 0..(classes-1), assigned by lexicographically sorting id-free class
// signatures. Equal (labeled) inputs give equal ids; isomorphic inputs give
// equal ids per corresponding class.
struct VertexColoring {
  std::vector<int> color;
  int classes = 0;

  int operator()(Vertex v) const { return color[v]; }
  std::vector<VertexSet> class_sets() const;
  bool discrete() const { return classes == static_cast<int>(color.size()); }
};

// Canonical coloring of ordered vertex pairs, stored as a flat n*n table.
struct PairColoring {
  int n = 0;
  std::vector<int> color;  // index u*n+v
  int classes = 0;

  int operator()(Vertex u, Vertex v) const { return color[static_cast<std::size_t>(u) * n + v]; }
  VertexColoring diagonal() const;  // canonical re-indexing of diagonal colors
  bool is_diagonal_color(int c) const;
  std::vector<int> class_sizes() const;
};

// Assigns canonical dense ids to rows of integer tuples (sorted
// lexicographically). Rows from several structures may be pooled so equal
// tuples share an id across them.
std::vector<int> canonical_ids(const std::vector<std::vector<int>>& tuples, int* classes_out);

// Combines per-vertex tuples into a canonical VertexColoring over one or two
// graphs jointly (pass empty second vector for single-graph use).
std::pair<VertexColoring, VertexColoring> combine_vertex_colors(
    const std::vector<std::vector<int>>& tuples1,
    const std::vector<std::vector<int>>& tuples2);

// 1-WL: coarsest stable coloring refining both seed and the graph's vertex
// colors; neighbor multisets carry arc colors in both directions.
VertexColoring wl1_stable(const ColoredGraph& g, const VertexColoring& seed);
VertexColoring wl1_uniform_seed(const ColoredGraph& g);

// Joint 1-WL over two graphs with shared canonical ids. compatible=false means
// some class has different sizes in the two graphs (so no color-preserving
// bijection exists).
struct JointVertexColoring {
  VertexColoring c1, c2;
  bool compatible = true;
};
JointVertexColoring wl1_stable_joint(const ColoredGraph& g1, const VertexColoring& seed1,
                                     const ColoredGraph& g2, const VertexColoring& seed2);

// 2-WL: the 2-stable pair coloring. Initial pair colors encode equality
// pattern, adjacency, seed colors of both ends and arc colors in both
// directions; refinement uses multisets over all w of (color(w,v), color(u,w)).
PairColoring wl2_stable(const ColoredGraph& g, const VertexColoring& seed);
PairColoring wl2_uniform_seed(const ColoredGraph& g);

struct JointPairColoring {
  PairColoring c1, c2;
  bool compatible = true;
};
JointPairColoring wl2_stable_joint(const ColoredGraph& g1, const VertexColoring& seed1,
                                   const ColoredGraph& g2, const VertexColoring& seed2);

// One refinement round of 2-WL on an arbitrary pair coloring (fixpoint checks).
PairColoring wl2_round(const ColoredGraph& g, const PairColoring& chi);

// True iff c1(x)=c1(y) implies c2(x)=c2(y) (c1 refines c2). Domain sizes must
// match.
bool refines(const std::vector<int>& c1, const std::vector<int>& c2);

// Contracts the connected components of the union of the given off-diagonal
// color classes; untouched vertices become singleton blocks. Returns the
// quotient graph (uniform colors) and the vertex -> block map; blocks are
// ordered by minimum vertex.
std::pair<ColoredGraph, std::vector<int>> quotient_by_colors(
    const ColoredGraph& g, const PairColoring& chi, const std::vector<int>& C);

VertexColoring uniform_coloring(int n);
VertexColoring coloring_from_values(const std::vector<int>& values);

// Seed with vertices of X individualized (distinct fresh colors layered over
// base); base may be empty for the graph's own colors.
VertexColoring individualized_seed(const ColoredGraph& g, const VertexSet& X,
                                   const std::vector<int>& base = {});

bool same_partition(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace k3h
