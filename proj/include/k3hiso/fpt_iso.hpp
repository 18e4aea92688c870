#pragma once

#include <map>
#include <memory>
#include <optional>

#include "k3hiso/decomposition.hpp"
#include "k3hiso/hypergraph_iso.hpp"

namespace k3h {

// Explicit set of bijections between two adhesion sets (original vertex ids).
struct LambdaSet {
  VertexSet source;  // sorted
  VertexSet target;  // sorted
  std::vector<std::vector<int>> maps;  // maps[i][j] = image of source[j]; sorted unique

  bool empty() const { return maps.empty(); }
  bool contains_map(const std::vector<int>& m) const;
  void insert_map(std::vector<int> m);
  LambdaSet inverted() const;
};

// Bag graph extended with one vertex per (child adhesion set, child
// automorphism restriction), child isomorphism types encoded by arc colors.
struct GadgetGraph {
  ColoredGraph h;                // local ids; gadget vertices come last
  std::vector<int> orig_of;     // local -> original id; -1 for gadget vertices
  VertexSet a_set;              // local ids of A = bag + gadget vertices
  VertexSet bag_local, gamma_local, s_local;
  int num_gadget_vertices = 0;
};

enum class Verdict { Isomorphic, NonIsomorphic, MinorEvidence };

struct IsoStats {
  std::uint64_t node_pairs = 0;
  std::uint64_t tau_candidates = 0;
  std::uint64_t coset_calls = 0;
  std::uint64_t s2_candidates = 0;
};

struct IsoResult {
  Verdict verdict = Verdict::NonIsomorphic;
  std::optional<std::vector<int>> witness;  // g1 vertex -> g2 vertex
  int h = 0;
  IsoStats stats;
  std::string minor_detail;
};

// Dynamic program over a pair of decompositions; memoised over ordered node
// pairs across both sides (self pairs feed the gadget construction).
class LambdaDp {
 public:
  LambdaDp(const ColoredGraph& g1, const Decomposition& d1, const ColoredGraph& g2,
           const Decomposition& d2, IsoStats* stats = nullptr, double timeout_seconds = 0);
  ~LambdaDp();

  // side values: 0 = first graph, 1 = second graph.
  const LambdaSet& lambda(int side_a, int node_a, int side_b, int node_b);
  // Root-pair entries (source S1, target S2).
  const LambdaSet& root_lambda();
  // Full isomorphism with the given restriction to S1 (must be in the root
  // lambda set); verified against both graphs before returning.
  std::vector<int> witness(const std::vector<int>& sigma_on_s1);

  // Exposed for tests: the paired auxiliary graphs of an option-(a) node pair.
  std::pair<GadgetGraph, GadgetGraph> build_gadget_pair(int side_a, int node_a, int side_b,
                                                        int node_b);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// The end-to-end decision procedure: fixes S1, sweeps color-compatible S2
// candidates, decomposes and runs the DP; a verified witness or exhaustion.
IsoResult isomorphic_k3h_free(const ColoredGraph& g1, const ColoredGraph& g2, int h,
                              double timeout_seconds = 0);

// Genus wrapper: h = 4g + 3.
IsoResult isomorphic_genus(const ColoredGraph& g1, const ColoredGraph& g2, int genus,
                           double timeout_seconds = 0);

}  // namespace k3h
