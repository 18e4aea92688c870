#pragma once

#include <cstdint>
#include <functional>

#include "k3hiso/graph.hpp"
#include "k3hiso/perm_group.hpp"
#include "k3hiso/wl.hpp"

namespace k3h {

// --- coset-constrained backtracking -----------------------------------------
//
// Searches {phi in Gamma.theta : phi respects a structure}, where phi(x) =
// theta[gamma(x)]. The group must be built with a constraint-ordered
// prescribed base (every domain point; redundant levels are fine). Exactness:
// the result is the full automorphism subgroup within Gamma together with one
// representative, or Empty.

struct CosetCallbacks {
  // Consistency of the partial map after pinning base point src.back() ->
  // img.back(); src/img are parallel pinned lists (source and target points).
  std::function<bool(const std::vector<int>& src, const std::vector<int>& img)> extend_ok;
  // Final full check of a candidate map.
  std::function<bool(const std::vector<int>& phi)> full_ok;
};

struct SearchStats {
  std::uint64_t nodes = 0;
  std::uint64_t leaves = 0;
};

// cross: constraints of source-vs-target; self: source-vs-source (used for the
// automorphism group). theta must be a bijection on the common domain size.
IsoCoset coset_constrained_iso(const PermGroup& gamma, const std::vector<int>& theta,
                               const CosetCallbacks& cross, const CosetCallbacks& self,
                               SearchStats* stats = nullptr);

// --- individualization-refinement search --------------------------------------
//
// Backtracking over 1-WL-stable class-respecting assignments; exhaustive and
// exact. Targets are chosen canonically (smallest class, then smallest color),
// so branching is bounded by t on (t,1)-WL-bounded inputs.

struct RefinementOptions {
  bool need_group = false;       // also compute Aut(g1)
  int class_cap = -1;            // diagnostics: flag if a target class exceeds this
  std::uint64_t node_limit = 50'000'000;
};

struct RefinementResult {
  bool found = false;
  std::vector<int> iso;  // V(g1) -> V(g2) when found
  PermGroup aut;         // Aut(g1, seed1 colors) when need_group
  bool class_cap_exceeded = false;
  SearchStats stats;
};

RefinementResult refinement_iso_search(const ColoredGraph& g1, const VertexColoring& seed1,
                                       const ColoredGraph& g2, const VertexColoring& seed2,
                                       const RefinementOptions& opt = {});

// True iff phi maps g1 onto g2 preserving edges, vertex colors (seeds folded
// in by the caller via graph colors) and arc colors.
bool is_colored_iso(const ColoredGraph& g1, const ColoredGraph& g2, const std::vector<int>& phi);

}  // namespace k3h
