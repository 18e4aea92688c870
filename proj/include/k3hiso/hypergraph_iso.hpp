#pragma once

#include "k3hiso/perm_group.hpp"
#include "k3hiso/search.hpp"

namespace k3h {

struct Hypergraph {
  int n = 0;
  std::vector<VertexSet> edges;  // each sorted; distinct as sets per color
  std::vector<int> edge_colors;  // parallel to edges; empty means all 0

  int edge_color(std::size_t i) const {
    return edge_colors.empty() ? 0 : edge_colors[i];
  }
};

// Exactly {phi in Gamma.theta : E in E1 <=> E^phi in E2 (with equal colors)},
// as (Aut within Gamma, representative) or Empty.
IsoCoset iso_coset_hypergraph(const Hypergraph& h1, const Hypergraph& h2,
                              const PermGroup& gamma, const std::vector<int>& theta,
                              SearchStats* stats = nullptr);

// Same for vertex- and arc-colored graphs.
IsoCoset iso_coset_colored_graph(const ColoredGraph& g1, const ColoredGraph& g2,
                                 const PermGroup& gamma, const std::vector<int>& theta,
                                 SearchStats* stats = nullptr);

}  // namespace k3h
