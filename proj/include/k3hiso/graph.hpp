#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace k3h {

using Vertex = int;
// Sorted, strictly increasing list of vertex ids.
using VertexSet = std::vector<Vertex>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormatError : Error {
  std::size_t byte_offset;
  FormatError(const std::string& msg, std::size_t offset)
      : Error(msg + " (byte " + std::to_string(offset) + ")"), byte_offset(offset) {}
};

struct DomainError : Error {
  using Error::Error;
};

struct PreconditionError : Error {
  using Error::Error;
};

struct InstanceTooLarge : Error {
  using Error::Error;
};

struct TimeoutError : Error {
  using Error::Error;
};

// Arc color reserved for edges introduced by clique_on; input arc colors must
// stay below this value.
inline constexpr int kCliqueArcColor = 1 << 28;
// Sentinel for "no arc" in pair signatures; never a valid arc color.
inline constexpr int kNoArc = -1;

// Simple undirected graph with vertex colors and ordered-pair arc colors.
// Arc colors exist exactly for ordered pairs (u,v) with {u,v} an edge; the two
// directions may carry different colors. Immutable by convention once built.
struct ColoredGraph {
  int n = 0;
  std::vector<std::vector<Vertex>> adj;  // sorted neighbor lists
  std::vector<int> vertex_colors;
  std::unordered_map<std::uint64_t, int> arc_colors;

  ColoredGraph() = default;
  explicit ColoredGraph(int n_)
      : n(n_), adj(n_), vertex_colors(n_, 0) {}

  static std::uint64_t pair_key(Vertex u, Vertex v) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
           static_cast<std::uint32_t>(v);
  }

  void check_vertex(Vertex v) const {
    if (v < 0 || v >= n) throw DomainError("vertex id out of range: " + std::to_string(v));
  }

  bool has_edge(Vertex u, Vertex v) const;
  // Adds the undirected edge {u,v} with per-direction arc colors.
  void add_edge(Vertex u, Vertex v, int color_uv = 0, int color_vu = 0);
  void set_arc_color(Vertex u, Vertex v, int color);
  int arc_color(Vertex u, Vertex v) const;  // kNoArc if not an edge

  std::size_t edge_count() const;
  std::vector<std::pair<Vertex, Vertex>> edges() const;  // u < v, sorted
  int degree(Vertex v) const { return static_cast<int>(adj[v].size()); }
  int max_arc_color() const;
};

// --- file formats ---------------------------------------------------------

// Standard graph6 (uncolored; result carries uniform colors 0).
ColoredGraph parse_graph6(const std::string& text);
std::string to_graph6(const ColoredGraph& g);

// DIMACS edge format: "p edge n m" + "e u v" lines, 1-indexed.
ColoredGraph parse_dimacs(const std::string& text);

// Color sidecar: {"vertex_colors":[int;n], "arc_colors":[[u,v,c],...]}.
// Arc entries color the directed pair (u,v); the pair must be an edge.
void apply_color_sidecar(ColoredGraph& g, const std::string& json_text);

// Reads graph6 or DIMACS depending on content, with optional sidecar.
ColoredGraph read_graph_file(const std::string& path,
                             const std::string& sidecar_path = "");

// --- basic operations ------------------------------------------------------

// Connected components of G - D, each sorted, ordered by minimum vertex.
std::vector<VertexSet> components_avoiding(const ColoredGraph& g, const VertexSet& D);

// N_G(Z) = N_G[Z] \ Z.
VertexSet open_neighborhood(const ColoredGraph& g, const VertexSet& Z);

bool is_connected(const ColoredGraph& g);

// True iff n >= 4, G connected, and no vertex set of size <= 2 disconnects G.
bool is_3_connected(const ColoredGraph& g);

// Adds all missing edges inside S; new edges get the reserved clique arc color.
ColoredGraph clique_on(const ColoredGraph& g, const VertexSet& S);

// Induced subgraph on the sorted vertex list; returns the graph on local ids
// 0..|verts|-1 together with verts as the local->original map.
ColoredGraph induced_subgraph(const ColoredGraph& g, const VertexSet& verts);

// --- minors (test support) -------------------------------------------------

struct MinorWitness {
  std::array<VertexSet, 3> left;  // disjoint connected branch sets
  VertexSet right;                // h vertices, each adjacent to all three
  int h = 0;
};

// Exhaustive K_{3,h}-minor search; intended for n <= size_cap.
std::optional<MinorWitness> contains_k3h_minor(const ColoredGraph& g, int h,
                                               int size_cap = 20);

bool verify_minor_witness(const ColoredGraph& g, const MinorWitness& w);

// --- small helpers ---------------------------------------------------------

bool is_sorted_vertex_set(const VertexSet& s);
VertexSet sorted_set(VertexSet s);
bool set_contains(const VertexSet& s, Vertex v);
VertexSet set_union(const VertexSet& a, const VertexSet& b);
VertexSet set_difference(const VertexSet& a, const VertexSet& b);
VertexSet set_intersection(const VertexSet& a, const VertexSet& b);
VertexSet full_vertex_set(int n);

}  // namespace k3h
