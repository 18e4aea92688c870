#include "k3hiso/graph.hpp"

#include <algorithm>
#include <bitset>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>

#include "json.hpp"

namespace k3h {

bool ColoredGraph::has_edge(Vertex u, Vertex v) const {
  if (u == v) return false;
  const auto& a = adj[u];
  return std::binary_search(a.begin(), a.end(), v);
}

void ColoredGraph::add_edge(Vertex u, Vertex v, int color_uv, int color_vu) {
  check_vertex(u);
  check_vertex(v);
  if (u == v) throw DomainError("loops are not allowed");
  if (has_edge(u, v)) throw DomainError("multi-edges are not allowed");
  adj[u].insert(std::upper_bound(adj[u].begin(), adj[u].end(), v), v);
  adj[v].insert(std::upper_bound(adj[v].begin(), adj[v].end(), u), u);
  arc_colors[pair_key(u, v)] = color_uv;
  arc_colors[pair_key(v, u)] = color_vu;
}

void ColoredGraph::set_arc_color(Vertex u, Vertex v, int color) {
  if (!has_edge(u, v)) throw DomainError("set_arc_color on a non-edge");
  arc_colors[pair_key(u, v)] = color;
}

int ColoredGraph::arc_color(Vertex u, Vertex v) const {
  auto it = arc_colors.find(pair_key(u, v));
  return it == arc_colors.end() ? kNoArc : it->second;
}

std::size_t ColoredGraph::edge_count() const {
  std::size_t deg_sum = 0;
  for (const auto& a : adj) deg_sum += a.size();
  return deg_sum / 2;
}

std::vector<std::pair<Vertex, Vertex>> ColoredGraph::edges() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  out.reserve(edge_count());
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v : adj[u])
      if (u < v) out.emplace_back(u, v);
  return out;
}

int ColoredGraph::max_arc_color() const {
  int m = 0;
  for (const auto& [k, c] : arc_colors) m = std::max(m, c);
  return m;
}

// --- graph6 -----------------------------------------------------------------

namespace {

std::string strip_line(const std::string& text) {
  std::string s = text;
  if (s.rfind(">>graph6<<", 0) == 0) s = s.substr(10);
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' '))
    s.pop_back();
  return s;
}

}  // namespace

ColoredGraph parse_graph6(const std::string& text) {
  std::string s = strip_line(text);
  if (s.empty()) throw FormatError("empty graph6 input", 0);

  for (std::size_t i = 0; i < s.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c < 63 || c > 126) throw FormatError("graph6 character out of range", i);
  }

  std::size_t pos = 0;
  long long n = 0;
  if (s[0] != '~') {
    n = s[0] - 63;
    pos = 1;
  } else {
    if (s.size() >= 2 && s[1] == '~')
      throw InstanceTooLarge("graph6 vertex counts above 258047 are not supported");
    if (s.size() < 4) throw FormatError("truncated graph6 size header", s.size());
    n = 0;
    for (std::size_t i = 1; i <= 3; ++i) n = (n << 6) | (s[i] - 63);
    pos = 4;
  }
  if (n < 0) throw FormatError("negative graph6 size", 0);

  const long long nbits = n * (n - 1) / 2;
  const std::size_t nchars = static_cast<std::size_t>((nbits + 5) / 6);
  if (s.size() - pos < nchars) throw FormatError("truncated graph6 body", s.size());
  if (s.size() - pos > nchars) throw FormatError("trailing data after graph6 body", pos + nchars);

  ColoredGraph g(static_cast<int>(n));
  long long bit = 0;
  for (Vertex v = 1; v < n; ++v) {
    for (Vertex u = 0; u < v; ++u, ++bit) {
      const std::size_t ci = pos + static_cast<std::size_t>(bit / 6);
      const int shift = 5 - static_cast<int>(bit % 6);
      if ((s[ci] - 63) & (1 << shift)) g.add_edge(u, v);
    }
  }
  // Padding bits must be zero.
  const long long padded = static_cast<long long>(nchars) * 6;
  for (long long b = nbits; b < padded; ++b) {
    const std::size_t ci = pos + static_cast<std::size_t>(b / 6);
    const int shift = 5 - static_cast<int>(b % 6);
    if ((s[ci] - 63) & (1 << shift))
      throw FormatError("nonzero trailing bits in graph6 body", ci);
  }
  return g;
}

std::string to_graph6(const ColoredGraph& g) {
  std::string out;
  if (g.n <= 62) {
    out.push_back(static_cast<char>(63 + g.n));
  } else if (g.n <= 258047) {
    out.push_back('~');
    out.push_back(static_cast<char>(63 + ((g.n >> 12) & 63)));
    out.push_back(static_cast<char>(63 + ((g.n >> 6) & 63)));
    out.push_back(static_cast<char>(63 + (g.n & 63)));
  } else {
    throw InstanceTooLarge("graph too large for the supported graph6 range");
  }
  long long bit = 0;
  int cur = 0;
  for (Vertex v = 1; v < g.n; ++v) {
    for (Vertex u = 0; u < v; ++u, ++bit) {
      if (g.has_edge(u, v)) cur |= 1 << (5 - (bit % 6));
      if (bit % 6 == 5) {
        out.push_back(static_cast<char>(63 + cur));
        cur = 0;
      }
    }
  }
  if (bit % 6 != 0) out.push_back(static_cast<char>(63 + cur));
  return out;
}

ColoredGraph parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int n = -1;
  long long m = -1, seen = 0;
  ColoredGraph g;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ls(line);
    char tag;
    ls >> tag;
    if (tag == 'p') {
      std::string fmt;
      ls >> fmt >> n >> m;
      if (!ls || fmt != "edge" || n < 0 || m < 0)
        throw FormatError("bad DIMACS problem line", lineno);
      g = ColoredGraph(n);
    } else if (tag == 'e') {
      if (n < 0) throw FormatError("DIMACS edge before problem line", lineno);
      int u, v;
      ls >> u >> v;
      if (!ls || u < 1 || v < 1 || u > n || v > n)
        throw FormatError("bad DIMACS edge line", lineno);
      g.add_edge(u - 1, v - 1);
      ++seen;
    } else {
      throw FormatError("unknown DIMACS line tag", lineno);
    }
  }
  if (n < 0) throw FormatError("missing DIMACS problem line", 0);
  if (seen != m) throw FormatError("DIMACS edge count mismatch", lineno);
  return g;
}

void apply_color_sidecar(ColoredGraph& g, const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  if (j.contains("vertex_colors")) {
    const auto& vc = j["vertex_colors"];
    if (!vc.is_array() || static_cast<int>(vc.size()) != g.n)
      throw FormatError("vertex_colors must list one color per vertex", 0);
    for (int i = 0; i < g.n; ++i) {
      int c = vc[i].get<int>();
      if (c < 0 || c >= kCliqueArcColor) throw DomainError("vertex color out of range");
      g.vertex_colors[i] = c;
    }
  }
  if (j.contains("arc_colors")) {
    for (const auto& e : j["arc_colors"]) {
      if (!e.is_array() || e.size() != 3) throw FormatError("arc_colors entries must be [u,v,c]", 0);
      int u = e[0].get<int>(), v = e[1].get<int>(), c = e[2].get<int>();
      g.check_vertex(u);
      g.check_vertex(v);
      if (!g.has_edge(u, v)) throw DomainError("arc color on a non-edge");
      if (c < 0 || c >= kCliqueArcColor) throw DomainError("arc color out of range");
      g.set_arc_color(u, v, c);
    }
  }
}

ColoredGraph read_graph_file(const std::string& path, const std::string& sidecar_path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();

  ColoredGraph g;
  bool dimacs = false;
  for (char c : text) {
    if (c == ' ' || c == '\n' || c == '\r' || c == '\t') continue;
    dimacs = (c == 'p' || c == 'c');
    break;
  }
  g = dimacs ? parse_dimacs(text) : parse_graph6(text);

  if (!sidecar_path.empty()) {
    std::ifstream sc(sidecar_path);
    if (!sc) throw Error("cannot open color sidecar: " + sidecar_path);
    std::stringstream sbuf;
    sbuf << sc.rdbuf();
    apply_color_sidecar(g, sbuf.str());
  }
  return g;
}

// --- basic operations --------------------------------------------------------

std::vector<VertexSet> components_avoiding(const ColoredGraph& g, const VertexSet& D) {
  std::vector<char> blocked(g.n, 0);
  for (Vertex v : D) {
    g.check_vertex(v);
    blocked[v] = 1;
  }
  std::vector<char> seen(g.n, 0);
  std::vector<VertexSet> comps;
  for (Vertex s = 0; s < g.n; ++s) {
    if (blocked[s] || seen[s]) continue;
    VertexSet comp;
    std::queue<Vertex> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      Vertex u = q.front();
      q.pop();
      comp.push_back(u);
      for (Vertex w : g.adj[u])
        if (!blocked[w] && !seen[w]) {
          seen[w] = 1;
          q.push(w);
        }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  // BFS from increasing seeds already yields min-vertex order.
  return comps;
}

VertexSet open_neighborhood(const ColoredGraph& g, const VertexSet& Z) {
  std::vector<char> in_z(g.n, 0);
  for (Vertex v : Z) {
    g.check_vertex(v);
    in_z[v] = 1;
  }
  std::vector<char> hit(g.n, 0);
  for (Vertex v : Z)
    for (Vertex w : g.adj[v])
      if (!in_z[w]) hit[w] = 1;
  VertexSet out;
  for (Vertex v = 0; v < g.n; ++v)
    if (hit[v]) out.push_back(v);
  return out;
}

bool is_connected(const ColoredGraph& g) {
  if (g.n == 0) return true;
  return components_avoiding(g, {}).size() == 1;
}

bool is_3_connected(const ColoredGraph& g) {
  if (g.n < 4) return false;
  if (!is_connected(g)) return false;
  for (Vertex a = 0; a < g.n; ++a) {
    if (components_avoiding(g, {a}).size() != 1) return false;
    for (Vertex b = a + 1; b < g.n; ++b)
      if (components_avoiding(g, {a, b}).size() != 1) return false;
  }
  return true;
}

ColoredGraph clique_on(const ColoredGraph& g, const VertexSet& S) {
  ColoredGraph out = g;
  for (std::size_t i = 0; i < S.size(); ++i) {
    out.check_vertex(S[i]);
    for (std::size_t j = i + 1; j < S.size(); ++j)
      if (!out.has_edge(S[i], S[j]))
        out.add_edge(S[i], S[j], kCliqueArcColor, kCliqueArcColor);
  }
  return out;
}

ColoredGraph induced_subgraph(const ColoredGraph& g, const VertexSet& verts) {
  std::vector<int> local(g.n, -1);
  for (std::size_t i = 0; i < verts.size(); ++i) {
    g.check_vertex(verts[i]);
    local[verts[i]] = static_cast<int>(i);
  }
  ColoredGraph out(static_cast<int>(verts.size()));
  for (std::size_t i = 0; i < verts.size(); ++i) {
    out.vertex_colors[i] = g.vertex_colors[verts[i]];
    for (Vertex w : g.adj[verts[i]]) {
      if (local[w] < 0) continue;
      Vertex u = static_cast<Vertex>(i), v = local[w];
      if (u < v) out.add_edge(u, v, g.arc_color(verts[i], w), g.arc_color(w, verts[i]));
    }
  }
  return out;
}

// --- minors -------------------------------------------------------------------

namespace {

using Mask = std::uint32_t;

bool mask_connected(const ColoredGraph& g, Mask mask) {
  if (mask == 0) return false;
  Mask start = mask & (~mask + 1);
  Mask seen = start;
  Mask frontier = start;
  while (frontier) {
    Mask next = 0;
    for (int v = 0; v < g.n; ++v) {
      if (!(frontier & (Mask{1} << v))) continue;
      for (Vertex w : g.adj[v]) next |= Mask{1} << w;
    }
    next &= mask & ~seen;
    seen |= next;
    frontier = next;
  }
  return seen == mask;
}

struct MinorSearch {
  const ColoredGraph& g;
  int h;
  std::vector<Mask> nbr;  // neighborhood bitmasks
  std::optional<MinorWitness> found;
  std::unordered_map<std::uint64_t, char> visited;

  explicit MinorSearch(const ColoredGraph& g_, int h_) : g(g_), h(h_) {
    nbr.resize(g.n, 0);
    for (int v = 0; v < g.n; ++v)
      for (Vertex w : g.adj[v]) nbr[v] |= Mask{1} << w;
  }

  int attachers(Mask a1, Mask a2, Mask a3) const {
    Mask used = a1 | a2 | a3;
    int cnt = 0;
    for (int v = 0; v < g.n; ++v) {
      if (used & (Mask{1} << v)) continue;
      if ((nbr[v] & a1) && (nbr[v] & a2) && (nbr[v] & a3)) ++cnt;
    }
    return cnt;
  }

  static VertexSet mask_to_set(Mask m) {
    VertexSet out;
    for (int v = 0; v < 32; ++v)
      if (m & (Mask{1} << v)) out.push_back(v);
    return out;
  }

  void record(Mask a1, Mask a2, Mask a3) {
    MinorWitness w;
    w.left = {mask_to_set(a1), mask_to_set(a2), mask_to_set(a3)};
    w.h = h;
    Mask used = a1 | a2 | a3;
    for (int v = 0; v < g.n && static_cast<int>(w.right.size()) < h; ++v) {
      if (used & (Mask{1} << v)) continue;
      if ((nbr[v] & a1) && (nbr[v] & a2) && (nbr[v] & a3)) w.right.push_back(v);
    }
    found = w;
  }

  bool grow(Mask a1, Mask a2, Mask a3) {
    if (found) return true;
    std::uint64_t key =
        (static_cast<std::uint64_t>(a1) * 0x9e3779b97f4a7c15ull) ^
        (static_cast<std::uint64_t>(a2) * 0xc2b2ae3d27d4eb4full) ^
        (static_cast<std::uint64_t>(a3) + 0x165667b19e3779f9ull);
    if (visited.count(key)) return false;
    visited[key] = 1;

    if (attachers(a1, a2, a3) >= h) {
      record(a1, a2, a3);
      return true;
    }
    Mask used = a1 | a2 | a3;
    // Not enough free vertices of degree >= 3 left to ever attach.
    int potential = 0;
    for (int v = 0; v < g.n; ++v) {
      if (used & (Mask{1} << v)) continue;
      if (g.degree(v) >= 3) ++potential;
    }
    if (potential < h) return false;

    Mask sets[3] = {a1, a2, a3};
    for (int i = 0; i < 3; ++i) {
      Mask grow_from = sets[i];
      Mask cand = 0;
      for (int v = 0; v < g.n; ++v)
        if (grow_from & (Mask{1} << v)) cand |= nbr[v];
      cand &= ~used;
      for (int v = 0; v < g.n; ++v) {
        if (!(cand & (Mask{1} << v))) continue;
        Mask ns[3] = {a1, a2, a3};
        ns[i] |= Mask{1} << v;
        if (grow(ns[0], ns[1], ns[2])) return true;
      }
    }
    return false;
  }
};

}  // namespace

std::optional<MinorWitness> contains_k3h_minor(const ColoredGraph& g, int h, int size_cap) {
  if (h < 1) throw DomainError("h must be positive");
  if (g.n > size_cap || g.n > 32)
    throw InstanceTooLarge("minor search capped at n <= " + std::to_string(std::min(size_cap, 32)));
  if (g.n < h + 3) return std::nullopt;

  MinorSearch search(g, h);
  // Seed with ordered-by-id triples of distinct vertices; branch sets grow from
  // there. Right branch sets can always be shrunk to single vertices by
  // absorbing their remainder into a left set, so attachers are single vertices.
  for (Vertex v1 = 0; v1 < g.n; ++v1)
    for (Vertex v2 = v1 + 1; v2 < g.n; ++v2)
      for (Vertex v3 = v2 + 1; v3 < g.n; ++v3) {
        if (search.grow(Mask{1} << v1, Mask{1} << v2, Mask{1} << v3))
          return search.found;
      }
  return std::nullopt;
}

bool verify_minor_witness(const ColoredGraph& g, const MinorWitness& w) {
  std::vector<char> owner(g.n, -1);
  for (int i = 0; i < 3; ++i) {
    if (w.left[i].empty()) return false;
    for (Vertex v : w.left[i]) {
      if (v < 0 || v >= g.n || owner[v] != -1) return false;
      owner[v] = static_cast<char>(i);
    }
  }
  if (static_cast<int>(w.right.size()) < w.h) return false;
  for (Vertex v : w.right) {
    if (v < 0 || v >= g.n || owner[v] != -1) return false;
    owner[v] = 3;
  }
  for (int i = 0; i < 3; ++i) {
    ColoredGraph sub = induced_subgraph(g, w.left[i]);
    if (!is_connected(sub)) return false;
  }
  for (Vertex r : w.right) {
    bool adj[3] = {false, false, false};
    for (Vertex x : g.adj[r])
      if (owner[x] >= 0 && owner[x] < 3) adj[owner[x]] = true;
    if (!adj[0] || !adj[1] || !adj[2]) return false;
  }
  return true;
}

// --- helpers ------------------------------------------------------------------

bool is_sorted_vertex_set(const VertexSet& s) {
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i - 1] >= s[i]) return false;
  return true;
}

VertexSet sorted_set(VertexSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

bool set_contains(const VertexSet& s, Vertex v) {
  return std::binary_search(s.begin(), s.end(), v);
}

VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VertexSet set_difference(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VertexSet set_intersection(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VertexSet full_vertex_set(int n) {
  VertexSet out(n);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

}  // namespace k3h
