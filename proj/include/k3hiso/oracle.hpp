#pragma once

#include <string>

#include "k3hiso/fpt_iso.hpp"

namespace k3h {

// Ground truth: backtracking over 1-WL-stable class-respecting assignments.
std::optional<std::vector<int>> brute_force_iso(const ColoredGraph& g1, const ColoredGraph& g2);

// Random planar triangulation grown by vertex insertion into faces of K_4;
// always 3-connected with 3n-6 edges. Bit-exact reproducible from the seed.
ColoredGraph gen_3connected_planar(int n, std::uint64_t seed);

// Uniformly random relabeling with colors transported; returns the permutation.
std::pair<ColoredGraph, std::vector<int>> permuted_copy(const ColoredGraph& g, std::uint64_t seed);

// Swaps one edge for one non-edge keeping 3-connectivity, re-checking with the
// oracle that the result is non-isomorphic; throws after the retry budget.
ColoredGraph tweak_nonisomorphic(const ColoredGraph& g, std::uint64_t seed,
                                 int retry_budget = 300);

// Curated genus-<=1 library: "k5", "k33", "c3xc3", "k7", "w4", "prism",
// "octahedron", "cube".
ColoredGraph named_graph(const std::string& name);

struct CorpusSpec {
  std::string name;
  std::string generator;  // planar_permuted | planar_tweaked | toroidal_permuted | cross
  std::string expected;   // iso | non-iso
  std::uint64_t seed = 0;
  int n = 0;
  int h = 7;
  std::string graph_a, graph_b;  // named graphs for toroidal generators
};

struct CorpusPair {
  CorpusSpec spec;
  ColoredGraph g1, g2;
};

// Re-generates the pair from its spec (generator + seed).
CorpusPair realize(const CorpusSpec& spec);

struct Corpus {
  std::vector<CorpusSpec> pairs;
};

struct PairReport {
  std::string name;
  std::string expected;
  std::string fpt_verdict;
  std::string oracle_verdict;
  bool match = false;
  double wall_ms = 0;
};

struct CorpusReport {
  std::vector<PairReport> pairs;
  int failures = 0;
};

// engine: "fpt", "oracle", or "both" (compares the two and the expectation).
CorpusReport run_corpus(const Corpus& corpus, const std::string& engine = "both");

std::string verdict_name(Verdict v);

}  // namespace k3h
