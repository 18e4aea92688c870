#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <vector>

#include "k3hiso/graph.hpp"

namespace k3h {

using BigInt = boost::multiprecision::cpp_int;

// Permutation on 0..d-1 stored as its image array.
struct Perm {
  std::vector<int> img;

  Perm() = default;
  explicit Perm(int d) : img(d) {
    for (int i = 0; i < d; ++i) img[i] = i;
  }
  explicit Perm(std::vector<int> images);

  int degree() const { return static_cast<int>(img.size()); }
  int operator()(int x) const { return img[x]; }
  bool is_identity() const;
  Perm inverse() const;
  bool operator==(const Perm& o) const { return img == o.img; }
};

// compose(a,b): apply b first, then a.
Perm compose(const Perm& a, const Perm& b);

// Permutation group as base + strong generating set with explicit transversals
// per base point (deterministic Schreier-Sims). Immutable once built.
class PermGroup {
 public:
  // Builds the trivial group.
  explicit PermGroup(int degree = 0);

  // BSGS for <gens>. Base points are drawn from prescribed_base first (in
  // order, skipping points fixed by the whole remaining stabilizer), then
  // smallest moved points.
  static PermGroup from_generators(int degree, const std::vector<Perm>& gens,
                                   const std::vector<int>& prescribed_base = {});

  int degree() const { return degree_; }
  const std::vector<int>& base() const { return base_; }
  const std::vector<Perm>& strong_generators() const { return strong_gens_; }
  int base_length() const { return static_cast<int>(base_.size()); }

  BigInt order() const;
  bool is_trivial() const { return base_.empty(); }
  bool contains(const Perm& g) const;
  std::vector<VertexSet> orbits() const;

  // Subgroup fixing every point of A, as its own BSGS.
  PermGroup pointwise_stabilizer(const VertexSet& A) const;

  // Induced action on the invariant set A, re-indexed to 0..|A|-1. Throws
  // PreconditionError if A is not invariant. index_map[i] = A[i].
  PermGroup restrict_to_invariant(const VertexSet& A, VertexSet* index_map = nullptr) const;

  // |G| == 2^k (trivial group counts, 2^0).
  bool has_two_power_order() const;

  // Orbit of the i-th base point at level i, and its transversal elements
  // (u with base[i]^u = point). Exposed for backtrack searches.
  const std::vector<int>& level_orbit(int i) const { return orbit_list_[i]; }
  const std::vector<Perm>& level_generators(int i) const { return level_gens_[i]; }
  Perm transversal(int i, int point) const;

  // Strips g through the chain; returns the residue and the level reached
  // (level == base length and identity residue means membership).
  std::pair<Perm, int> strip(const Perm& g) const;

  // All elements, ascending image arrays, up to cap (throws InstanceTooLarge
  // if the order exceeds cap). Test/oracle support.
  std::vector<Perm> elements(std::size_t cap = 100000) const;

  // Deterministic pseudo-random element from the given seed.
  Perm sample(std::uint64_t seed) const;

 private:
  int degree_ = 0;
  std::vector<int> base_;
  std::vector<Perm> strong_gens_;
  std::vector<std::vector<Perm>> level_gens_;    // gens fixing base[0..i-1]
  std::vector<std::vector<int>> orbit_list_;     // orbit of base[i], BFS order
  std::vector<std::vector<int>> trans_gen_;      // per point: generator index used to reach it
  std::vector<std::vector<int>> trans_from_;     // per point: predecessor point

  void recompute_orbit(int level);
  bool add_strong_generator(int level, const Perm& g);
  void build(const std::vector<Perm>& gens, const std::vector<int>& prescribed_base);
  friend class BsgsBuilder;
};

// A set of bijections D1 -> D2 represented as {theta . gamma : gamma in group}
// (gamma applied first), or Empty.
struct IsoCoset {
  bool empty = true;
  PermGroup group;       // on the source domain
  std::vector<int> rep;  // source index -> target index

  IsoCoset() = default;
  static IsoCoset make_empty() { return IsoCoset{}; }
  static IsoCoset make(PermGroup g, std::vector<int> representative);

  int source_size() const { return group.degree(); }
  BigInt size() const { return empty ? BigInt(0) : group.order(); }
  bool contains(const std::vector<int>& phi) const;
  // phi for gamma = group.sample(seed).
  std::vector<int> sample_map(std::uint64_t seed) const;
  // Applies: phi(x) = rep[gamma(x)].
  std::vector<int> apply(const Perm& gamma) const;
};

}  // namespace k3h
