#include "k3hiso/perm_group.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace k3h {

Perm::Perm(std::vector<int> images) : img(std::move(images)) {
  std::vector<char> seen(img.size(), 0);
  for (int x : img) {
    if (x < 0 || x >= static_cast<int>(img.size()) || seen[x])
      throw DomainError("permutation image is not a bijection");
    seen[x] = 1;
  }
}

bool Perm::is_identity() const {
  for (int i = 0; i < degree(); ++i)
    if (img[i] != i) return false;
  return true;
}

Perm Perm::inverse() const {
  Perm out;
  out.img.resize(img.size());
  for (int i = 0; i < degree(); ++i) out.img[img[i]] = i;
  return out;
}

Perm compose(const Perm& a, const Perm& b) {
  if (a.degree() != b.degree()) throw DomainError("compose: degree mismatch");
  Perm out;
  out.img.resize(a.img.size());
  for (int i = 0; i < a.degree(); ++i) out.img[i] = a.img[b.img[i]];
  return out;
}

PermGroup::PermGroup(int degree) : degree_(degree) {}

void PermGroup::recompute_orbit(int level) {
  const int b = base_[level];
  auto& orbit = orbit_list_[level];
  auto& tg = trans_gen_[level];
  auto& tf = trans_from_[level];
  orbit.clear();
  tg.assign(degree_, -1);
  tf.assign(degree_, -1);
  orbit.push_back(b);
  tf[b] = b;
  for (std::size_t qi = 0; qi < orbit.size(); ++qi) {
    int p = orbit[qi];
    for (std::size_t si = 0; si < level_gens_[level].size(); ++si) {
      int q = level_gens_[level][si](p);
      if (tf[q] == -1) {
        tf[q] = p;
        tg[q] = static_cast<int>(si);
        orbit.push_back(q);
      }
    }
  }
}

Perm PermGroup::transversal(int i, int point) const {
  if (trans_from_[i][point] == -1) throw DomainError("point outside level orbit");
  std::vector<int> gens_on_path;
  int p = point;
  while (p != base_[i]) {
    gens_on_path.push_back(trans_gen_[i][p]);
    p = trans_from_[i][p];
  }
  Perm out(degree_);
  for (auto it = gens_on_path.rbegin(); it != gens_on_path.rend(); ++it)
    out = compose(level_gens_[i][*it], out);
  return out;
}

std::pair<Perm, int> PermGroup::strip(const Perm& g) const {
  if (g.degree() != degree_) throw DomainError("strip: degree mismatch");
  Perm h = g;
  for (int i = 0; i < base_length(); ++i) {
    int p = h(base_[i]);
    if (trans_from_[i][p] == -1) return {h, i};
    h = compose(transversal(i, p).inverse(), h);
  }
  return {h, base_length()};
}

bool PermGroup::add_strong_generator(int level, const Perm& g) {
  // Registers g at every level <= `level` whose base prefix it fixes, and
  // regrows those orbits.
  strong_gens_.push_back(g);
  for (int j = 0; j <= level; ++j) {
    bool fixes_prefix = true;
    for (int t = 0; t < j; ++t)
      if (g(base_[t]) != base_[t]) {
        fixes_prefix = false;
        break;
      }
    if (fixes_prefix) {
      level_gens_[j].push_back(g);
      recompute_orbit(j);
    }
  }
  return true;
}

namespace {
int pick_base_point(const Perm& moved_by, const std::vector<int>& prescribed,
                    const std::vector<char>& in_base) {
  for (int p : prescribed)
    if (!in_base[p] && moved_by(p) != p) return p;
  for (int p = 0; p < moved_by.degree(); ++p)
    if (!in_base[p] && moved_by(p) != p) return p;
  throw DomainError("no base point available for a non-identity residue");
}
}  // namespace

void PermGroup::build(const std::vector<Perm>& gens, const std::vector<int>& prescribed_base) {
  std::vector<char> in_base(degree_, 0);
  // Prescribed points become base points up front; redundant levels (orbit
  // size 1) keep stabilizer extraction by prefix simple.
  auto push_level = [&](int b) {
    in_base[b] = 1;
    base_.push_back(b);
    level_gens_.emplace_back();
    orbit_list_.emplace_back();
    trans_gen_.emplace_back();
    trans_from_.emplace_back();
    recompute_orbit(base_length() - 1);
  };
  for (int p : prescribed_base) {
    if (p < 0 || p >= degree_) throw DomainError("prescribed base point out of range");
    if (!in_base[p]) push_level(p);
  }

  auto insert = [&](const Perm& g) {
    auto [res, lev] = strip(g);
    if (res.is_identity()) return;
    if (lev == base_length()) push_level(pick_base_point(res, prescribed_base, in_base));
    add_strong_generator(lev, res);
  };

  for (const Perm& g : gens) {
    if (g.degree() != degree_) throw DomainError("generator degree mismatch");
    if (!g.is_identity()) insert(g);
  }

  // Schreier closure from the deepest level downward.
  int i = base_length() - 1;
  while (i >= 0) {
    bool complete = true;
    const auto orbit_snapshot = orbit_list_[i];
    for (int p : orbit_snapshot) {
      Perm u_p = transversal(i, p);
      for (std::size_t si = 0; si < level_gens_[i].size(); ++si) {
        const Perm& s = level_gens_[i][si];
        int q = s(p);
        Perm sg = compose(transversal(i, q).inverse(), compose(s, u_p));
        if (sg.is_identity()) continue;
        auto [res, lev] = strip(sg);
        if (res.is_identity()) continue;
        if (lev == base_length()) push_level(pick_base_point(res, prescribed_base, in_base));
        add_strong_generator(lev, res);
        complete = false;
        i = lev;  // re-certify from the deepest affected level
        break;
      }
      if (!complete) break;
    }
    if (complete) --i;
  }
}

PermGroup PermGroup::from_generators(int degree, const std::vector<Perm>& gens,
                                     const std::vector<int>& prescribed_base) {
  PermGroup g(degree);
  g.build(gens, prescribed_base);
  return g;
}

BigInt PermGroup::order() const {
  BigInt o = 1;
  for (const auto& orbit : orbit_list_) o *= static_cast<int>(orbit.size());
  return o;
}

bool PermGroup::contains(const Perm& g) const {
  if (g.degree() != degree_) throw DomainError("contains: degree mismatch");
  auto [res, lev] = strip(g);
  (void)lev;
  return res.is_identity();
}

std::vector<VertexSet> PermGroup::orbits() const {
  std::vector<int> parent(degree_);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Perm& s : strong_gens_)
    for (int v = 0; v < degree_; ++v) parent[find(v)] = find(s(v));
  std::vector<VertexSet> by_root(degree_);
  for (int v = 0; v < degree_; ++v) by_root[find(v)].push_back(v);
  std::vector<VertexSet> out;
  for (auto& s : by_root)
    if (!s.empty()) out.push_back(std::move(s));
  // Ordered by minimum element.
  std::sort(out.begin(), out.end());
  return out;
}

PermGroup PermGroup::pointwise_stabilizer(const VertexSet& A) const {
  for (int a : A)
    if (a < 0 || a >= degree_) throw DomainError("stabilizer point out of range");
  PermGroup rebased = from_generators(degree_, strong_gens_, A);
  std::vector<Perm> stab_gens;
  int cut = static_cast<int>(A.size());
  if (cut >= rebased.base_length()) {
    for (const Perm& s : rebased.strong_gens_) {
      bool fixes = true;
      for (int a : A)
        if (s(a) != a) fixes = false;
      if (fixes) stab_gens.push_back(s);
    }
  } else {
    stab_gens = rebased.level_gens_[cut];
  }
  return from_generators(degree_, stab_gens);
}

PermGroup PermGroup::restrict_to_invariant(const VertexSet& A, VertexSet* index_map) const {
  std::vector<int> local(degree_, -1);
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (A[i] < 0 || A[i] >= degree_) throw DomainError("restriction point out of range");
    local[A[i]] = static_cast<int>(i);
  }
  std::vector<Perm> mapped;
  for (const Perm& s : strong_gens_) {
    Perm m(static_cast<int>(A.size()));
    for (std::size_t i = 0; i < A.size(); ++i) {
      int img = s(A[i]);
      if (img < 0 || local[img] < 0)
        throw PreconditionError("set is not invariant under the group");
      m.img[i] = local[img];
    }
    mapped.push_back(m);
  }
  if (index_map) *index_map = A;
  return from_generators(static_cast<int>(A.size()), mapped);
}

bool PermGroup::has_two_power_order() const {
  BigInt o = order();
  while (o % 2 == 0) o /= 2;
  return o == 1;
}

std::vector<Perm> PermGroup::elements(std::size_t cap) const {
  std::set<std::vector<int>> seen;
  std::vector<Perm> queue;
  Perm id(degree_);
  seen.insert(id.img);
  queue.push_back(id);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    Perm cur = queue[qi];
    for (const Perm& s : strong_gens_) {
      Perm nxt = compose(s, cur);
      if (seen.insert(nxt.img).second) {
        if (seen.size() > cap) throw InstanceTooLarge("group too large to enumerate");
        queue.push_back(nxt);
      }
    }
  }
  std::vector<Perm> out;
  out.reserve(seen.size());
  for (const auto& img : seen) {
    Perm p;
    p.img = img;
    out.push_back(p);
  }
  return out;
}

Perm PermGroup::sample(std::uint64_t seed) const {
  auto next = [&seed]() {
    seed += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = seed;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  Perm g(degree_);
  for (int i = 0; i < base_length(); ++i) {
    const auto& orbit = orbit_list_[i];
    int p = orbit[next() % orbit.size()];
    g = compose(g, transversal(i, p));
  }
  return g;
}

IsoCoset IsoCoset::make(PermGroup g, std::vector<int> representative) {
  if (static_cast<int>(representative.size()) != g.degree())
    throw DomainError("coset representative size mismatch");
  std::vector<char> seen(representative.size(), 0);
  for (int x : representative) {
    if (x < 0 || x >= static_cast<int>(representative.size()) || seen[x])
      throw DomainError("coset representative is not a bijection");
    seen[x] = 1;
  }
  IsoCoset c;
  c.empty = false;
  c.group = std::move(g);
  c.rep = std::move(representative);
  return c;
}

bool IsoCoset::contains(const std::vector<int>& phi) const {
  if (empty) return false;
  if (phi.size() != rep.size()) throw DomainError("coset membership: size mismatch");
  std::vector<int> rep_inv(rep.size());
  for (std::size_t i = 0; i < rep.size(); ++i) rep_inv[rep[i]] = static_cast<int>(i);
  Perm gamma(static_cast<int>(rep.size()));
  for (std::size_t x = 0; x < phi.size(); ++x) gamma.img[x] = rep_inv[phi[x]];
  return group.contains(gamma);
}

std::vector<int> IsoCoset::apply(const Perm& gamma) const {
  std::vector<int> out(rep.size());
  for (std::size_t x = 0; x < rep.size(); ++x) out[x] = rep[gamma(x)];
  return out;
}

std::vector<int> IsoCoset::sample_map(std::uint64_t seed) const {
  return apply(group.sample(seed));
}

}  // namespace k3h
